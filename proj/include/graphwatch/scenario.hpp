#pragma once

#include "graphwatch/graph.hpp"
#include "graphwatch/rng.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace graphwatch {

// Legally prescribed maximum travelling time in minutes; scenes whose
// responses all stay at or under this bound are relabeled as stable.
inline constexpr double kResponseTimeLimit = 12.0;

enum class ScenarioLabel : int {
    stable = 0,
    shortage = 1,
    construction = 2,
    traffic_jam = 3,
};

ScenarioLabel label_from_int(int value);

// Per-class lognormal travelling-time parameters. The in-control values come
// from the published attribute table: classes {1, 2, 3, 5} minutes with
// (mu, sigma) = (0.1, 0.05), (0.7, 0.05), (1.1, 0.05), (1.6, 0.05).
struct TravelTimeModel {
    struct Params {
        double mu = 0.0;
        double sigma = 0.0;
    };

    std::vector<std::pair<int, Params>> classes;  // keyed by nominal minutes

    static TravelTimeModel in_control();
    const Params& params_for(int edge_class) const;
    // Closed-form lognormal mean exp(mu + sigma^2 / 2).
    double class_mean(int edge_class) const;
};

// Realized per-edge sampling regime for one day: distribution parameters plus
// the road-blocking level. Out-of-control generators perturb these.
struct EdgeCondition {
    double mu = 0.0;
    double sigma = 0.0;
    int blocking = 0;
};

using DayConditions = std::vector<EdgeCondition>;

// Generator knobs that the published study leaves open; the defaults were
// verified by pilot simulation on the shipped topology.
struct ScenarioConfig {
    double delta_mid = 0.4;    // mu shift for blocking level 2
    double delta_high = 0.8;   // mu shift for blocking level 3
    double delta_jam = 0.6;    // mu shift for jammed roads
    double perturb_lo = 0.2;   // fraction of edges perturbed, lower bound
    double perturb_hi = 0.5;   // upper bound
    double pair_episode_prob = 0.2;  // chance an in-control episode has 2 calls
    double block1_prob = 0.3;        // in-control P(blocking = 1), else 0
    int shortage_min = 3;            // simultaneous accidents in a shortage episode
    int shortage_max = 6;
    int accidents_min = 10;  // accidents per monitored day
    int accidents_max = 100;
    double val_jitter = 0.25;  // +-25% shift-table jitter for validation scenes
    int max_attempts = 20000;  // rejection-sampling cap per labeled scene
};

struct DaySchedule {
    int day = 0;
    ScenarioLabel regime = ScenarioLabel::stable;
    int accident_count = 1;
};

// One captured network scene: the attributed-graph snapshot taken after all
// assignments of a simultaneous-accident episode, its condition label and the
// response times registered for that episode.
struct Scene {
    AttributedGraph graph;
    ScenarioLabel label = ScenarioLabel::stable;
    std::vector<double> response_times;
};

// Everything one simulated day produced. Scenes appear in episode order; the
// day's response-time list is their concatenation.
struct DayResult {
    int day = 0;
    ScenarioLabel regime = ScenarioLabel::stable;
    std::vector<double> response_times;
    std::vector<Scene> scenes;
};

// In-control conditions: class parameters untouched, blocking sampled 0 or 1.
DayConditions in_control_conditions(const Topology& topo, const TravelTimeModel& model,
                                    const ScenarioConfig& cfg, Rng& rng);

// Construction works: a 20-50% subset of edges grouped by travel-time class is
// blocked at level 2 or 3 and has mu shifted up by the matching delta.
DayConditions apply_construction(const Topology& topo, const TravelTimeModel& model,
                                 const ScenarioConfig& cfg, Rng& rng, double shift_scale = 1.0);

// Traffic jams: blocking stays low (0/1) everywhere while a 20-50% subset of
// edges gets mu shifted up by delta_jam.
DayConditions apply_traffic_jam(const Topology& topo, const TravelTimeModel& model,
                                const ScenarioConfig& cfg, Rng& rng, double shift_scale = 1.0);

// One independent lognormal draw per edge from its class parameters.
Eigen::VectorXd sample_edge_times(const Topology& topo, const TravelTimeModel& model, Rng& rng);

Eigen::VectorXd realize_edge_times(const DayConditions& conditions, Rng& rng);

// Travelling time booked to patients that find every station busy:
// E(L1) * 2 * 2, with E(L1) the class-frequency-weighted mean edge time.
double apply_shortage(const Topology& topo, const TravelTimeModel& model);

// Relabels a construction or traffic-jam scene as stable when every response
// stayed within the prescribed limit. Idempotent; other labels pass through.
Scene label_zero_override(Scene scene);

// Simulates one day under the schedule's regime: accidents are grouped into
// episodes, dispatched to the nearest free station, and one scene is captured
// per episode. Throws std::logic_error if stations are exhausted outside the
// shortage regime.
DayResult simulate_day(const Topology& topo, const TravelTimeModel& model,
                       const ScenarioConfig& cfg, const DaySchedule& schedule, Rng rng,
                       double shift_scale = 1.0);

DaySchedule make_schedule(int day, ScenarioLabel regime, const ScenarioConfig& cfg, Rng& rng);

// Rejection-samples one scene with the requested label. Validation scenes
// (jitter_shifts = true) draw a per-scene multiplier for the shift table.
Scene generate_labeled_scene(const Topology& topo, const TravelTimeModel& model,
                             const ScenarioConfig& cfg, ScenarioLabel target, const Rng& base,
                             std::uint64_t index, bool jitter_shifts = false);

// per_class scenes for each of the four labels, in label-major order.
std::vector<Scene> generate_balanced_set(const Topology& topo, const TravelTimeModel& model,
                                         const ScenarioConfig& cfg, int per_class, const Rng& base,
                                         bool jitter_shifts = false);

// Line-delimited dataset file: a versioned header record followed by one JSON
// record per scene. Round-trips all fields at full float precision.
struct DatasetRecord {
    int day = 0;
    Scene scene;
};

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_dataset(const std::string& path);

}  // namespace graphwatch
