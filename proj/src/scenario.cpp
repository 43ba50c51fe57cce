#include "graphwatch/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace graphwatch {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr int kDatasetVersion = 1;
constexpr const char* kDatasetSchema = "graphwatch.dataset";

// Partial Fisher-Yates: first `count` entries of `pool` become a uniform
// sample without replacement.
void draw_prefix(std::vector<int>& pool, int count, Rng& rng) {
    const int n = static_cast<int>(pool.size());
    for (int i = 0; i < count; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, n - 1));
        std::swap(pool[i], pool[j]);
    }
}

void shuffle_all(std::vector<int>& v, Rng& rng) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(0, i));
        std::swap(v[i], v[j]);
    }
}

// Perturbation targets: a 20-50% subset of edges walked class by class in a
// shuffled order, so selected roads cluster by travel-time distribution.
std::vector<int> select_perturbed_edges(const Topology& topo, const ScenarioConfig& cfg, Rng& rng) {
    const int edge_count = static_cast<int>(topo.edges.size());
    const double frac = rng.uniform(cfg.perturb_lo, cfg.perturb_hi);
    const int target = std::max(1, static_cast<int>(std::llround(frac * edge_count)));

    std::vector<int> classes;
    for (int c : topo.edge_class)
        if (std::find(classes.begin(), classes.end(), c) == classes.end()) classes.push_back(c);
    std::sort(classes.begin(), classes.end());
    shuffle_all(classes, rng);

    std::vector<int> selected;
    for (int cls : classes) {
        std::vector<int> members;
        for (int e = 0; e < edge_count; ++e)
            if (topo.edge_class[e] == cls) members.push_back(e);
        shuffle_all(members, rng);
        for (int e : members) {
            if (static_cast<int>(selected.size()) >= target) break;
            selected.push_back(e);
        }
        if (static_cast<int>(selected.size()) >= target) break;
    }
    return selected;
}

}  // namespace

ScenarioLabel label_from_int(int value) {
    if (value < 0 || value > 3) throw std::invalid_argument("label must be in 0..3");
    return static_cast<ScenarioLabel>(value);
}

TravelTimeModel TravelTimeModel::in_control() {
    TravelTimeModel m;
    m.classes = {{1, {0.1, 0.05}}, {2, {0.7, 0.05}}, {3, {1.1, 0.05}}, {5, {1.6, 0.05}}};
    return m;
}

const TravelTimeModel::Params& TravelTimeModel::params_for(int edge_class) const {
    for (const auto& [cls, p] : classes)
        if (cls == edge_class) return p;
    throw std::invalid_argument("travel-time model has no class " + std::to_string(edge_class));
}

double TravelTimeModel::class_mean(int edge_class) const {
    const Params& p = params_for(edge_class);
    return std::exp(p.mu + 0.5 * p.sigma * p.sigma);
}

DayConditions in_control_conditions(const Topology& topo, const TravelTimeModel& model,
                                    const ScenarioConfig& cfg, Rng& rng) {
    DayConditions conditions;
    conditions.reserve(topo.edges.size());
    for (int cls : topo.edge_class) {
        const auto& p = model.params_for(cls);
        const int blocking = rng.uniform01() < cfg.block1_prob ? 1 : 0;
        conditions.push_back({p.mu, p.sigma, blocking});
    }
    return conditions;
}

DayConditions apply_construction(const Topology& topo, const TravelTimeModel& model,
                                 const ScenarioConfig& cfg, Rng& rng, double shift_scale) {
    DayConditions conditions = in_control_conditions(topo, model, cfg, rng);
    for (int e : select_perturbed_edges(topo, cfg, rng)) {
        const int level = rng.uniform01() < 0.5 ? 2 : 3;
        conditions[e].blocking = level;
        conditions[e].mu += shift_scale * (level == 2 ? cfg.delta_mid : cfg.delta_high);
    }
    return conditions;
}

DayConditions apply_traffic_jam(const Topology& topo, const TravelTimeModel& model,
                                const ScenarioConfig& cfg, Rng& rng, double shift_scale) {
    DayConditions conditions = in_control_conditions(topo, model, cfg, rng);
    for (int e : select_perturbed_edges(topo, cfg, rng))
        conditions[e].mu += shift_scale * cfg.delta_jam;
    return conditions;
}

Eigen::VectorXd realize_edge_times(const DayConditions& conditions, Rng& rng) {
    Eigen::VectorXd times(static_cast<Eigen::Index>(conditions.size()));
    for (std::size_t e = 0; e < conditions.size(); ++e)
        times(static_cast<Eigen::Index>(e)) = rng.lognormal(conditions[e].mu, conditions[e].sigma);
    return times;
}

Eigen::VectorXd sample_edge_times(const Topology& topo, const TravelTimeModel& model, Rng& rng) {
    Eigen::VectorXd times(static_cast<Eigen::Index>(topo.edges.size()));
    for (std::size_t e = 0; e < topo.edges.size(); ++e) {
        const auto& p = model.params_for(topo.edge_class[e]);
        times(static_cast<Eigen::Index>(e)) = rng.lognormal(p.mu, p.sigma);
    }
    return times;
}

double apply_shortage(const Topology& topo, const TravelTimeModel& model) {
    double mean_edge_time = 0.0;
    for (int cls : topo.edge_class) mean_edge_time += model.class_mean(cls);
    mean_edge_time /= static_cast<double>(topo.edges.size());
    return mean_edge_time * 2.0 * 2.0;
}

Scene label_zero_override(Scene scene) {
    if (scene.label != ScenarioLabel::construction && scene.label != ScenarioLabel::traffic_jam)
        return scene;
    const bool all_on_time = std::all_of(scene.response_times.begin(), scene.response_times.end(),
                                         [](double t) { return t <= kResponseTimeLimit; });
    if (all_on_time) scene.label = ScenarioLabel::stable;
    return scene;
}

DaySchedule make_schedule(int day, ScenarioLabel regime, const ScenarioConfig& cfg, Rng& rng) {
    return {day, regime, static_cast<int>(rng.uniform_int(cfg.accidents_min, cfg.accidents_max))};
}

DayResult simulate_day(const Topology& topo, const TravelTimeModel& model,
                       const ScenarioConfig& cfg, const DaySchedule& schedule, Rng rng,
                       double shift_scale) {
    if (schedule.accident_count < 1)
        throw std::invalid_argument("simulate_day: accident_count must be >= 1");

    DayConditions conditions;
    switch (schedule.regime) {
        case ScenarioLabel::construction:
            conditions = apply_construction(topo, model, cfg, rng, shift_scale);
            break;
        case ScenarioLabel::traffic_jam:
            conditions = apply_traffic_jam(topo, model, cfg, rng, shift_scale);
            break;
        default:
            conditions = in_control_conditions(topo, model, cfg, rng);
            break;
    }

    const Eigen::VectorXd times = realize_edge_times(conditions, rng);
    Eigen::MatrixXd edge_attrs(times.size(), 2);
    for (Eigen::Index e = 0; e < times.size(); ++e) {
        edge_attrs(e, kTravelTimeColumn) = times(e);
        edge_attrs(e, kBlockingColumn) = static_cast<double>(conditions[e].blocking);
    }

    AttributedGraph working =
        make_attributed_graph(topo.node_count, topo.edges, base_node_attrs(topo), edge_attrs);

    std::vector<int> patients;
    for (int v = 0; v < topo.node_count; ++v)
        if (working.node_attrs(v, kRoleColumn) == 0.0) patients.push_back(v);

    const int station_count = static_cast<int>(topo.ambulance_nodes.size());
    const bool shortage_day = schedule.regime == ScenarioLabel::shortage;

    DayResult result;
    result.day = schedule.day;
    result.regime = schedule.regime;

    int remaining = schedule.accident_count;
    while (remaining > 0) {
        int size;
        if (shortage_day) {
            size = static_cast<int>(rng.uniform_int(cfg.shortage_min, cfg.shortage_max));
            // Absorb a short tail so every shortage episode keeps >= 3 calls.
            if (remaining - size < cfg.shortage_min) size = remaining;
        } else {
            const bool pair =
                station_count >= 2 && remaining >= 2 && rng.uniform01() < cfg.pair_episode_prob;
            size = pair ? 2 : 1;
        }
        size = std::min(size, static_cast<int>(patients.size()));

        draw_prefix(patients, size, rng);

        Scene scene;
        scene.label = schedule.regime;
        for (int i = 0; i < size; ++i) {
            const int patient = patients[i];
            working.node_attrs(patient, kInvolvementColumn) = 1.0;
            if (auto dispatch = nearest_free_ambulance(working, patient)) {
                working.node_attrs(dispatch->station, kInvolvementColumn) = 1.0;
                scene.response_times.push_back(dispatch->cost);
            } else {
                if (!shortage_day)
                    throw std::logic_error(
                        "simulate_day: stations exhausted outside the shortage regime");
                scene.response_times.push_back(apply_shortage(topo, model));
            }
        }

        scene.graph = working;  // snapshot after all assignments of the episode
        scene = label_zero_override(std::move(scene));
        result.response_times.insert(result.response_times.end(), scene.response_times.begin(),
                                     scene.response_times.end());
        result.scenes.push_back(std::move(scene));

        working.node_attrs.col(kInvolvementColumn).setZero();  // release between episodes
        remaining -= size;
    }
    return result;
}

Scene generate_labeled_scene(const Topology& topo, const TravelTimeModel& model,
                             const ScenarioConfig& cfg, ScenarioLabel target, const Rng& base,
                             std::uint64_t index, bool jitter_shifts) {
    const Rng stream = base.split(index);
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        Rng rng = stream.split(static_cast<std::uint64_t>(attempt));

        const double scale =
            jitter_shifts ? rng.uniform(1.0 - cfg.val_jitter, 1.0 + cfg.val_jitter) : 1.0;

        ScenarioLabel regime = target;
        if (target == ScenarioLabel::stable) {
            // Stable scenes mix clean days with on-time construction/jam days,
            // so the classifier sees obstacles that did not break the limit.
            const double u = rng.uniform01();
            regime = u < 0.5    ? ScenarioLabel::stable
                     : u < 0.75 ? ScenarioLabel::construction
                                : ScenarioLabel::traffic_jam;
        }

        int size = 1;
        if (regime == ScenarioLabel::shortage) {
            size = static_cast<int>(rng.uniform_int(cfg.shortage_min, cfg.shortage_max));
        } else if (static_cast<int>(topo.ambulance_nodes.size()) >= 2 &&
                   rng.uniform01() < cfg.pair_episode_prob) {
            size = 2;
        }

        const DaySchedule schedule{0, regime, size};
        DayResult day = simulate_day(topo, model, cfg, schedule, rng, scale);
        Scene& scene = day.scenes.front();
        if (scene.label == target) return std::move(scene);
    }
    throw std::runtime_error("generate_labeled_scene: rejection sampling exhausted for label " +
                             std::to_string(static_cast<int>(target)));
}

std::vector<Scene> generate_balanced_set(const Topology& topo, const TravelTimeModel& model,
                                         const ScenarioConfig& cfg, int per_class, const Rng& base,
                                         bool jitter_shifts) {
    std::vector<Scene> scenes;
    scenes.reserve(static_cast<std::size_t>(per_class) * 4);
    for (int label = 0; label < 4; ++label)
        for (int i = 0; i < per_class; ++i)
            scenes.push_back(generate_labeled_scene(
                topo, model, cfg, label_from_int(label), base,
                static_cast<std::uint64_t>(label) * static_cast<std::uint64_t>(per_class) +
                    static_cast<std::uint64_t>(i),
                jitter_shifts));
    return scenes;
}

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_dataset: cannot write " + path);

    ordered_json header;
    header["schema"] = kDatasetSchema;
    header["version"] = kDatasetVersion;
    out << header.dump() << "\n";

    for (const auto& rec : records) {
        const AttributedGraph& g = rec.scene.graph;
        ordered_json row;
        row["day"] = rec.day;
        row["label"] = static_cast<int>(rec.scene.label);
        auto nodes = json::array();
        for (int v = 0; v < g.node_count; ++v)
            nodes.push_back({static_cast<int>(g.node_attrs(v, kRoleColumn)),
                             static_cast<int>(g.node_attrs(v, kInvolvementColumn))});
        row["node_attrs"] = std::move(nodes);
        auto edges = json::array();
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            edges.push_back({g.edges[e].first, g.edges[e].second,
                             g.edge_attrs(static_cast<Eigen::Index>(e), kTravelTimeColumn),
                             static_cast<int>(g.edge_attrs(static_cast<Eigen::Index>(e),
                                                           kBlockingColumn))});
        row["edges"] = std::move(edges);
        row["response_times"] = rec.scene.response_times;
        out << row.dump() << "\n";
    }
}

std::vector<DatasetRecord> read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_dataset: cannot open " + path);

    std::string line;
    std::size_t line_no = 0;
    auto parse_line = [&](const std::string& text) {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("read_dataset: " + path + " line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
    };

    if (!std::getline(in, line)) throw std::runtime_error("read_dataset: empty file " + path);
    ++line_no;
    const json header = parse_line(line);
    if (header.value("schema", "") != kDatasetSchema || header.value("version", 0) != kDatasetVersion)
        throw std::runtime_error("read_dataset: unsupported schema/version in " + path);

    std::vector<DatasetRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json row = parse_line(line);

        DatasetRecord rec;
        rec.day = row.at("day").get<int>();

        const auto& node_arr = row.at("node_attrs");
        const int node_count = static_cast<int>(node_arr.size());
        Eigen::MatrixXd node_attrs(node_count, 2);
        for (int v = 0; v < node_count; ++v) {
            node_attrs(v, 0) = node_arr[v][0].get<double>();
            node_attrs(v, 1) = node_arr[v][1].get<double>();
        }

        const auto& edge_arr = row.at("edges");
        std::vector<std::pair<int, int>> edges;
        Eigen::MatrixXd edge_attrs(static_cast<Eigen::Index>(edge_arr.size()), 2);
        for (std::size_t e = 0; e < edge_arr.size(); ++e) {
            edges.emplace_back(edge_arr[e][0].get<int>(), edge_arr[e][1].get<int>());
            edge_attrs(static_cast<Eigen::Index>(e), 0) = edge_arr[e][2].get<double>();
            edge_attrs(static_cast<Eigen::Index>(e), 1) = edge_arr[e][3].get<double>();
        }

        rec.scene.graph = make_attributed_graph(node_count, std::move(edges),
                                                std::move(node_attrs), std::move(edge_attrs));
        rec.scene.label = label_from_int(row.at("label").get<int>());
        rec.scene.response_times = row.at("response_times").get<std::vector<double>>();
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace graphwatch
