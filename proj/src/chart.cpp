#include "graphwatch/chart.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace graphwatch {

namespace {

constexpr int kStateVersion = 1;

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cont_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double lower_regularized_gamma(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("lower_regularized_gamma: a must be positive");
    if (x < 0.0) throw std::invalid_argument("lower_regularized_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cont_fraction(a, x);
}

double chi_square_quantile(double prob, int df) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("chi_square_quantile: prob must be in (0, 1)");
    if (df < 1) throw std::invalid_argument("chi_square_quantile: df must be >= 1");
    if (df == 2) return -2.0 * std::log1p(-prob);

    const double a = 0.5 * df;
    auto cdf = [a](double x) { return lower_regularized_gamma(a, 0.5 * x); };

    double hi = static_cast<double>(df);
    while (cdf(hi) < prob) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < prob)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double empirical_quantile(const std::vector<double>& samples, double p) {
    if (samples.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("empirical_quantile: p must be in (0, 1)");

    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());

    const std::size_t n = sorted.size();
    const double h = (static_cast<double>(n) - 1.0) * p + 1.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo >= n) return sorted.back();
    const double below = sorted[lo - 1];
    const double above = lo < n ? sorted[lo] : sorted.back();
    return below + frac * (above - below);
}

QuantileVector daily_quantiles(const std::vector<double>& response_times) {
    return {empirical_quantile(response_times, 0.80), empirical_quantile(response_times, 0.95)};
}

QuantileChartState calibrate(const std::vector<QuantileVector>& daily, double arl) {
    if (daily.size() < 2) throw std::invalid_argument("calibrate: need at least 2 days");
    if (!(arl > 1.0)) throw std::invalid_argument("calibrate: arl must exceed 1");

    const auto n = static_cast<double>(daily.size());
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& q : daily) mean += q.as_vector();
    mean /= n;

    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& q : daily) {
        const Eigen::Vector2d d = q.as_vector() - mean;
        cov += d * d.transpose();
    }
    cov /= (n - 1.0);

    QuantileChartState state;
    state.q0 = mean;
    state.arl = arl;
    state.control_limit = chi_square_quantile(1.0 - 1.0 / arl, 2);

    const double trace = cov.trace();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    if (eig.eigenvalues().minCoeff() < 1e-12 * trace || trace <= 0.0) {
        // Absolute floor keeps an all-constant calibration set usable.
        const double ridge = trace > 0.0 ? 1e-8 * trace / 2.0 : 1e-12;
        cov += ridge * Eigen::Matrix2d::Identity();
        state.regularized = true;
        std::cerr << "calibrate: near-singular covariance, applied ridge " << ridge << "\n";
    }
    const double det = cov.determinant();
    if (det <= 0.0 || !std::isfinite(det))
        throw std::runtime_error("calibrate: covariance is singular even after regularization");

    state.sigma0 = cov;
    // Closed-form 2x2 inverse; the acceptance oracle checks it against a solver.
    Eigen::Matrix2d inv;
    inv << cov(1, 1), -cov(0, 1), -cov(1, 0), cov(0, 0);
    state.sigma0_inverse = inv / det;
    return state;
}

double statistic(const QuantileChartState& state, const QuantileVector& qt) {
    const Eigen::Vector2d d = qt.as_vector() - state.q0;
    return d.dot(state.sigma0_inverse * d);
}

MonitorDecision monitor(const QuantileChartState& state, const QuantileVector& qt) {
    const double a_t = statistic(state, qt);
    return {a_t, a_t >= state.control_limit};
}

void save_chart_state(const QuantileChartState& state, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["schema"] = "graphwatch.chart_state";
    doc["version"] = kStateVersion;
    doc["q0"] = {state.q0(0), state.q0(1)};
    doc["sigma0"] = {{state.sigma0(0, 0), state.sigma0(0, 1)},
                     {state.sigma0(1, 0), state.sigma0(1, 1)}};
    doc["sigma0_inverse"] = {{state.sigma0_inverse(0, 0), state.sigma0_inverse(0, 1)},
                             {state.sigma0_inverse(1, 0), state.sigma0_inverse(1, 1)}};
    doc["control_limit"] = state.control_limit;
    doc["arl"] = state.arl;
    doc["regularized"] = state.regularized;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_chart_state: cannot write " + path);
    out << doc.dump(2) << "\n";
}

QuantileChartState load_chart_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_chart_state: cannot open " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("load_chart_state: " + std::string(e.what()));
    }
    if (doc.value("schema", "") != "graphwatch.chart_state" || doc.value("version", 0) != kStateVersion)
        throw std::runtime_error("load_chart_state: unsupported schema/version in " + path);

    QuantileChartState state;
    for (int i = 0; i < 2; ++i) {
        state.q0(i) = doc["q0"][i].get<double>();
        for (int j = 0; j < 2; ++j) {
            state.sigma0(i, j) = doc["sigma0"][i][j].get<double>();
            state.sigma0_inverse(i, j) = doc["sigma0_inverse"][i][j].get<double>();
        }
    }
    state.control_limit = doc["control_limit"].get<double>();
    state.arl = doc["arl"].get<double>();
    state.regularized = doc.value("regularized", false);
    return state;
}

}  // namespace graphwatch
