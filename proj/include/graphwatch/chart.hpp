#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace graphwatch {

// Daily (0.8, 0.95) response-time quantile pair, the monitored vector.
struct QuantileVector {
    double q80 = 0.0;
    double q95 = 0.0;

    Eigen::Vector2d as_vector() const { return {q80, q95}; }
};

// Frozen Phase I calibration: in-control mean, covariance and the chi-square
// control limit. Immutable once produced by calibrate().
struct QuantileChartState {
    Eigen::Vector2d q0 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d sigma0 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d sigma0_inverse = Eigen::Matrix2d::Zero();
    double control_limit = 0.0;
    double arl = 0.0;
    bool regularized = false;  // ridge was applied to a near-singular covariance
};

// Linear-interpolation order-statistic quantile with plotting position
// h = (n - 1) p + 1. Throws on an empty sample.
double empirical_quantile(const std::vector<double>& samples, double p);

// Both monitored quantiles from one sort of the day's response times.
QuantileVector daily_quantiles(const std::vector<double>& response_times);

// Inverse CDF of the chi-square distribution. Closed form -2 ln(1 - prob) for
// df = 2, bracketed inversion of the regularized incomplete gamma otherwise.
double chi_square_quantile(double prob, int df);

// Lower regularized incomplete gamma P(a, x); exposed for the chart tests.
double lower_regularized_gamma(double a, double x);

// Phase I: componentwise mean, sample covariance (divisor n - 1) and the
// chi-square limit at 1 - 1/arl with 2 degrees of freedom. A near-singular
// covariance gets a ridge eps * trace/2 and sets `regularized`; an exactly
// uninvertible one after that throws.
QuantileChartState calibrate(const std::vector<QuantileVector>& daily, double arl);

// Hotelling-style statistic a_t = (q - q0)' Sigma0^-1 (q - q0).
double statistic(const QuantileChartState& state, const QuantileVector& qt);

struct MonitorDecision {
    double a_t = 0.0;
    bool signal = false;  // a_t >= control_limit (boundary signals)
};

MonitorDecision monitor(const QuantileChartState& state, const QuantileVector& qt);

// Chart-state file round trip (versioned JSON, full float precision).
void save_chart_state(const QuantileChartState& state, const std::string& path);
QuantileChartState load_chart_state(const std::string& path);

}  // namespace graphwatch
