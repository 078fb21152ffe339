#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "prewet/ferrari_spohn.hpp"
#include "prewet/interface.hpp"
#include "prewet/walk.hpp"

namespace prewet {

/// t = column / n^(2/3), y = gamma_plus / (n^(1/3) sqrt(chi)).
PiecewiseLinear rescale_interface(const InterfaceProfile& profile, double n, double chi);

struct RescaledEnsemble {
    std::vector<PiecewiseLinear> profiles;
    std::string provenance;  // "ising" or "walk"
    double n = 0;
    double lambda = 0;
    double beta = 0;
    double chi = 0;
    double window = 0.5;  // profiles compared on [-window, window]

    std::size_t size() const { return profiles.size(); }
    std::vector<double> values_at(double t) const;
};

RescaledEnsemble rescale_interfaces(const std::vector<InterfaceProfile>& profiles, double n,
                                    double chi, double lambda, double beta, double window = 0.5);
/// Walk heights are placed on the time axis centred at x = 0.
RescaledEnsemble rescale_walks(const std::vector<EffectiveWalk>& walks, double n, double chi,
                               double lambda, double window = 0.5);

struct KsResult {
    double statistic = 0;
    double ci_low = 0;   // 2.5% bootstrap quantile
    double ci_high = 0;  // 97.5% bootstrap quantile
    double null_band = 0;  // asymptotic 5% critical value 1.358 / sqrt(m)
    std::size_t samples = 0;
};

/// One-sample Kolmogorov-Smirnov distance.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);

/// KS against the stationary FS law with a 1000-resample bootstrap CI.
/// Throws InsufficientData below 100 samples.
KsResult ks_against_fs(const std::vector<double>& values, const FSReference& fs,
                       std::uint64_t seed, int resamples = 1000);

struct DiagnosticThresholds {
    double kappa = 4.0;
    int box_half_width = 0;  // M
    int box_height = 0;      // R
    double c_area = 4.0;
    double c_len = 8.0;

    /// M = floor(3 n^(1 - 5 eps)), R = ceil(n^eps).
    static DiagnosticThresholds defaults(int n, double eps = 0.1);
};

/// Per-sample record needed by the diagnostics.
struct InterfaceSample {
    InterfaceProfile profile;
    int max_closed_diameter = 0;
};

struct DiagnosticsReport {
    std::size_t samples = 0;
    double restricted_rate = 0;
    double repulsion_rate = 0;
    double area_exceed_rate = 0;
    double length_exceed_rate = 0;
    Quantiles width_q;   // max of gamma_plus - gamma_minus over |i| <= M
    Quantiles area_q;    // |Lambda^-| / n^(4/3)
    Quantiles length_q;  // |gamma| / n
    std::vector<std::pair<double, double>> ks_at;  // (t, KS)
    std::vector<std::pair<double, double>> two_time_gaps;  // (t2 - t1, discrepancy)
};

DiagnosticsReport diagnostics(const std::vector<InterfaceSample>& samples, int n,
                              const DiagnosticThresholds& th);

struct TwoTimeResult {
    double discrepancy = 0;
    double null_q95 = 0;  // 95% quantile of the discrepancy under the prediction
    int bins = 0;
    double r_max = 0;
};

/// L1 distance between the empirical joint histogram of (x1, x2) and
/// rho(r) K(dt, r, y) on a bins x bins grid over [0, r_max]^2.
TwoTimeResult two_time_check(const std::vector<std::pair<double, double>>& pairs, double dt,
                             const FSReference& fs, std::uint64_t seed, int bins = 20,
                             double r_max = 0, bool product_form = false);

struct ScalingFit {
    double slope = 0;
    double intercept = 0;
    double ci_low = 0;
    double ci_high = 0;
};

/// OLS of log(mean height) on log n; percentile bootstrap over samples
/// within each n. Needs at least 4 values of n.
ScalingFit height_scaling_fit(const std::vector<double>& ns,
                              const std::vector<std::vector<double>>& heights, std::uint64_t seed,
                              int resamples = 1000);

}  // namespace prewet
