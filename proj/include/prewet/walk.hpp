#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "prewet/cone.hpp"
#include "prewet/rng.hpp"

namespace prewet {

/// Increment law of the effective walk, supported on the cone
/// {theta >= 1, |zeta| <= theta}.
class StepLaw {
public:
    StepLaw() = default;
    /// Validates: probabilities nonnegative, summing to 1 within 1e-12,
    /// support inside the cone, mean zeta zero within 1e-12.
    StepLaw(std::vector<Step> support, std::vector<double> prob);

    /// theta in 1..3, |zeta| <= theta, p proportional to exp(-theta - |zeta|).
    static StepLaw default_law();

    /// Empirical step histogram of extracted walks, symmetrised in zeta.
    static StepLaw from_walks(const std::vector<EffectiveWalk>& walks);

    /// Reads a `theta,zeta,p` CSV file.
    static StepLaw read_csv(const std::string& path);
    void write_csv(const std::string& path) const;

    const std::vector<Step>& support() const { return support_; }
    const std::vector<double>& prob() const { return prob_; }
    std::size_t size() const { return support_.size(); }

    double mean_theta() const;
    double mean_zeta() const;
    /// Var(zeta) / E(theta).
    double chi() const;
    int theta_max() const;
    int zeta_max() const;

private:
    std::vector<Step> support_;
    std::vector<double> prob_;
};

/// Area tilt exp(-c_tilt * A) and the height cap of the dynamic programme.
struct TiltParams {
    double c_tilt = 0.0;
    int height_cap = 0;
    // Provenance when built from model parameters (zero otherwise).
    double lambda = 0.0;
    double m_star = 0.0;
    int n = 0;

    /// c_tilt = 2 lambda m* / n; default cap ceil(8 n^(1/3)), and an explicit
    /// cap must be at least 4 n^(1/3).
    static TiltParams from_model(double lambda, double m_star, int n, int height_cap = 0);
    /// Direct construction for toy instances (no cap guard).
    static TiltParams raw(double c_tilt, int height_cap);
};

/// What the height cap means to the dynamic programme.
enum class CapPolicy {
    monitor,    // truncation of an unbounded walk; fail when mass reaches the cap
    hard_wall,  // the cap is part of the model (exact comparisons on toy instances)
};

/// Tilted weight of walks from u, organised by horizontal coordinate.
/// Column x holds scaled weights w[x][z] with true weight
/// w[x][z] * exp(log_scale(x)).
class ColumnTable {
public:
    ColumnTable(const StepLaw& law, const TiltParams& tilt, DualPoint u, int span,
                CapPolicy policy = CapPolicy::monitor);

    DualPoint start() const { return start_; }
    int span() const { return span_; }
    int height_cap() const { return cap_; }

    /// Weight of reaching (start.x + dx, z); dx in [0, span].
    double weight(int dx, int z) const;
    double log_weight(int dx, int z) const;
    double scaled(int dx, int z) const { return w_[idx(dx, z)]; }
    double log_scale(int dx) const { return scale_[dx]; }

    /// Predecessor-weight tables used by samplers: tilt factor of a step
    /// leaving height z.
    double step_factor(std::size_t k, int z) const;

    const StepLaw& law() const { return law_; }
    const TiltParams& tilt() const { return tilt_; }

private:
    std::size_t idx(int dx, int z) const {
        return static_cast<std::size_t>(dx) * static_cast<std::size_t>(cap_ + 1) +
               static_cast<std::size_t>(z);
    }

    StepLaw law_;
    TiltParams tilt_;
    DualPoint start_;
    int span_;
    int cap_;
    std::vector<double> w_;
    std::vector<double> scale_;
};

/// Builds the column table; throws CapTooSmall under CapPolicy::monitor when
/// at least 0.1% of the weight of some column sits above 0.9 * height_cap.
ColumnTable column_dp(const StepLaw& law, const TiltParams& tilt, DualPoint u, int span,
                      CapPolicy policy = CapPolicy::monitor);

/// sum_i theta_i * Z_{i-1}; throws NegativeHeight if some Z_i < 0.
long area(const EffectiveWalk& walk);

using HeightFn = std::function<double(int)>;

/// E_u[exp(-c A(S[0,n])) f(Z_n); S[0,n] in the half-plane], heights capped
/// at the tilt's height_cap.
double n_step_partition(int u_height, int n_steps, const HeightFn& f, const StepLaw& law,
                        const TiltParams& tilt, CapPolicy policy = CapPolicy::monitor);
double log_n_step_partition(int u_height, int n_steps, const HeightFn& f, const StepLaw& law,
                            const TiltParams& tilt, CapPolicy policy = CapPolicy::monitor);

/// Partition function pinned at S_n = v with f_{n_i}(Z_{n_i}) inserted at
/// the marked times 1 <= n_1 < ... < n_m < n.
double fdd_weights(DualPoint u, DualPoint v, int n_steps, const std::vector<int>& marks,
                   const std::vector<HeightFn>& fs, const StepLaw& law, const TiltParams& tilt,
                   CapPolicy policy = CapPolicy::monitor);

/// Exact sampler of the tilted bridge from u to v by backward sampling on
/// the column table. Reuse one sampler for many draws.
class BridgeSampler {
public:
    BridgeSampler(const StepLaw& law, const TiltParams& tilt, DualPoint u, DualPoint v,
                  CapPolicy policy = CapPolicy::monitor);

    EffectiveWalk sample(CounterRng& rng) const;
    const ColumnTable& table() const { return table_; }

    /// log of the bridge partition function.
    double log_partition() const { return table_.log_weight(v_.x - u_.x, v_.y); }
    /// Probability of one particular bridge under the sampler's law.
    double path_probability(const EffectiveWalk& walk) const;

private:
    ColumnTable table_;
    DualPoint u_;
    DualPoint v_;
};

EffectiveWalk sample_tilted_bridge(DualPoint u, DualPoint v, const StepLaw& law,
                                   const TiltParams& tilt, CounterRng& rng);

/// Linear interpolation through (t_k, y_k), t increasing; constant outside.
struct PiecewiseLinear {
    std::vector<double> t;
    std::vector<double> y;
    double operator()(double tau) const;
    double t_min() const { return t.front(); }
    double t_max() const { return t.back(); }
};

/// Through (T_k / n^(2/3), Z_k / (n^(1/3) sqrt(chi))).
PiecewiseLinear rescale_diffusive(const EffectiveWalk& walk, double n, double chi);

/// Uniform time steps (t - s) / l from (s, r) to (t, y) through the rescaled
/// interior heights.
PiecewiseLinear rescale_fixed_steps(const EffectiveWalk& walk, double s, double r, double t,
                                    double y, double n, double chi);

/// The time change phi with rescale_fixed_steps = rescale_diffusive o phi:
/// phi(s + (t - s) k / l) = T_k / n^(2/3).
PiecewiseLinear time_change_map(const EffectiveWalk& walk, double s, double t, double n);

/// Height of the walk above column x (linear between vertices).
double height_at(const EffectiveWalk& walk, double x);

struct Quantiles {
    double q05 = 0, q25 = 0, q50 = 0, q75 = 0, q95 = 0;
};
Quantiles quantiles(std::vector<double> values);

struct WalkEnsembleStats {
    std::vector<long> area;
    std::vector<long> nsteps;
    std::vector<double> gap;
    std::vector<long> length;  // sum of theta_i + |zeta_i|
    std::map<double, long> midpoint_histogram;
    Quantiles area_q, nsteps_q, gap_q, length_q;
};

/// Per-sample controls; the midpoint is the centre column of each walk.
WalkEnsembleStats ensemble_stats(const std::vector<EffectiveWalk>& samples);

/// Total-variation distance between the height marginals, at the first
/// vertex with T >= x_mid, of the bridges u -> v and u2 -> v2.
double endpoint_insensitivity(DualPoint u, DualPoint u2, DualPoint v, DualPoint v2,
                              const StepLaw& law, const TiltParams& tilt, int x_mid,
                              CapPolicy policy = CapPolicy::monitor);

/// The crossing-height marginal itself (index = height).
std::vector<double> crossing_marginal(DualPoint u, DualPoint v, const StepLaw& law,
                                      const TiltParams& tilt, int x_mid,
                                      CapPolicy policy = CapPolicy::monitor);

}  // namespace prewet
