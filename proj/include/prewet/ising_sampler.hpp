#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "prewet/core_model.hpp"

namespace prewet {

/// Heat-bath probability of setting a spin to +1 given its neighbour sum:
/// 1 / (1 + exp(-2 (beta * s + h))).
double heat_bath_prob(int neighbor_sum, double beta, double h);

struct SampleSchedule {
    long burnin_sweeps = 0;
    long thinning = 1;
    long samples = 1;

    /// Burn-in of 20 N sweeps, the interface being the slow mode.
    static SampleSchedule defaults_for(int n, long samples, long thinning);
    void validate() const;
};

/// One Markov chain. The random stream is a pure function of
/// (seed, replica, sweep, parity, site), so a chain can be replayed from its
/// seed regardless of how replicas are scheduled across threads.
struct ChainState {
    SpinConfig config;
    std::uint64_t sweep_count = 0;
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;

    ChainState(SpinConfig cfg, std::uint64_t seed_, std::uint64_t replica_)
        : config(std::move(cfg)), seed(seed_), replica(replica_) {}
};

/// Heat-bath kernel for fixed (beta, h): probabilities tabulated by
/// neighbour sum.
class HeatBath {
public:
    HeatBath(double beta, double h);

    double prob_plus(int neighbor_sum) const { return table_[neighbor_sum + 4]; }

    /// One checkerboard sweep (even sublattice, then odd); boundary frozen.
    void sweep(ChainState& state) const;

private:
    double beta_;
    double h_;
    std::array<double, 9> table_{};
};

/// Convenience wrapper building the kernel from model parameters.
void sweep(ChainState& state, const ModelParams& params);

struct TaggedSample {
    int replica = 0;
    long index = 0;
    SpinConfig config;
};

/// Seed reported for replica r of a run seeded with `seed`.
std::uint64_t replica_seed(std::uint64_t seed, int replica);

/// Worker count from PREWET_THREADS (default: hardware concurrency).
int worker_threads();

/// Runs `replicas` independent chains of the measure mu^{+-}_{N; beta, lambda/N}
/// from the all-plus start and hands every retained configuration to
/// `visit`, always in replica-major, sample-minor order. Replicas may run
/// concurrently (up to `threads`); results are buffered per replica and
/// released in order, so output is identical for any thread count.
template <class Record>
std::vector<std::vector<Record>> map_ensemble(
    const ModelParams& params, const SampleSchedule& schedule, int replicas,
    std::uint64_t seed, int threads,
    const std::function<Record(int replica, long index, const SpinConfig&)>& fn);

/// Same on an arbitrary box (used for exhaustive toy checks).
template <class Record>
std::vector<std::vector<Record>> map_ensemble(
    const BoxGeometry& geometry, double beta, double h, const SampleSchedule& schedule,
    int replicas, std::uint64_t seed, int threads,
    const std::function<Record(int replica, long index, const SpinConfig&)>& fn);

/// Materialised variant of map_ensemble.
std::vector<TaggedSample> sample_ensemble(const ModelParams& params,
                                          const SampleSchedule& schedule, int replicas,
                                          std::uint64_t seed, int threads = 1);
std::vector<TaggedSample> sample_ensemble(const BoxGeometry& geometry, double beta, double h,
                                          const SampleSchedule& schedule, int replicas,
                                          std::uint64_t seed, int threads = 1);

}  // namespace prewet

#include "prewet/detail/ising_sampler_impl.hpp"
