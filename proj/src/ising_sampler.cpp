#include "prewet/ising_sampler.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "prewet/error.hpp"
#include "prewet/rng.hpp"

namespace prewet {

double heat_bath_prob(int neighbor_sum, double beta, double h) {
    return 1.0 / (1.0 + std::exp(-2.0 * (beta * neighbor_sum + h)));
}

SampleSchedule SampleSchedule::defaults_for(int n, long samples, long thinning) {
    return SampleSchedule{20L * n, thinning, samples};
}

void SampleSchedule::validate() const {
    if (burnin_sweeps < 0) throw ValidationError("burn-in must be >= 0");
    if (thinning < 1) throw ValidationError("thinning must be >= 1");
    if (samples < 1) throw ValidationError("samples must be >= 1");
}

HeatBath::HeatBath(double beta, double h) : beta_(beta), h_(h) {
    for (int s = -4; s <= 4; ++s) table_[s + 4] = heat_bath_prob(s, beta, h);
}

void HeatBath::sweep(ChainState& state) const {
    auto& cfg = state.config;
    const auto& g = cfg.geometry();
    auto& spins = cfg.raw();
    const int w = g.width();
    const int ht = g.height();
    const std::uint64_t chain_key =
        derive_key(derive_key(state.seed, state.replica), state.sweep_count);
    for (int parity = 0; parity < 2; ++parity) {
        const std::uint64_t key = derive_key(chain_key, static_cast<std::uint64_t>(parity));
        // Same-colour sites are conditionally independent given the other
        // colour, so the order inside a half-sweep does not matter.
        for (int row = 0; row < ht; ++row) {
            const int y = row;
            const int first = (parity + row) & 1;
            for (int col = first; col < w; col += 2) {
                const int x = col + g.x_min();
                const std::size_t idx = static_cast<std::size_t>(row) * w + col;
                const int left = col > 0 ? spins[idx - 1] : g.boundary_spin(x - 1, y);
                const int right = col + 1 < w ? spins[idx + 1] : g.boundary_spin(x + 1, y);
                const int down = row > 0 ? spins[idx - w] : g.boundary_spin(x, y - 1);
                const int up = row + 1 < ht ? spins[idx + w] : g.boundary_spin(x, y + 1);
                const double u = bits_to_unit(counter_bits(key, idx));
                spins[idx] = u < table_[left + right + up + down + 4] ? 1 : -1;
            }
        }
    }
    ++state.sweep_count;
}

void sweep(ChainState& state, const ModelParams& params) {
    HeatBath(params.beta, params.h()).sweep(state);
}

std::uint64_t replica_seed(std::uint64_t seed, int replica) {
    return derive_key(seed, static_cast<std::uint64_t>(replica));
}

int worker_threads() {
    if (const char* env = std::getenv("PREWET_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TaggedSample> sample_ensemble(const ModelParams& params,
                                          const SampleSchedule& schedule, int replicas,
                                          std::uint64_t seed, int threads) {
    return sample_ensemble(BoxGeometry::lambda_n(params.n), params.beta, params.h(), schedule,
                           replicas, seed, threads);
}

std::vector<TaggedSample> sample_ensemble(const BoxGeometry& geometry, double beta, double h,
                                          const SampleSchedule& schedule, int replicas,
                                          std::uint64_t seed, int threads) {
    const std::function<TaggedSample(int, long, const SpinConfig&)> keep =
        [](int r, long i, const SpinConfig& c) { return TaggedSample{r, i, c}; };
    auto nested = map_ensemble<TaggedSample>(geometry, beta, h, schedule, replicas, seed,
                                             threads, keep);
    std::vector<TaggedSample> flat;
    for (auto& bucket : nested)
        for (auto& s : bucket) flat.push_back(std::move(s));
    return flat;
}

}  // namespace prewet
