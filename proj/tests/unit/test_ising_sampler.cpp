#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "prewet/core_model.hpp"
#include "prewet/error.hpp"
#include "prewet/ising_sampler.hpp"

using namespace prewet;

TEST_CASE("heat bath probability examples") {
    CHECK(heat_bath_prob(0, 0.8, 0.0) == 0.5);
    CHECK(std::abs(heat_bath_prob(4, 1.0, 0.0) - 0.99966464986953352) < 1e-12);
    CHECK(std::abs(heat_bath_prob(-2, 0.5, 0.1) - 0.14185106490048778) < 1e-12);
}

TEST_CASE("detailed balance and monotonicity in h") {
    for (double beta : {0.5, 1.0, 2.0})
        for (double h : {-0.3, 0.0, 0.05, 0.4})
            for (int s = -4; s <= 4; s += 2) {
                const double p = heat_bath_prob(s, beta, h);
                CHECK(std::abs(p * std::exp(-2.0 * (beta * s + h)) - (1.0 - p)) < 1e-14);
                CHECK(heat_bath_prob(s, beta, h + 0.1) >= p);
            }
}

namespace {

struct Exact {
    double mean_magnetization = 0;
    double p_center_plus = 0;
};

Exact enumerate(const BoxGeometry& g, double beta, double h) {
    SpinConfig c(g);
    double z = 0, m = 0, pc = 0;
    const std::size_t k = g.site_count();
    const std::size_t center = g.index(0, 1);
    for (std::uint64_t bits = 0; bits < (1ull << k); ++bits) {
        for (std::size_t i = 0; i < k; ++i) c.raw()[i] = (bits >> i) & 1 ? -1 : 1;
        const double w = std::exp(-hamiltonian(c, beta, h));
        z += w;
        m += w * c.magnetization();
        if (c.raw()[center] == 1) pc += w;
    }
    return {m / z, pc / z};
}

// Mean and batch-means standard error.
std::pair<double, double> batch_stats(const std::vector<double>& xs, std::size_t batches) {
    const std::size_t len = xs.size() / batches;
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        for (std::size_t i = 0; i < len; ++i) means[b] += xs[b * len + i];
        means[b] /= static_cast<double>(len);
    }
    double mu = 0;
    for (double v : means) mu += v;
    mu /= static_cast<double>(batches);
    double ss = 0;
    for (double v : means) ss += (v - mu) * (v - mu);
    return {mu, std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches))};
}

}  // namespace

TEST_CASE("3x3 chain matches exact enumeration") {
    const BoxGeometry g(-1, 1, 3, Boundary::plus_minus);
    const double beta = 0.6, h = 0.0;
    const Exact exact = enumerate(g, beta, h);
    ChainState state(SpinConfig(g), 2024, 0);
    const HeatBath kernel(beta, h);
    for (int s = 0; s < 1000; ++s) kernel.sweep(state);
    const std::size_t sweeps = 1'000'000;
    std::vector<double> center(sweeps), mag(sweeps);
    const std::size_t ci = g.index(0, 1);
    for (std::size_t s = 0; s < sweeps; ++s) {
        kernel.sweep(state);
        center[s] = state.config.raw()[ci] == 1 ? 1.0 : 0.0;
        mag[s] = static_cast<double>(state.config.magnetization());
    }
    const auto [pc, pc_se] = batch_stats(center, 100);
    const auto [m, m_se] = batch_stats(mag, 100);
    CHECK(std::abs(pc - exact.p_center_plus) < 3.0 * pc_se);
    CHECK(std::abs(m - exact.mean_magnetization) < 3.0 * m_se);
    CHECK(state.sweep_count == sweeps + 1000);
}

TEST_CASE("low temperature chain stays frozen") {
    const auto params = ModelParams::make(10.0, 0.8, 8);
    ChainState state(SpinConfig(BoxGeometry::lambda_n(8)), 5, 0);
    const SpinConfig start = state.config;
    for (int s = 0; s < 100; ++s) sweep(state, params);
    CHECK(state.config == start);
}

TEST_CASE("replay and boundary") {
    const auto params = ModelParams::make(0.7, 1.0, 10);
    auto run = [&](std::uint64_t seed) {
        ChainState st(SpinConfig(BoxGeometry::lambda_n(10)), seed, 3);
        for (int s = 0; s < 1000; ++s) sweep(st, params);
        return st.config;
    };
    const auto a = run(11), b = run(11), c = run(12);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    long boundary = 0;
    const auto& g = a.geometry();
    for (int x = g.x_min() - 1; x <= g.x_max() + 1; ++x)
        boundary += a.spin(x, -1) * 3 + a.spin(x, g.height()) * 5;
    for (int y = 0; y < g.height(); ++y) boundary += a.spin(g.x_min() - 1, y) + a.spin(g.x_max() + 1, y);
    CHECK(boundary == -3L * (g.width() + 2) + 5L * (g.width() + 2) + 2L * g.height());
    CHECK(a.raw().size() == g.site_count());
}

TEST_CASE("sample ensemble ordering and determinism") {
    const auto params = ModelParams::make(0.8, 1.0, 6);
    const SampleSchedule sched{20, 3, 3};
    const auto one = sample_ensemble(params, sched, 2, 99, 1);
    REQUIRE(one.size() == 6);
    for (std::size_t k = 0; k < one.size(); ++k) {
        CHECK(one[k].replica == static_cast<int>(k / 3));
        CHECK(one[k].index == static_cast<long>(k % 3));
    }
    const auto again = sample_ensemble(params, sched, 2, 99, 2);
    for (std::size_t k = 0; k < one.size(); ++k) CHECK(one[k].config == again[k].config);
    CHECK_THROWS_AS(sample_ensemble(params, sched, 0, 99), ValidationError);
    CHECK_THROWS_AS(sample_ensemble(params, SampleSchedule{1, 0, 1}, 1, 99), ValidationError);
}

TEST_CASE("3x3 ensemble mean magnetization") {
    const BoxGeometry g(-1, 1, 3, Boundary::plus_minus);
    const Exact exact = enumerate(g, 0.6, 0.0);
    const auto samples = sample_ensemble(g, 0.6, 0.0, SampleSchedule{100, 2, 10000}, 10, 77, 2);
    REQUIRE(samples.size() == 100000);
    std::vector<double> mags;
    for (const auto& s : samples) mags.push_back(static_cast<double>(s.config.magnetization()));
    const auto [m, se] = batch_stats(mags, 100);
    CHECK(std::abs(m - exact.mean_magnetization) < 3.0 * se);
}
