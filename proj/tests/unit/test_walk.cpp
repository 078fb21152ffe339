#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>

#include "doctest.h"
#include "prewet/error.hpp"
#include "prewet/walk.hpp"
#include "walk_oracle.hpp"

using namespace prewet;

namespace {

StepLaw pm_law() { return StepLaw({{1, 1}, {1, -1}}, {0.5, 0.5}); }

EffectiveWalk pts(std::vector<DualPoint> p) { return EffectiveWalk{std::move(p)}; }

}  // namespace

TEST_CASE("step law") {
    const auto law = StepLaw::default_law();
    CHECK(law.size() == 15);
    double total = 0;
    for (double p : law.prob()) total += p;
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(law.mean_zeta() == 0.0);
    CHECK(law.theta_max() == 3);
    CHECK(law.chi() > 0.0);
    CHECK_THROWS_AS(StepLaw({{1, 2}}, {1.0}), ValidationError);
    CHECK_THROWS_AS(StepLaw({{1, 1}}, {1.0}), ValidationError);
    CHECK_THROWS_AS(StepLaw({{1, 0}}, {0.9}), ValidationError);
    CHECK_THROWS_AS(StepLaw({{0, 0}}, {1.0}), ValidationError);

    const auto path = (std::filesystem::temp_directory_path() / "prewet_law.csv").string();
    law.write_csv(path);
    const auto back = StepLaw::read_csv(path);
    CHECK(back.support() == law.support());
    CHECK(back.prob() == law.prob());

    const auto emp = StepLaw::from_walks({pts({{0, 0}, {1, 1}, {3, 1}, {4, 0}})});
    CHECK(emp.mean_zeta() == 0.0);
    CHECK(emp.size() == 3);
}

TEST_CASE("tilt params") {
    const auto t = TiltParams::from_model(1.5, 0.9, 64);
    CHECK(t.c_tilt == 2.0 * 1.5 * 0.9 / 64.0);
    CHECK(t.height_cap == 32);
    CHECK_THROWS_AS(TiltParams::from_model(1.0, 0.9, 64, 10), ValidationError);
    CHECK(TiltParams::from_model(1.0, 0.9, 64, 16).height_cap == 16);
}

TEST_CASE("area") {
    CHECK(area(pts({{0, 0}, {1, 0}})) == 0);
    CHECK(area(pts({{0, 2}, {1, 2}, {3, 1}})) == 6);
    CHECK(area(pts({{0, 4}, {2, 4}, {3, 4}, {7, 4}})) == 4 * 7);
    CHECK_THROWS_AS(area(pts({{0, 0}, {1, -1}})), NegativeHeight);
}

TEST_CASE("column dp examples") {
    const double c = 0.07;
    const auto flat = StepLaw({{1, 0}}, {1.0});
    const auto t = column_dp(flat, TiltParams::raw(c, 10), {0, 3}, 5, CapPolicy::hard_wall);
    CHECK(oracle::close(t.weight(5, 3), std::exp(-c * 5 * 3)));
    for (int z = 0; z <= 10; ++z)
        if (z != 3) CHECK(t.weight(5, z) == 0.0);

    const auto pm = column_dp(pm_law(), TiltParams::raw(0.0, 6), {0, 1}, 3, CapPolicy::hard_wall);
    CHECK(pm.weight(3, 0) == doctest::Approx(2.0 / 8).epsilon(1e-14));
    CHECK(pm.weight(3, 2) == doctest::Approx(3.0 / 8).epsilon(1e-14));
    CHECK(pm.weight(3, 4) == doctest::Approx(1.0 / 8).epsilon(1e-14));

    // Untilted and far from the wall: plain convolution.
    const auto law = StepLaw::default_law();
    const auto high = column_dp(law, TiltParams::raw(0.0, 40), {0, 20}, 3, CapPolicy::hard_wall);
    double one_step = 0;
    for (std::size_t k = 0; k < law.size(); ++k)
        if (law.support()[k].theta == 3 && law.support()[k].zeta == 1) one_step = law.prob()[k];
    // (3,1) in one step, or via paths through columns 1 and 2.
    double expect = one_step;
    for (std::size_t a = 0; a < law.size(); ++a)
        for (std::size_t b = 0; b < law.size(); ++b) {
            const auto sa = law.support()[a], sb = law.support()[b];
            if (sa.theta + sb.theta == 3 && sa.zeta + sb.zeta == 1) expect += law.prob()[a] * law.prob()[b];
            for (std::size_t d = 0; d < law.size(); ++d) {
                const auto sd = law.support()[d];
                if (sa.theta + sb.theta + sd.theta == 3 && sa.zeta + sb.zeta + sd.zeta == 1)
                    expect += law.prob()[a] * law.prob()[b] * law.prob()[d];
            }
        }
    CHECK(oracle::close(high.weight(3, 21), expect));
}

TEST_CASE("cap monitor") {
    const auto law = StepLaw::default_law();
    CHECK_THROWS_AS(column_dp(law, TiltParams::raw(0.0, 6), {0, 0}, 60), CapTooSmall);
    CHECK_NOTHROW(column_dp(law, TiltParams::raw(0.0, 6), {0, 0}, 60, CapPolicy::hard_wall));
    CHECK_NOTHROW(column_dp(law, TiltParams::raw(0.2, 40), {0, 0}, 200));
}

TEST_CASE("DP equals enumeration") {
    std::mt19937_64 gen(1234);
    int instances = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto law = oracle::random_law(gen);
        for (double c : {0.0, 0.13, 0.6})
            for (int cap : {0, 1, 3, 8})
                for (int span = 1; span <= 7; ++span) {
                    const int z0 = static_cast<int>(gen() % static_cast<unsigned>(cap + 1));
                    const auto tilt = TiltParams::raw(c, cap);
                    const auto dp = column_dp(law, tilt, {0, z0}, span, CapPolicy::hard_wall);
                    const auto bf = oracle::column_weights(law, c, cap, {0, z0}, span);
                    for (int x = 0; x <= span; ++x)
                        for (int z = 0; z <= cap; ++z) REQUIRE(oracle::close(dp.weight(x, z), bf[x][z]));
                    ++instances;

                    const int n = span;
                    const auto f = [](int z) { return 1.0 + 0.5 * z; };
                    REQUIRE(oracle::close(n_step_partition(z0, n, f, law, tilt, CapPolicy::hard_wall),
                                          oracle::n_step(law, c, cap, z0, n, f)));
                    if (n >= 2) {
                        for (int z1 = 0; z1 <= cap; ++z1)
                            for (int x1 = n; x1 <= 3 * n; ++x1) {
                                const DualPoint u{0, z0}, v{x1, z1};
                                if (!in_forward_cone(v - u)) continue;
                                const std::vector<int> marks{1 + static_cast<int>(gen() % static_cast<unsigned>(n - 1))};
                                const std::vector<HeightFn> fs{[](int z) { return std::exp(-0.3 * z) + 0.1; }};
                                REQUIRE(oracle::close(fdd_weights(u, v, n, marks, fs, law, tilt, CapPolicy::hard_wall),
                                                      oracle::fdd(law, c, cap, u, v, n, marks, {fs[0]})));
                                REQUIRE(oracle::close(fdd_weights(u, v, n, {}, {}, law, tilt, CapPolicy::hard_wall),
                                                      oracle::fdd(law, c, cap, u, v, n, {}, {})));
                            }
                    }
                }
    }
    CHECK(instances == 40 * 3 * 4 * 7);
}

TEST_CASE("partition function examples") {
    const auto pm = pm_law();
    const auto one = [](int) { return 1.0; };
    CHECK(n_step_partition(3, 0, [](int z) { return z * 2.0; }, pm, TiltParams::raw(0.1, 8)) == 6.0);
    CHECK(n_step_partition(1, 1, one, pm, TiltParams::raw(0.0, 8), CapPolicy::hard_wall) == 1.0);

    // All marked functions equal to one reproduce the pinned partition function.
    const auto law = StepLaw::default_law();
    const auto tilt = TiltParams::raw(0.05, 30);
    const DualPoint u{0, 2}, v{12, 3};
    const double pinned = fdd_weights(u, v, 7, {}, {}, law, tilt);
    const double marked = fdd_weights(u, v, 7, {2, 5}, {one, one}, law, tilt);
    CHECK(oracle::close(pinned, marked));
    CHECK_THROWS_AS(fdd_weights(u, v, 7, {0}, {one}, law, tilt), ValidationError);
    CHECK_THROWS_AS(fdd_weights(u, v, 7, {3, 3}, {one, one}, law, tilt), ValidationError);
}

TEST_CASE("pinned partition function decreases with tilt") {
    const auto law = StepLaw::default_law();
    double prev = std::numeric_limits<double>::infinity();
    for (double c = 0.0; c <= 0.5; c += 0.05) {
        const auto t = column_dp(law, TiltParams::raw(c, 40), {0, 3}, 30, CapPolicy::hard_wall);
        const double w = t.weight(30, 3);
        CHECK(w <= prev);
        prev = w;
    }
}

TEST_CASE("bridge sampler: degenerate and exact path law") {
    CounterRng rng(99);
    const auto flat = StepLaw({{1, 0}}, {1.0});
    const auto w = sample_tilted_bridge({0, 2}, {5, 2}, flat, TiltParams::raw(0.3, 10), rng);
    CHECK(w.points == std::vector<DualPoint>{{0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}});

    const auto law = StepLaw::default_law();
    const double c = 0.15;
    const int cap = 6;
    const DualPoint u{0, 1}, v{6, 0};
    const BridgeSampler sampler(law, TiltParams::raw(c, cap), u, v, CapPolicy::hard_wall);
    const auto all = oracle::bridges(law, c, cap, u, v);
    double z = 0;
    for (const auto& p : all) z += p.weight;
    CHECK(oracle::close(std::exp(sampler.log_partition()), z));
    std::map<std::vector<DualPoint>, std::size_t> index;
    std::vector<double> expect;
    for (const auto& p : all) {
        index[p.points] = expect.size();
        expect.push_back(p.weight / z);
        CHECK(oracle::close(sampler.path_probability(EffectiveWalk{p.points}), p.weight / z, 1e-10));
    }
    const int draws = 1'000'000;
    std::vector<double> counts(expect.size(), 0.0);
    for (int i = 0; i < draws; ++i) {
        const auto s = sampler.sample(rng);
        REQUIRE(s.points.front() == u);
        REQUIRE(s.points.back() == v);
        const auto it = index.find(s.points);
        REQUIRE(it != index.end());
        counts[it->second] += 1;
    }
    // Pool cells with small expectations into one.
    double stat = 0, pooled_e = 0, pooled_o = 0;
    int cells = 0;
    for (std::size_t k = 0; k < expect.size(); ++k) {
        const double e = expect[k] * draws;
        if (e < 5) {
            pooled_e += e;
            pooled_o += counts[k];
            continue;
        }
        stat += (counts[k] - e) * (counts[k] - e) / e;
        ++cells;
    }
    if (pooled_e > 0) {
        stat += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++cells;
    }
    const boost::math::chi_squared dist(cells - 1);
    MESSAGE("bridges: " << expect.size() << " chi2 = " << stat << " df = " << cells - 1);
    CHECK(stat < boost::math::quantile(dist, 0.99));
    CHECK_THROWS_AS(BridgeSampler(StepLaw({{2, 0}}, {1.0}), TiltParams::raw(0.0, 4), {0, 0}, {5, 0}),
                    ZeroBridgeWeight);
}

TEST_CASE("tilt lowers the midpoint") {
    const auto law = StepLaw::default_law();
    const DualPoint u{-40, 0}, v{40, 0};
    auto mean_sd = [&](double c) {
        const BridgeSampler s(law, TiltParams::raw(c, 60), u, v);
        CounterRng rng(7);
        double m = 0, m2 = 0;
        const int draws = 20000;
        for (int i = 0; i < draws; ++i) {
            const double h = height_at(s.sample(rng), 0.0);
            m += h;
            m2 += h * h;
        }
        m /= draws;
        return std::pair{m, std::sqrt((m2 / draws - m * m) / draws)};
    };
    const auto [m0, s0] = mean_sd(0.0);
    const auto [m1, s1] = mean_sd(0.05);
    CHECK(m0 - m1 > 3.0 * std::hypot(s0, s1));
    auto exact_mean = [&](double c) {
        const auto mass = crossing_marginal(u, v, law, TiltParams::raw(c, 60), 0);
        double m = 0;
        for (std::size_t z = 0; z < mass.size(); ++z) m += static_cast<double>(z) * mass[z];
        return m;
    };
    CHECK(exact_mean(0.05) < exact_mean(0.0));
}

TEST_CASE("rescaling and time change") {
    const double n = 27.0, chi = 4.0;  // n^(1/3) sqrt(chi) = 6, n^(2/3) = 9
    const auto flat = pts({{0, 6}, {3, 6}, {9, 6}});
    const auto f = rescale_diffusive(flat, n, chi);
    for (double t : {0.0, 0.1, 0.5, 1.0}) CHECK(f(t) == doctest::Approx(1.0));
    const auto seg = rescale_diffusive(pts({{0, 0}, {9, 6}}), n, chi);
    CHECK(seg(0.25) == doctest::Approx(0.25));
    const auto w = pts({{0, 1}, {1, 3}, {3, 2}, {4, 0}});
    const auto g = rescale_diffusive(w, n, chi);
    for (const auto& p : w.points) CHECK(g(p.x / 9.0) == doctest::Approx(p.y / 6.0).epsilon(1e-12));
    CHECK_THROWS_AS(rescale_diffusive(w, n, 0.0), DomainError);

    const auto one = rescale_fixed_steps(pts({{0, 0}, {2, 1}}), 0.0, 0.0, 1.0, 0.5, n, chi);
    CHECK(one.t == std::vector<double>{0.0, 1.0});
    CHECK(one(0.5) == doctest::Approx(0.25));

    const double s = w.points.front().x / 9.0, t = w.points.back().x / 9.0;
    const auto j = rescale_fixed_steps(w, s, 1 / 6.0, t, 0.0, n, chi);
    const auto phi = time_change_map(w, s, t, n);
    const std::vector<double> want{0.0, 1 / 9.0, 3 / 9.0, 4 / 9.0};
    REQUIRE(phi.y.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(phi.y[k] == doctest::Approx(want[k]).epsilon(1e-12));
    double gap = 0;
    for (int k = 0; k <= 400; ++k) {
        const double tau = s + (t - s) * k / 400.0;
        gap = std::max(gap, std::abs(j(tau) - g(phi(tau))));
    }
    CHECK(gap < 1e-12);
}

TEST_CASE("ensemble stats") {
    std::vector<EffectiveWalk> flat(5, pts({{0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}}));
    const auto st = ensemble_stats(flat);
    CHECK(st.area_q.q05 == st.area_q.q95);
    CHECK(st.nsteps == std::vector<long>(5, 4));
    CHECK(st.midpoint_histogram.size() == 1);
    CHECK(st.midpoint_histogram.at(2.0) == 5);
    for (std::size_t i = 0; i < flat.size(); ++i) CHECK(st.area[i] == area(flat[i]));
    CHECK_THROWS_AS(ensemble_stats({}), InsufficientData);
}

TEST_CASE("endpoint insensitivity") {
    const auto law = StepLaw::default_law();
    const auto tilt = TiltParams::raw(0.05, 40);
    CHECK(endpoint_insensitivity({-20, 2}, {-20, 2}, {20, 2}, {20, 2}, law, tilt, 0) == 0.0);
    double prev = 1.0;
    for (int k : {1, 2, 4, 8}) {
        const int L = 8 * k;
        const double tv = endpoint_insensitivity({-L, 0}, {-L, 12}, {L, 0}, {L, 12}, law, tilt, 0);
        MESSAGE("K = " << k << " TV = " << tv);
        CHECK(tv <= prev + 1e-10);
        prev = tv;
    }

    // Tiny instance against enumeration of all bridges.
    const auto small = StepLaw({{1, 0}, {1, 1}, {1, -1}, {2, 0}}, {0.4, 0.2, 0.2, 0.2});
    const double c = 0.2;
    const int cap = 4;
    auto brute = [&](DualPoint u, DualPoint v) {
        std::vector<double> mass(cap + 1, 0.0);
        double z = 0;
        for (const auto& p : oracle::bridges(small, c, cap, u, v)) {
            for (const auto& q : p.points)
                if (q.x >= 0) {
                    mass[q.y] += p.weight;
                    break;
                }
            z += p.weight;
        }
        for (double& m : mass) m /= z;
        return mass;
    };
    const auto a = brute({-4, 0}, {4, 1}), b = brute({-3, 2}, {5, 0});
    double tv = 0;
    for (int zz = 0; zz <= cap; ++zz) tv += 0.5 * std::abs(a[zz] - b[zz]);
    const auto tiny = TiltParams::raw(c, cap);
    CHECK(oracle::close(endpoint_insensitivity({-4, 0}, {-3, 2}, {4, 1}, {5, 0}, small, tiny, 0,
                                               CapPolicy::hard_wall),
                        tv));
}
