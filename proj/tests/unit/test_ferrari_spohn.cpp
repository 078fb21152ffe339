#include <algorithm>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "doctest.h"
#include "prewet/airy.hpp"
#include "prewet/error.hpp"
#include "prewet/ferrari_spohn.hpp"

using namespace prewet;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 6, 1e-12);
}

// Five-point second difference.
template <class F>
double d2(const F& f, double r, double h) {
    return (-f(r + 2 * h) + 16 * f(r + h) - 30 * f(r) + 16 * f(r - h) - f(r - 2 * h)) / (12 * h * h);
}

}  // namespace

TEST_CASE("airy closed forms at zero") {
    const double ai0 = 1.0 / (std::pow(3.0, 2.0 / 3.0) * boost::math::tgamma(2.0 / 3.0));
    const double aip0 = -1.0 / (std::pow(3.0, 1.0 / 3.0) * boost::math::tgamma(1.0 / 3.0));
    const auto a = airy(0.0);
    CHECK(std::abs(a.value - ai0) < 1e-15);
    CHECK(std::abs(a.derivative - aip0) < 1e-15);
    CHECK(std::abs(a.value - 0.3550280539) < 1e-9);
    CHECK(std::abs(a.derivative + 0.2588194038) < 1e-9);
    CHECK(a.method == AiryMethod::series);
}

TEST_CASE("airy against an independent implementation") {
    double worst = 0, worst_d = 0;
    for (double x = -100.0; x <= 100.0; x += 0.0137) {
        const auto a = airy(x);
        worst = std::max(worst, std::abs(a.value - boost::math::airy_ai(x)));
        worst_d = std::max(worst_d, std::abs(a.derivative - boost::math::airy_ai_prime(x)));
    }
    MESSAGE("max |dAi| = " << worst << ", max |dAi'| = " << worst_d);
    CHECK(worst < 1e-10);
    CHECK(worst_d < 1e-10);
    CHECK(std::abs(airy(5.0).value - 1.0834e-4) < 1e-8);
    CHECK_THROWS_AS(airy(100.5), AccuracyRange);
    CHECK_THROWS_AS(airy(-101), AccuracyRange);
    CHECK(airy(7.0).method == AiryMethod::asymptotic);
}

TEST_CASE("series and asymptotic branches agree on the overlap") {
    for (double x : {5.0, 5.5, 6.0, 7.0, -7.0, -7.5, -8.0, -9.0}) {
        const auto s = airy_series(x), a = airy_asymptotic(x);
        CHECK(std::abs(s.value - a.value) < 1e-9);
        CHECK(std::abs(s.derivative - a.derivative) < 1e-9);
    }
}

TEST_CASE("airy equation") {
    // Ai'' = x Ai through a fourth-order difference of Ai'.
    const double h = 2e-3;
    for (double x : {-9.0, -4.2, -1.0, 0.3, 2.0, 5.5, 8.0}) {
        const auto d = [](double s) { return airy(s).derivative; };
        const double second = (-d(x + 2 * h) + 8 * d(x + h) - 8 * d(x - h) + d(x - 2 * h)) / (12 * h);
        CHECK(std::abs(second - x * airy(x).value) < 1e-10);
    }
}

TEST_CASE("airy zeros") {
    CHECK(std::abs(airy_zero(1) - 2.3381074105) < 1e-8);
    CHECK(std::abs(airy_zero(2) - 4.0879494441) < 1e-8);
    CHECK(std::abs(airy_prime_zero(1) - 1.0187929716) < 1e-9);
    double prev = 0;
    for (int k = 1; k <= 20; ++k) {
        const double w = airy_zero(k), wp = airy_prime_zero(k);
        CHECK(std::abs(w + boost::math::airy_ai_zero<double>(k)) < 1e-10);
        CHECK(std::abs(airy(-w).value) < 1e-10);
        CHECK(w > prev);
        // Interlacing: a'_k < a_k < a'_{k+1} in magnitude.
        CHECK(wp < w);
        if (k < 20) CHECK(w < airy_prime_zero(k + 1));
        prev = w;
    }
    CHECK_THROWS_AS(airy_zero(21), DomainError);
    CHECK_THROWS_AS(airy_zero(0), DomainError);
}

TEST_CASE("FS parameters") {
    const auto p = FSParams::make(0.5);
    CHECK(std::abs(p.C - 1.0) < 1e-15);
    CHECK(std::abs(p.eigenvalue(0) - 0.5 * 2.3381074105) < 1e-8);
    CHECK(std::abs(p.eigenvalue(0) - 1.16905) < 1e-5);
    for (int k = 1; k < p.modes(); ++k) CHECK(p.eigenvalue(k) > p.eigenvalue(k - 1));
    CHECK_THROWS_AS(FSParams::make(0.0), DomainError);
    CHECK_THROWS_AS(FSReference(-1.0), DomainError);
}

TEST_CASE("eigenfunctions: norms, orthonormality, residuals") {
    for (double c : {0.5, 1.0, 2.0}) {
        const FSReference fs(c);
        const auto& p = fs.params();
        for (int k = 0; k < p.modes(); ++k) {
            // Integral identity: int_{-w}^inf Ai^2 = Ai'(-w)^2.
            const double d = airy(-p.omega[static_cast<std::size_t>(k)]).derivative;
            CHECK(std::abs(fs.norm(k) * fs.norm(k) - d * d / p.C) < 1e-12);
        }
        const double r_hi = (p.omega[5] + 14.0) / p.C;
        for (int j = 0; j <= 5; ++j)
            for (int k = j; k <= 5; ++k) {
                double s = 0;
                const int panels = 24;
                for (int i = 0; i < panels; ++i)
                    s += integrate([&](double r) { return fs.phi(j, r) * fs.phi(k, r); },
                                   r_hi * i / panels, r_hi * (i + 1) / panels);
                CHECK(std::abs(s - (j == k ? 1.0 : 0.0)) < 1e-6);
            }
        double worst = 0;
        const double h = 5e-3;
        for (int k = 0; k <= 5; ++k) {
            const double a = p.eigenvalue(k);
            for (double r = 2 * h; r <= 6.0; r += 0.01) {
                const double res = 0.5 * d2([&](double s) { return fs.phi(k, s); }, r, h) -
                                   c * r * fs.phi(k, r) + a * fs.phi(k, r);
                worst = std::max(worst, std::abs(res));
            }
        }
        MESSAGE("c = " << c << " max residual " << worst);
        CHECK(worst <= 1e-6);
        CHECK(std::abs(fs.phi(0, 1e-300)) < 1e-10);
    }
}

TEST_CASE("scale covariance") {
    const FSReference a(0.7), b(8 * 0.7);
    for (double r : {0.1, 0.5, 1.3, 2.0, 3.7}) {
        const double lhs = airy(b.params().C * r - b.params().omega[0]).value;
        const double rhs = airy(a.params().C * 2 * r - a.params().omega[0]).value;
        CHECK(std::abs(lhs - rhs) < 1e-13);
        // Normalised densities scale as rho_8c(r) = 2 rho_c(2r).
        CHECK(std::abs(b.density(r) - 2 * a.density(2 * r)) < 1e-10);
    }
}

TEST_CASE("stationary density") {
    const FSReference fs(1.0);
    const double total = integrate([&](double r) { return fs.density(r); }, 0.0, 8.0) +
                         integrate([&](double r) { return fs.density(r); }, 8.0, 30.0);
    CHECK(std::abs(total - 1.0) < 1e-6);
    CHECK(fs.density(0.0) == 0.0);
    for (double r : {0.3, 0.9, 1.7, 3.0}) {
        const double q = integrate([&](double s) { return fs.density(s); }, 0.0, r);
        CHECK(std::abs(fs.cdf(r) - q) < 1e-8);
        CHECK(std::abs(fs.quantile(fs.cdf(r)) - r) < 1e-8);
    }
    const double m = fs.mode();
    CHECK(std::abs(m - (2.3381074105 - 1.0187929716) / fs.params().C) < 1e-9);
    CHECK(std::abs(fs.drift(m)) < 1e-8);
    double best = 0, arg = 0;
    for (double r = 0; r < 5; r += 1e-4)
        if (fs.density(r) > best) {
            best = fs.density(r);
            arg = r;
        }
    CHECK(std::abs(arg - m) < 2e-4);
}

TEST_CASE("drift") {
    for (double c : {0.5, 1.0, 2.0}) {
        const FSReference fs(c);
        CHECK(std::abs(1e-6 * fs.drift(1e-6) - 1.0) < 1e-3);
        for (double r = fs.mode() + 0.01; r < 10; r += 0.05) CHECK(fs.drift(r) < 0);
        for (double r = 0.01; r < fs.mode() - 0.01; r += 0.05) CHECK(fs.drift(r) > 0);
        CHECK_THROWS_AS(fs.drift(0.0), DomainError);
    }
}

TEST_CASE("transition kernel") {
    const FSReference fs(1.0);
    auto kern = [&](double t, double r, double y) { return fs.transition_kernel(t, r, y, 20, 1e-3).value; };
    const double mass = integrate([&](double y) { return kern(1.0, 1.0, y); }, 0.0, 4.0) +
                        integrate([&](double y) { return kern(1.0, 1.0, y); }, 4.0, 20.0);
    CHECK(std::abs(mass - 1.0) < 1e-4);
    for (double y : {0.2, 0.8, 1.5, 2.5})
        CHECK(std::abs(fs.transition_kernel(20.0, 1.0, y).value - fs.density(y)) < 1e-6);
    const double s = 0.7, t = 0.9, r = 0.8, y = 1.4;
    // Far from the origin the spectral sum needs many more modes; the
    // weight beyond z = 7 is below 1e-12.
    const auto kz = [&](double a, double b, double z) { return fs.transition_kernel(a, b, z, 20, 1.0).value; };
    const double ck = integrate([&](double z) { return kz(s, r, z) * kz(t, z, y); }, 0.0, 3.0) +
                      integrate([&](double z) { return kz(s, r, z) * kz(t, z, y); }, 3.0, 7.0);
    CHECK(std::abs(ck - kern(s + t, r, y)) < 1e-4);
    CHECK_THROWS_AS(fs.transition_kernel(0.01, 1.0, 1.0, 3, 1e-6), ModesInsufficient);
    CHECK_THROWS_AS(fs.transition_kernel(1.0, 1.0, 1.0, 21), DomainError);
    CHECK_THROWS_AS(fs.transition_kernel(0.0, 1.0, 1.0), DomainError);
}

TEST_CASE("semigroup") {
    const FSReference fs(1.0);
    const auto f = TestFunction::bump(1.5, 0.7);
    const std::vector<double> r{0.5, 1.0, 1.5, 2.0};
    // Potential semigroup = e^{-a_0 t} phi_0(r) * (h-transform kernel applied to f / phi_0).
    const double t = 0.5;
    const auto direct = fs.semigroup(f, t, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double via_kernel =
            std::exp(-fs.params().eigenvalue(0) * t) * fs.phi(0, r[i]) *
            integrate([&](double y) { return fs.transition_kernel(t, r[i], y, 20, 1).value * f.f(y) / fs.phi(0, y); },
                      f.lo, f.hi);
        CHECK(std::abs(direct[i] - via_kernel) < 1e-6);
    }
    const auto at0 = fs.semigroup(f, 0.0, r);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(at0[i] - f.f(r[i])) < 0.05);
}

TEST_CASE("path sampler") {
    const FSReference fs(1.0);
    CounterRng a(5), b(5), c(6);
    const auto pa = fs.sample_path(1.0, 10.0, 1e-3, a);
    const auto pb = fs.sample_path(1.0, 10.0, 1e-3, b);
    const auto pc = fs.sample_path(1.0, 10.0, 1e-3, c);
    CHECK(pa.values == pb.values);
    CHECK(pa.values != pc.values);
    CHECK(pa.values.size() == 10001);
    CHECK(std::all_of(pa.values.begin(), pa.values.end(), [](double v) { return v > 0; }));
    CHECK_THROWS_AS(fs.sample_path(1.0, 1.0, 0.01, a), DomainError);
    CHECK_THROWS_AS(fs.sample_path(0.0, 1.0, 1e-4, a), DomainError);
    for (double x0 : {0.05, 4.0}) {
        CounterRng rng(1);
        const auto flow = fs.sample_path(x0, 20.0, 1e-3, rng, false);
        CHECK(std::abs(flow.values.back() - fs.mode()) < 1e-3);
    }
}

TEST_CASE("path marginals approach the stationary law") {
    // Small c gives a slow relaxation (1 / (a_1 - a_0) is about 3.3), so the
    // distance to stationarity stays above the sampling noise up to t = 10.
    const FSReference fs(0.1);
    const int paths = 4000;
    const double dt = 5e-3;
    std::vector<std::vector<double>> at(4);
    const double times[] = {1.0, 2.0, 5.0, 10.0};
    for (int i = 0; i < paths; ++i) {
        CounterRng rng(derive_key(17, static_cast<std::uint64_t>(i)));
        const auto p = fs.sample_path(9.0, 10.0, dt, rng);
        for (int j = 0; j < 4; ++j)
            at[j].push_back(p.values[static_cast<std::size_t>(std::llround(times[j] / dt))]);
    }
    double prev = 1.0;
    for (int j = 0; j < 4; ++j) {
        auto& v = at[j];
        std::sort(v.begin(), v.end());
        double ks = 0;
        const double m = static_cast<double>(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double F = fs.cdf(v[i]);
            ks = std::max({ks, std::abs(F - i / m), std::abs(F - (i + 1) / m)});
        }
        MESSAGE("t = " << times[j] << " KS = " << ks);
        CHECK(ks < prev);
        prev = ks;
    }
}

TEST_CASE("trotter-kurtz") {
    const auto law = StepLaw::default_law();
    const auto f = TestFunction::bump(1.5, 0.7);
    const auto zero = trotter_kurtz(law, 1.0, 1.0, f, 0.0, 1024);
    CHECK(zero.iterations == 0);
    for (std::size_t i = 0; i < zero.r.size(); ++i) CHECK(zero.iterate[i] == f.f(zero.r[i]));

    double prev = INFINITY;
    for (int n : {1 << 10, 1 << 12, 1 << 14}) {
        const auto res = trotter_kurtz(law, 1.0, 1.0, f, 0.5, n);
        MESSAGE("n = " << n << " iterations " << res.iterations << " gap " << res.sup_gap());
        CHECK(res.sup_gap() < prev);
        prev = res.sup_gap();
    }
    const auto heat = trotter_kurtz(law, 0.0, 1.0, f, 0.5, 1 << 14);
    MESSAGE("lambda = 0 gap " << heat.sup_gap());
    CHECK(heat.sup_gap() < 0.02);
    CHECK_THROWS_AS(trotter_kurtz(law, 1.0, 1.0, TestFunction::bump(1.5, 0.1), 0.5, 64), GridTooCoarse);
}
