#include "prewet/airy.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "prewet/error.hpp"

namespace prewet {

namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAiP0 = 0.258819403792806798405183560189203963L;  // -Ai'(0)
constexpr double kSeriesLo = -8.0;
constexpr double kSeriesHi = 6.0;
constexpr int kMaxZero = 20;

// u_k of the asymptotic expansions; v_k = -(6k+1)/(6k-1) u_k.
struct Coeffs {
    double u[32];
    double v[32];
    Coeffs() {
        u[0] = v[0] = 1.0;
        for (int k = 1; k < 32; ++k) {
            u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
            v[k] = -(6.0 * k + 1) / (6.0 * k - 1) * u[k];
        }
    }
};

const Coeffs& coeffs() {
    static const Coeffs c;
    return c;
}

// sum_k sign^k c_k / zeta^k over k = first, first + stride, ..., stopped at
// the smallest term.
double asym_sum(const double* c, double zeta, int first, int stride, bool alternate) {
    double sum = 0, prev = INFINITY;
    for (int k = first, j = 0; k < 32; k += stride, ++j) {
        const double term = c[k] / std::pow(zeta, k) * ((alternate && (j & 1)) ? -1.0 : 1.0);
        if (std::abs(term) > prev) break;
        sum += term;
        prev = std::abs(term);
        if (prev < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

double bracket_root(double guess, bool derivative) {
    const auto f = [derivative](double w) {
        const auto a = airy(-w);
        return derivative ? a.derivative : a.value;
    };
    double lo = guess - 0.25, hi = guess + 0.25;
    if (lo < 0) lo = 0;
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

std::string_view to_string(AiryMethod m) {
    return m == AiryMethod::series ? "series" : "asymptotic";
}

AiryEval airy_series(double xd) {
    const long double x = xd;
    const long double x3 = x * x * x;
    // f, g and their derivatives: Ai = Ai(0) f + Ai'(0) g.
    long double tf = 1, f = 1;
    long double tg = x, g = x;
    long double tdf = x * x / 2, df = tdf;
    long double tdg = 1, dg = 1;
    for (int k = 1; k < 200; ++k) {
        tf *= x3 / ((3.0L * k - 1) * (3.0L * k));
        tg *= x3 / ((3.0L * k) * (3.0L * k + 1));
        tdf *= x3 / ((3.0L * k + 2) * (3.0L * k));
        tdg *= x3 / ((3.0L * k) * (3.0L * k - 2));
        f += tf;
        g += tg;
        df += tdf;
        dg += tdg;
        const long double small = 1e-22L;
        if (std::abs(tf) < small && std::abs(tg) < small && std::abs(tdf) < small && std::abs(tdg) < small)
            break;
    }
    return {static_cast<double>(kAi0 * f - kAiP0 * g), static_cast<double>(kAi0 * df - kAiP0 * dg),
            AiryMethod::series};
}

AiryEval airy_asymptotic(double x) {
    const auto& c = coeffs();
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    if (x > 0) {
        const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
        const double e = std::exp(-zeta);
        const double q = std::pow(x, 0.25);
        const double su = asym_sum(c.u, zeta, 0, 1, true);
        const double sv = asym_sum(c.v, zeta, 0, 1, true);
        return {e / (2 * sqrt_pi * q) * su, -q * e / (2 * sqrt_pi) * sv, AiryMethod::asymptotic};
    }
    const double z = -x;
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    const double q = std::pow(z, 0.25);
    const double ph = zeta - std::numbers::pi / 4;
    const double cs = std::cos(ph), sn = std::sin(ph);
    const double u_even = asym_sum(c.u, zeta, 0, 2, true);
    const double u_odd = asym_sum(c.u, zeta, 1, 2, true);
    const double v_even = asym_sum(c.v, zeta, 0, 2, true);
    const double v_odd = asym_sum(c.v, zeta, 1, 2, true);
    return {(cs * u_even + sn * u_odd) / (sqrt_pi * q), q / sqrt_pi * (sn * v_even - cs * v_odd),
            AiryMethod::asymptotic};
}

AiryEval airy(double x) {
    if (!(std::abs(x) <= 100.0))
        throw AccuracyRange("airy: |x| = " + std::to_string(std::abs(x)) + " exceeds 100");
    if (x >= kSeriesLo && x <= kSeriesHi) return airy_series(x);
    return airy_asymptotic(x);
}

double airy_zero(int k) {
    if (k < 1 || k > kMaxZero) throw DomainError("airy_zero: k must be in 1..20");
    const double t = 3 * std::numbers::pi * (4.0 * k - 1) / 8;
    return bracket_root(std::pow(t, 2.0 / 3.0) * (1 + 5.0 / 48 / (t * t)), false);
}

double airy_prime_zero(int k) {
    if (k < 1 || k > kMaxZero) throw DomainError("airy_prime_zero: k must be in 1..20");
    const double t = 3 * std::numbers::pi * (4.0 * k - 3) / 8;
    return bracket_root(std::pow(t, 2.0 / 3.0) * (1 - 7.0 / 48 / (t * t)), true);
}

}  // namespace prewet
