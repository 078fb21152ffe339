#include "prewet/ferrari_spohn.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "prewet/airy.hpp"
#include "prewet/error.hpp"

namespace prewet {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

// Beyond this argument Ai and Ai' are below 1e-100.
constexpr double kAiryCut = 100.0;

double integrate(const std::function<double(double)>& g, double a, double b) {
    return Quad::integrate(g, a, b, 10, 1e-13);
}

}  // namespace

FSParams FSParams::make(double c, int zeros) {
    if (!(c > 0)) throw DomainError("FS parameters need c > 0");
    if (zeros < 1 || zeros > 20) throw DomainError("between 1 and 20 Airy zeros can be stored");
    FSParams p;
    p.c = c;
    p.C = std::cbrt(2.0 * c / (p.sigma * p.sigma));
    for (int k = 1; k <= zeros; ++k) p.omega.push_back(airy_zero(k));
    return p;
}

double FSParams::eigenvalue(int k) const {
    return c * omega.at(static_cast<std::size_t>(k)) / C;
}

TestFunction TestFunction::bump(double centre, double half_width) {
    if (!(half_width > 0)) throw DomainError("bump half-width must be positive");
    return {[centre, half_width](double r) {
                const double u = (r - centre) / half_width;
                return std::abs(u) < 1 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
            },
            centre - half_width, centre + half_width};
}

FSReference::FSReference(double c, int zeros) : p_(FSParams::make(c, zeros)) {
    for (int k = 0; k < p_.modes(); ++k) {
        const double w = p_.omega[static_cast<std::size_t>(k)];
        const auto sq = [&](double r) {
            const double a = airy(p_.C * r - w).value;
            return a * a;
        };
        // Split at the nodes so each panel is free of sign changes.
        double total = 0, left = 0;
        for (int j = k - 1; j >= 0; --j) {
            const double node = (w - p_.omega[static_cast<std::size_t>(j)]) / p_.C;
            total += integrate(sq, left, node);
            left = node;
        }
        total += integrate(sq, left, (w + 14.0) / p_.C);
        norm_.push_back(std::sqrt(total));
    }
    const double d = airy(-p_.omega[0]).derivative;
    cdf_scale_ = d * d;
}

double FSReference::phi(int k, double r) const {
    if (r <= 0) return 0.0;
    const double x = p_.C * r - p_.omega.at(static_cast<std::size_t>(k));
    if (x > kAiryCut) return 0.0;
    return airy(x).value / norm_[static_cast<std::size_t>(k)];
}

double FSReference::phi_prime(int k, double r) const {
    const double x = p_.C * std::max(r, 0.0) - p_.omega.at(static_cast<std::size_t>(k));
    if (x > kAiryCut) return 0.0;
    return p_.C * airy(x).derivative / norm_[static_cast<std::size_t>(k)];
}

double FSReference::density(double r) const {
    const double v = phi(0, r);
    return v * v;
}

double FSReference::cdf(double r) const {
    if (r <= 0) return 0.0;
    const double x = p_.C * r - p_.omega[0];
    if (x > kAiryCut) return 1.0;
    // Antiderivative of Ai^2 is x Ai^2 - Ai'^2.
    const auto a = airy(x);
    return std::clamp(1.0 + (x * a.value * a.value - a.derivative * a.derivative) / cdf_scale_, 0.0,
                      1.0);
}

double FSReference::quantile(double p) const {
    if (!(p >= 0 && p < 1)) throw DomainError("quantile needs p in [0, 1)");
    if (p == 0) return 0.0;
    const auto g = [&](double r) { return cdf(r) - p; };
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(g, 0.0, (p_.omega[0] + 20.0) / p_.C, tol, iters);
    return 0.5 * (root.first + root.second);
}

double FSReference::mode() const { return (p_.omega[0] - airy_prime_zero(1)) / p_.C; }

double FSReference::drift(double r) const {
    if (!(r > 0)) throw DomainError("drift is singular at r <= 0");
    const auto a = airy(std::min(p_.C * r - p_.omega[0], kAiryCut));
    return p_.C * a.derivative / a.value;
}

KernelValue FSReference::transition_kernel(double t, double r, double y, int modes,
                                           double tol) const {
    if (!(t > 0)) throw DomainError("kernel needs t > 0");
    if (!(r > 0 && y > 0)) throw DomainError("kernel needs r, y > 0");
    if (modes < 1 || modes > p_.modes())
        throw DomainError("kernel modes must be in 1.." + std::to_string(p_.modes()));
    const double a0 = p_.eigenvalue(0);
    const double h = phi(0, y) / phi(0, r);
    KernelValue out;
    out.modes = modes;
    for (int k = 0; k < modes; ++k) {
        const double term = std::exp(-(p_.eigenvalue(k) - a0) * t) * phi(k, r) * phi(k, y) * h;
        out.value += term;
        out.tail = std::abs(term);
    }
    if (out.tail > tol)
        throw ModesInsufficient("kernel tail " + std::to_string(out.tail) + " exceeds tolerance " +
                                std::to_string(tol) + " with " + std::to_string(modes) + " modes");
    return out;
}

std::vector<double> FSReference::semigroup(const TestFunction& f, double t,
                                           const std::vector<double>& r) const {
    if (t < 0) throw DomainError("semigroup needs t >= 0");
    std::vector<double> coef;
    const int panels = 16;
    const double lo = std::max(f.lo, 0.0);
    for (int k = 0; k < p_.modes(); ++k) {
        double s = 0;
        for (int i = 0; i < panels; ++i) {
            const double a = lo + (f.hi - lo) * i / panels, b = lo + (f.hi - lo) * (i + 1) / panels;
            s += integrate([&](double y) { return phi(k, y) * f.f(y); }, a, b);
        }
        coef.push_back(s * std::exp(-p_.eigenvalue(k) * t));
    }
    std::vector<double> out;
    out.reserve(r.size());
    for (double x : r) {
        double v = 0;
        for (int k = 0; k < p_.modes(); ++k) v += coef[static_cast<std::size_t>(k)] * phi(k, x);
        out.push_back(v);
    }
    return out;
}

FSPath FSReference::sample_path(double x0, double horizon, double dt, CounterRng& rng,
                                bool noise) const {
    if (!(x0 > 0)) throw DomainError("path must start at x0 > 0");
    if (!(horizon > 0) || !(dt > 0) || dt > 1e-3 * horizon)
        throw DomainError("sample_path needs 0 < dt <= 1e-3 * horizon");
    const auto steps = static_cast<long>(std::llround(horizon / dt));
    FSPath path;
    path.dt = dt;
    path.near_zero_rule = noise ? "bessel3 below 3*sqrt(dt)" : "none";
    path.times.reserve(static_cast<std::size_t>(steps) + 1);
    path.values.reserve(static_cast<std::size_t>(steps) + 1);
    std::normal_distribution<double> gauss;
    const double sd = std::sqrt(dt);
    const auto bessel = [&](double x) {
        const double a = x + sd * gauss(rng), b = sd * gauss(rng), c = sd * gauss(rng);
        return std::sqrt(a * a + b * b + c * c);
    };
    double x = x0;
    path.times.push_back(0.0);
    path.values.push_back(x);
    for (long i = 1; i <= steps; ++i) {
        if (!noise) {
            x += drift(x) * dt;
            if (!(x > 0)) throw StepTooCoarse("drift flow left (0, inf); reduce dt");
        } else if (x < 3 * sd) {
            x = bessel(x);
        } else {
            const double next = x + drift(x) * dt + sd * gauss(rng);
            if (next > 0) {
                x = next;
            } else {
                ++path.euler_exits;
                x = bessel(x);
            }
        }
        path.times.push_back(static_cast<double>(i) * dt);
        path.values.push_back(x);
    }
    // Rate above 1e-4 per step, allowing Poisson noise on short paths.
    const double expected = 1e-4 * static_cast<double>(steps);
    if (static_cast<double>(path.euler_exits) > expected + 3 * std::sqrt(expected) + 1)
        throw StepTooCoarse(std::to_string(path.euler_exits) + " Euler steps left (0, inf) in " +
                            std::to_string(steps) + " steps");
    return path;
}

std::vector<double> dirichlet_heat_semigroup(const TestFunction& f, double t,
                                             const std::vector<double>& r) {
    if (t < 0) throw DomainError("semigroup needs t >= 0");
    std::vector<double> out;
    out.reserve(r.size());
    const double lo = std::max(f.lo, 0.0);
    for (double x : r) {
        if (t == 0) {
            out.push_back(x > 0 ? f.f(x) : 0.0);
            continue;
        }
        const auto g = [&](double y) {
            const double n = 1.0 / std::sqrt(2 * std::numbers::pi * t);
            return n * (std::exp(-(x - y) * (x - y) / (2 * t)) - std::exp(-(x + y) * (x + y) / (2 * t))) *
                   f.f(y);
        };
        double s = 0;
        const int panels = 16;
        for (int i = 0; i < panels; ++i)
            s += integrate(g, lo + (f.hi - lo) * i / panels, lo + (f.hi - lo) * (i + 1) / panels);
        out.push_back(s);
    }
    return out;
}

double TrotterKurtzResult::sup_gap() const {
    double g = 0;
    for (std::size_t i = 0; i < iterate.size(); ++i) g = std::max(g, std::abs(iterate[i] - limit[i]));
    return g;
}

TrotterKurtzResult trotter_kurtz(const StepLaw& law, double lambda, double m_star,
                                 const TestFunction& f, double t, int n, double r_max) {
    if (n < 1) throw DomainError("trotter_kurtz needs n >= 1");
    if (t < 0 || lambda < 0 || m_star < 0) throw DomainError("t, lambda and m* must be >= 0");
    const double chi = law.chi();
    TrotterKurtzResult out;
    out.spacing = 1.0 / (std::cbrt(static_cast<double>(n)) * std::sqrt(chi));
    out.c = 2.0 * lambda * m_star * std::sqrt(chi);
    if ((f.hi - f.lo) / out.spacing < 8.0)
        throw GridTooCoarse("test function support spans " +
                            std::to_string((f.hi - f.lo) / out.spacing) + " grid cells; need 8");
    if (f.lo < 0 || f.hi > r_max) throw DomainError("test function support must lie in [0, r_max]");
    const int zmax = static_cast<int>(std::floor(r_max / out.spacing));
    const auto cells = static_cast<std::size_t>(zmax + 1);
    const double c_tilt = 2.0 * lambda * m_star / n;
    out.iterations = static_cast<long>(
        std::floor(t * std::pow(static_cast<double>(n), 2.0 / 3.0) / law.mean_theta()));

    std::vector<double> fac(law.size() * cells);
    for (std::size_t k = 0; k < law.size(); ++k)
        for (int z = 0; z <= zmax; ++z)
            fac[k * cells + static_cast<std::size_t>(z)] =
                law.prob()[k] * std::exp(-c_tilt * law.support()[k].theta * z);

    std::vector<double> g(cells), next(cells);
    for (int z = 0; z <= zmax; ++z) {
        out.r.push_back(z * out.spacing);
        g[static_cast<std::size_t>(z)] = f.f(z * out.spacing);
    }
    for (long it = 0; it < out.iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t k = 0; k < law.size(); ++k) {
            const int dz = law.support()[k].zeta;
            const double* fk = &fac[k * cells];
            for (int z = std::max(0, -dz); z <= zmax && z + dz <= zmax; ++z)
                next[static_cast<std::size_t>(z)] += fk[z] * g[static_cast<std::size_t>(z + dz)];
        }
        g.swap(next);
    }
    out.iterate = std::move(g);
    out.limit = out.c > 0 ? FSReference(out.c).semigroup(f, t, out.r)
                          : dirichlet_heat_semigroup(f, t, out.r);
    return out;
}

}  // namespace prewet
