#pragma once

#include <functional>
#include <string>
#include <vector>

#include "prewet/rng.hpp"
#include "prewet/walk.hpp"

namespace prewet {

/// Airy operator L = 1/2 d^2/dr^2 - c r on (0, inf), Dirichlet at 0.
struct FSParams {
    double c = 0;
    double sigma = 1.0;
    double C = 0;               // (2c / sigma^2)^(1/3)
    std::vector<double> omega;  // omega_1 < omega_2 < ...

    /// Throws DomainError unless c > 0. Stores `zeros` Airy zeros (<= 20).
    static FSParams make(double c, int zeros = 20);
    /// a_k = c omega_{k+1} / C, k = 0, 1, ...
    double eigenvalue(int k) const;
    int modes() const { return static_cast<int>(omega.size()); }
};

struct KernelValue {
    double value = 0;
    double tail = 0;  // magnitude of the last retained term
    int modes = 0;
};

struct FSPath {
    std::vector<double> times;
    std::vector<double> values;
    double dt = 0;
    std::string near_zero_rule;
    long euler_exits = 0;  // Euler proposals that left (0, inf) and were replaced
};

/// Smooth test function with compact support [lo, hi].
struct TestFunction {
    std::function<double(double)> f;
    double lo = 0;
    double hi = 0;

    /// exp(1 - 1 / (1 - u^2)) for u = (r - centre) / half_width, |u| < 1.
    static TestFunction bump(double centre, double half_width);
};

/// Airy eigen-system, stationary law, transition kernel and path sampler of
/// the Ferrari-Spohn diffusion. Immutable after construction.
class FSReference {
public:
    explicit FSReference(double c, int zeros = 20);

    const FSParams& params() const { return p_; }

    /// L^2-normalised eigenfunction phi_k(r) = Ai(C r - omega_{k+1}) / norm_k.
    double phi(int k, double r) const;
    double phi_prime(int k, double r) const;
    /// L^2 norm of Ai(C r - omega_{k+1}) on (0, inf) by adaptive quadrature.
    double norm(int k) const { return norm_[static_cast<std::size_t>(k)]; }

    /// phi_0^2.
    double density(double r) const;
    double cdf(double r) const;
    double quantile(double p) const;
    /// Argmax of the density: (omega_1 - |a'_1|) / C.
    double mode() const;
    /// phi_0'(r) / phi_0(r); throws DomainError for r <= 0.
    double drift(double r) const;

    /// Spectral sum of the h-transformed kernel over `modes` terms. Throws
    /// ModesInsufficient when the last retained term exceeds tol.
    KernelValue transition_kernel(double t, double r, double y, int modes = 12,
                                  double tol = 1e-3) const;

    /// e^{tL} f at the given points, sum over all stored modes.
    std::vector<double> semigroup(const TestFunction& f, double t,
                                  const std::vector<double>& r) const;

    /// Euler-Maruyama for dX = drift(X) dt + dW, with an exact Bessel(3)
    /// step while X < 3 sqrt(dt). noise = false integrates the drift flow.
    FSPath sample_path(double x0, double horizon, double dt, CounterRng& rng,
                       bool noise = true) const;

private:
    FSParams p_;
    std::vector<double> norm_;
    double cdf_scale_ = 0;  // Ai'(-omega_1)^2
};

/// Dirichlet heat semigroup e^{t/2 d^2} f on (0, inf) by images.
std::vector<double> dirichlet_heat_semigroup(const TestFunction& f, double t,
                                             const std::vector<double>& r);

struct TrotterKurtzResult {
    std::vector<double> r;        // grid z * spacing
    std::vector<double> iterate;  // T_N^iterations f on the grid
    std::vector<double> limit;    // e^{tL} f on the grid
    long iterations = 0;
    double spacing = 0;
    double c = 0;  // 2 lambda m* sqrt(chi)
    double sup_gap() const;
};

/// Iterates the one-step operator
///   (T f)(r) = E[exp(-c_tilt theta z) f(r + zeta h); r + zeta h >= 0],
/// r = z h, h = n^(-1/3) chi^(-1/2), c_tilt = 2 lambda m* / n,
/// floor(t n^(2/3) / E theta) times on [0, r_max] (killed above r_max), and
/// evaluates the limit semigroup on the same grid. Throws GridTooCoarse if
/// the support of f spans fewer than 8 grid cells.
TrotterKurtzResult trotter_kurtz(const StepLaw& law, double lambda, double m_star,
                                 const TestFunction& f, double t, int n, double r_max = 12.0);

}  // namespace prewet
