#include "prewet/core_model.hpp"

#include <cmath>
#include <string>

#include "prewet/error.hpp"

namespace prewet {

double critical_beta() { return std::asinh(1.0) / 2.0; }

double spontaneous_magnetization(double beta) {
    if (!(beta > critical_beta())) {
        throw DomainError("beta below critical: spontaneous magnetization needs beta > " +
                          std::to_string(critical_beta()));
    }
    const double s = std::sinh(2.0 * beta);
    return std::pow(1.0 - std::pow(s, -4.0), 0.125);
}

ModelParams ModelParams::make(double beta, double lambda, int n) {
    if (!(beta > critical_beta())) {
        throw DomainError("beta below critical (beta_c = " + std::to_string(critical_beta()) +
                          ")");
    }
    if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
    if (n < 2) throw ValidationError("n must be >= 2");
    return ModelParams{beta, lambda, n};
}

BoxGeometry::BoxGeometry(int x_min, int x_max, int height, Boundary bc)
    : x_min_(x_min), x_max_(x_max), height_(height), bc_(bc) {
    if (x_max < x_min || height < 1) throw ValidationError("empty box");
}

BoxGeometry BoxGeometry::lambda_n(int n, Boundary bc) {
    if (n < 1) throw ValidationError("box parameter must be >= 1");
    return BoxGeometry(-n, n, n + 1, bc);
}

int BoxGeometry::boundary_spin(int /*x*/, int y) const {
    switch (bc_) {
        case Boundary::plus:
            return 1;
        case Boundary::minus:
            return -1;
        case Boundary::plus_minus:
            return y >= 0 ? 1 : -1;
        case Boundary::minus_plus:
            return y >= 0 ? -1 : 1;
    }
    return 1;
}

SpinConfig::SpinConfig(BoxGeometry geometry, std::int8_t fill)
    : geometry_(geometry), spins_(geometry.site_count(), fill) {
    if (fill != 1 && fill != -1) throw ValidationError("spin values are +1 or -1");
}

void SpinConfig::set(int x, int y, int value) {
    if (!geometry_.contains(x, y)) throw ValidationError("site outside the box");
    if (value != 1 && value != -1) throw ValidationError("spin values are +1 or -1");
    spins_[geometry_.index(x, y)] = static_cast<std::int8_t>(value);
}

void SpinConfig::flip(int x, int y) {
    if (!geometry_.contains(x, y)) throw ValidationError("site outside the box");
    auto& s = spins_[geometry_.index(x, y)];
    s = static_cast<std::int8_t>(-s);
}

long SpinConfig::magnetization() const {
    long m = 0;
    for (auto s : spins_) m += s;
    return m;
}

double hamiltonian(const SpinConfig& config, double beta, double h) {
    const auto& g = config.geometry();
    long bond_sum = 0;  // sum of (s_i s_j - 1) over bonds touching the box
    long field_sum = 0;
    for (int y = 0; y < g.height(); ++y) {
        for (int x = g.x_min(); x <= g.x_max(); ++x) {
            const int s = config.spin(x, y);
            field_sum += s;
            // Right and up bonds are counted from this site; left and down
            // bonds only when the neighbour lies outside (otherwise the
            // neighbour counts them).
            bond_sum += s * config.spin(x + 1, y) - 1;
            bond_sum += s * config.spin(x, y + 1) - 1;
            if (!g.contains(x - 1, y)) bond_sum += s * config.spin(x - 1, y) - 1;
            if (!g.contains(x, y - 1)) bond_sum += s * config.spin(x, y - 1) - 1;
        }
    }
    return -beta * static_cast<double>(bond_sum) - h * static_cast<double>(field_sum);
}

double hamiltonian(const SpinConfig& config, const ModelParams& params) {
    return hamiltonian(config, params.beta, params.h());
}

double flip_energy_delta(const SpinConfig& config, int x, int y, double beta, double h) {
    const int s = config.spin(x, y);
    return 2.0 * s * (beta * config.neighbor_sum(x, y) + h);
}

}  // namespace prewet
