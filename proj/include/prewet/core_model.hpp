#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace prewet {

/// Inverse critical temperature of the square-lattice Ising model,
/// the root of sinh(2 beta) = 1.
double critical_beta();

/// Onsager-Yang spontaneous magnetization (1 - sinh(2 beta)^-4)^(1/8).
/// Throws DomainError for beta <= critical_beta().
double spontaneous_magnetization(double beta);

/// Parameters of the Ising model in the box with field h = lambda / n.
/// The field is derived on demand and never stored.
struct ModelParams {
    double beta = 1.0;
    double lambda = 0.0;
    int n = 2;

    double h() const { return lambda / static_cast<double>(n); }

    /// Validating constructor: beta > critical, lambda >= 0, n >= 2.
    static ModelParams make(double beta, double lambda, int n);
};

enum class Boundary {
    plus,        // eta+ : +1 everywhere outside the box
    minus,       // eta- : -1 everywhere outside the box
    plus_minus,  // eta+- : +1 on the upper half-plane, -1 below
    minus_plus,  // spin-flipped eta+-, used for duality checks
};

struct Site {
    int x = 0;
    int y = 0;
    friend bool operator==(const Site&, const Site&) = default;
};

/// Rectangular box {x_min..x_max} x {0..height-1} with a frozen boundary
/// condition on the rest of the plane. The box Lambda_N of the model is
/// BoxGeometry::lambda_n(N); smaller rectangles are used for exhaustive
/// checks.
class BoxGeometry {
public:
    BoxGeometry(int x_min, int x_max, int height, Boundary bc);

    static BoxGeometry lambda_n(int n, Boundary bc = Boundary::plus_minus);

    int x_min() const { return x_min_; }
    int x_max() const { return x_max_; }
    int width() const { return x_max_ - x_min_ + 1; }
    int height() const { return height_; }
    Boundary boundary() const { return bc_; }
    std::size_t site_count() const {
        return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height_);
    }

    bool contains(int x, int y) const {
        return x >= x_min_ && x <= x_max_ && y >= 0 && y < height_;
    }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width()) +
               static_cast<std::size_t>(x - x_min_);
    }
    Site site(std::size_t idx) const {
        const auto w = static_cast<std::size_t>(width());
        return {static_cast<int>(idx % w) + x_min_, static_cast<int>(idx / w)};
    }

    /// Boundary spin at a site outside the box.
    int boundary_spin(int x, int y) const;

    /// Lower-left and lower-right dual corners, as dual-vertex indices
    /// (a, b) standing for the point (a + 1/2, b + 1/2).
    Site left_corner() const { return {x_min_ - 1, -1}; }
    Site right_corner() const { return {x_max_, -1}; }

    friend bool operator==(const BoxGeometry&, const BoxGeometry&) = default;

private:
    int x_min_;
    int x_max_;
    int height_;
    Boundary bc_;
};

/// Spins on the box, stored dense row-major. Values outside the box come
/// from the geometry's boundary condition and cannot be modified.
class SpinConfig {
public:
    explicit SpinConfig(BoxGeometry geometry, std::int8_t fill = 1);

    const BoxGeometry& geometry() const { return geometry_; }

    int spin(int x, int y) const {
        return geometry_.contains(x, y) ? spins_[geometry_.index(x, y)]
                                        : geometry_.boundary_spin(x, y);
    }
    void set(int x, int y, int value);
    void flip(int x, int y);

    /// Sum of the four nearest-neighbour spins, boundary included.
    int neighbor_sum(int x, int y) const {
        return spin(x + 1, y) + spin(x - 1, y) + spin(x, y + 1) + spin(x, y - 1);
    }

    const std::vector<std::int8_t>& raw() const { return spins_; }
    std::vector<std::int8_t>& raw() { return spins_; }

    long magnetization() const;

    friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

private:
    BoxGeometry geometry_;
    std::vector<std::int8_t> spins_;
};

/// H = -beta * sum_{bonds touching the box} (s_i s_j - 1) - h * sum_{i in box} s_i.
double hamiltonian(const SpinConfig& config, const ModelParams& params);

/// Same Hamiltonian with explicit beta and h (used for toy boxes whose size
/// does not follow the n parameter).
double hamiltonian(const SpinConfig& config, double beta, double h);

/// Energy change of flipping the spin at (x, y): 2 s (beta * sum_nb + h).
double flip_energy_delta(const SpinConfig& config, int x, int y, double beta, double h);

}  // namespace prewet
