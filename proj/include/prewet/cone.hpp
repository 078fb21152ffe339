#pragma once

#include <optional>
#include <vector>

#include "prewet/interface.hpp"

namespace prewet {

using LatticePath = std::vector<DualPoint>;

/// Displacement (theta, zeta) of a step or a path.
struct Step {
    int theta = 0;
    int zeta = 0;
    friend bool operator==(const Step&, const Step&) = default;
    friend auto operator<=>(const Step&, const Step&) = default;
};

/// d lies in the forward cone {d.x >= |d.y|}.
inline bool in_forward_cone(const DualPoint& d) { return d.x >= (d.y < 0 ? -d.y : d.y); }
/// d lies in the backward cone {d.x <= -|d.y|}.
inline bool in_backward_cone(const DualPoint& d) { return in_forward_cone({-d.x, -d.y}); }

/// Indices of the cone points of `path`, in path order: vertices u with the
/// whole path inside u + (backward cone U forward cone). Linear time.
std::vector<std::size_t> cone_point_indices(const LatticePath& path);

/// The cone-point vertices themselves.
std::vector<DualPoint> cone_points(const LatticePath& path);

struct PathClass {
    bool forward_confined = false;
    bool backward_confined = false;
    bool diamond_confined = false;
    bool irreducible = false;
    std::optional<DualPoint> f;  // apex of the forward cone containing the path
    std::optional<DualPoint> b;  // apex of the backward cone containing the path
};

PathClass classify(const LatticePath& path);

struct Decomposition {
    LatticePath left;
    std::vector<LatticePath> irreducibles;
    LatticePath right;
    std::vector<DualPoint> cone_points;

    /// left o irreducibles o right, shared endpoints merged.
    LatticePath concatenate() const;
};

/// Splits at every cone point. Throws NoConePoints when there are none.
Decomposition decompose(const LatticePath& path);

struct EffectiveWalk {
    std::vector<DualPoint> points;  // S_0 .. S_l, as (T, Z)

    std::size_t size() const { return points.empty() ? 0 : points.size() - 1; }
    Step step(std::size_t i) const {  // X_i = S_i - S_{i-1}, 1-based
        const auto d = points[i] - points[i - 1];
        return {d.x, d.y};
    }
    std::vector<Step> steps() const;
    /// max_i ||X_i||_2
    double gap() const;
};

/// Breakpoints of the irreducible pieces. Throws StructuralError if a step
/// leaves the forward cone or has zero horizontal extent.
EffectiveWalk effective_walk(const Decomposition& dec);

/// Effective walk of an Ising interface, heights shifted so that the wall
/// y = -1/2 sits at Z = 0.
EffectiveWalk interface_walk(const ContourSet& contours);

struct ChiEstimate {
    double chi = 0.0;
    double std_error = 0.0;
    double mean_theta = 0.0;
    double mean_zeta = 0.0;
    double mean_zeta_se = 0.0;
    std::size_t steps = 0;
};

/// Var(zeta) / E(theta) over the pooled steps, with delete-one-walk
/// jackknife errors (delete-one-step when only one walk is given).
ChiEstimate estimate_chi(const std::vector<EffectiveWalk>& walks);

}  // namespace prewet
