#pragma once

#include <string>
#include <vector>

#include "prewet/core_model.hpp"

namespace prewet {

/// Dual-lattice vertex (a, b), standing for the point (a + 1/2, b + 1/2).
/// Also used for effective-walk points, where it is just an integer pair.
struct DualPoint {
    int x = 0;
    int y = 0;
    friend bool operator==(const DualPoint&, const DualPoint&) = default;
    friend auto operator<=>(const DualPoint&, const DualPoint&) = default;
    DualPoint operator-(const DualPoint& o) const { return {x - o.x, y - o.y}; }
    DualPoint operator+(const DualPoint& o) const { return {x + o.x, y + o.y}; }
};

/// Undirected dual edge, identified by its lower-left endpoint and
/// orientation. A horizontal edge from (a, b) to (a+1, b) separates sites
/// (a+1, b) and (a+1, b+1); a vertical edge from (a, b) to (a, b+1)
/// separates sites (a, b+1) and (a+1, b+1).
struct DualEdge {
    DualPoint from;
    bool horizontal = true;
    friend bool operator==(const DualEdge&, const DualEdge&) = default;
    friend auto operator<=>(const DualEdge&, const DualEdge&) = default;
};

/// Tag recorded with every contour set: at a dual vertex where all four
/// edges are present the NE and SW corners are cut off, so the NW-SE
/// diagonal pair stays connected.
inline constexpr const char* kSplitConvention = "split-NE-SW";

struct ContourSet {
    BoxGeometry geometry;
    /// Vertex sequence from the left dual corner to the right one.
    std::vector<DualPoint> open_gamma;
    /// Closed loops as vertex sequences; the first vertex is repeated at the
    /// end.
    std::vector<std::vector<DualPoint>> closed;
    std::string convention = kSplitConvention;

    std::size_t gamma_length() const {
        return open_gamma.empty() ? 0 : open_gamma.size() - 1;
    }
};

struct InterfaceProfile {
    int x_min = 0;  // column of gamma_plus[0]
    std::vector<int> gamma_plus;
    std::vector<int> gamma_minus;
    long minus_area = 0;
    long gamma_length = 0;

    int columns() const { return static_cast<int>(gamma_plus.size()); }
    int plus_at(int column) const { return gamma_plus[column - x_min]; }
    int minus_at(int column) const { return gamma_minus[column - x_min]; }

    /// Linear interpolation of the upper envelope at a real column.
    double plus_interp(double column) const;
};

/// All dual edges separating disagreeing nearest-neighbour pairs with at
/// least one site in the box, sorted.
std::vector<DualEdge> contour_edges(const SpinConfig& config);

/// Peierls contours after the corner-splitting rule. Requires a mixed
/// boundary condition; throws StructuralError when no open contour joins
/// the dual corners.
ContourSet trace_contours(const SpinConfig& config);

/// Minus sites of the box that are s-connected (nearest neighbours plus the
/// NW-SE diagonal) to the minus boundary.
std::vector<Site> s_cluster(const SpinConfig& config);

/// The configuration whose only contour is the open contour of `contours`.
SpinConfig omega_gamma(const ContourSet& contours);

InterfaceProfile envelopes(const ContourSet& contours);

/// Sup-norm diameter of the largest closed contour (0 when none).
int max_closed_diameter(const ContourSet& contours);

/// True iff every closed contour has diameter <= kappa * ln(n).
bool check_restricted_phase(const ContourSet& contours, double kappa, int n);

/// True iff the interface touches the box B_{M,R}, i.e. some column with
/// |i| <= M has gamma_minus(i) + 1 <= R.
bool hits_box(const InterfaceProfile& profile, int half_width, int height);

}  // namespace prewet
