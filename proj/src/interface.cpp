#include "prewet/interface.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

#include "prewet/error.hpp"

namespace prewet {

namespace {

// Directions around a dual vertex.
enum Dir : int { kEast = 0, kNorth = 1, kWest = 2, kSouth = 3 };

constexpr std::array<DualPoint, 4> kStep{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

// At a vertex carrying all four edges the pairs are {N, E} and {S, W}.
constexpr std::array<int, 4> kPartner{kNorth, kEast, kSouth, kWest};

// Presence table for the dual edges touching the box.
class EdgeGrid {
public:
    explicit EdgeGrid(const SpinConfig& cfg) : g_(cfg.geometry()) {
        a0_ = g_.x_min() - 1;
        na_ = g_.width() + 1;  // a in [x_min - 1, x_max]
        nb_ = g_.height() + 1; // b in [-1, height - 1]
        horiz_.assign(static_cast<std::size_t>(na_ * nb_), 0);
        vert_.assign(static_cast<std::size_t>(na_ * nb_), 0);
        for (int b = -1; b <= g_.height() - 1; ++b) {
            for (int a = a0_; a <= g_.x_max(); ++a) {
                if (a <= g_.x_max() - 1 && cfg.spin(a + 1, b) != cfg.spin(a + 1, b + 1))
                    horiz_[slot(a, b)] = 1;
                if (b <= g_.height() - 2 && cfg.spin(a, b + 1) != cfg.spin(a + 1, b + 1))
                    vert_[slot(a, b)] = 1;
            }
        }
    }

    bool in_range(const DualEdge& e) const {
        const int a = e.from.x;
        const int b = e.from.y;
        if (e.horizontal) return a >= a0_ && a <= g_.x_max() - 1 && b >= -1 && b <= g_.height() - 1;
        return a >= a0_ && a <= g_.x_max() && b >= -1 && b <= g_.height() - 2;
    }

    bool present(const DualEdge& e) const {
        if (!in_range(e)) return false;
        return (e.horizontal ? horiz_ : vert_)[slot(e.from.x, e.from.y)] != 0;
    }
    bool visited(const DualEdge& e) const {
        return (e.horizontal ? hvis_ : vvis_)[slot(e.from.x, e.from.y)] != 0;
    }
    void visit(const DualEdge& e) {
        if (hvis_.empty()) {
            hvis_.assign(horiz_.size(), 0);
            vvis_.assign(vert_.size(), 0);
        }
        (e.horizontal ? hvis_ : vvis_)[slot(e.from.x, e.from.y)] = 1;
    }
    void reset_visits() {
        hvis_.assign(horiz_.size(), 0);
        vvis_.assign(vert_.size(), 0);
    }

    std::vector<DualEdge> all() const {
        std::vector<DualEdge> out;
        for (int b = -1; b <= g_.height() - 1; ++b)
            for (int a = a0_; a <= g_.x_max(); ++a) {
                if (present({{a, b}, true})) out.push_back({{a, b}, true});
                if (present({{a, b}, false})) out.push_back({{a, b}, false});
            }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::size_t slot(int a, int b) const {
        return static_cast<std::size_t>((b + 1) * na_ + (a - a0_));
    }

    BoxGeometry g_;
    int a0_ = 0;
    int na_ = 0;
    int nb_ = 0;
    std::vector<std::uint8_t> horiz_, vert_, hvis_, vvis_;
};

DualEdge edge_at(const DualPoint& v, int dir) {
    switch (dir) {
        case kEast:
            return {v, true};
        case kWest:
            return {{v.x - 1, v.y}, true};
        case kNorth:
            return {v, false};
        default:
            return {{v.x, v.y - 1}, false};
    }
}

// Walks contours over an EdgeGrid. The two boundary stubs on the line
// y = -1/2 outside the box are virtual edges at the corners.
class Tracer {
public:
    Tracer(EdgeGrid& grid, const BoxGeometry& g)
        : grid_(grid), left_(to_dual(g.left_corner())), right_(to_dual(g.right_corner())) {}

    bool has(const DualPoint& v, int dir) const {
        if (v == left_ && dir == kWest) return true;
        if (v == right_ && dir == kEast) return true;
        return grid_.present(edge_at(v, dir));
    }

    int degree(const DualPoint& v) const {
        int d = 0;
        for (int k = 0; k < 4; ++k) d += has(v, k) ? 1 : 0;
        return d;
    }

    // Outgoing direction at v for a trail that arrived through `in_dir`.
    int next_dir(const DualPoint& v, int in_dir) const {
        const int deg = degree(v);
        if (deg == 4) return kPartner[in_dir];
        if (deg != 2) throw StructuralError("odd dual vertex degree in contour tracing");
        for (int k = 0; k < 4; ++k)
            if (k != in_dir && has(v, k)) return k;
        throw StructuralError("dead end in contour tracing");
    }

    std::vector<DualPoint> open_path() {
        std::vector<DualPoint> path{left_};
        DualPoint v = left_;
        int in_dir = kWest;
        const std::size_t limit = 4 * (grid_.all().size() + 4);
        for (;;) {
            const int out = next_dir(v, in_dir);
            if (v == right_ && out == kEast) break;
            const DualEdge e = edge_at(v, out);
            if (!grid_.present(e) || grid_.visited(e))
                throw StructuralError("open contour does not reach the right corner");
            grid_.visit(e);
            v = v + kStep[out];
            in_dir = (out + 2) % 4;
            path.push_back(v);
            if (path.size() > limit) throw StructuralError("runaway contour trace");
        }
        if (!(path.back() == right_)) throw StructuralError("open contour misses the right corner");
        return path;
    }

    std::vector<DualPoint> loop_from(const DualEdge& start) {
        DualPoint v = start.from;
        int out = start.horizontal ? kEast : kNorth;
        std::vector<DualPoint> loop{v};
        for (;;) {
            const DualEdge e = edge_at(v, out);
            if (grid_.visited(e)) break;
            if (!grid_.present(e)) throw StructuralError("broken closed contour");
            grid_.visit(e);
            v = v + kStep[out];
            loop.push_back(v);
            out = next_dir(v, (out + 2) % 4);
        }
        if (!(loop.back() == loop.front())) throw StructuralError("closed contour does not close");
        return loop;
    }

private:
    static DualPoint to_dual(const Site& s) { return {s.x, s.y}; }

    EdgeGrid& grid_;
    DualPoint left_;
    DualPoint right_;
};

// Sign normalised so that the region below the open contour reads -1.
int normalised_spin(const SpinConfig& cfg, int x, int y) {
    return -cfg.geometry().boundary_spin(x, -1) * cfg.spin(x, y);
}

}  // namespace

double InterfaceProfile::plus_interp(double column) const {
    if (gamma_plus.empty()) return 0.0;
    const double pos = std::clamp(column - x_min, 0.0, static_cast<double>(columns() - 1));
    const auto lo = static_cast<int>(std::floor(pos));
    const int hi = std::min(lo + 1, columns() - 1);
    const double f = pos - lo;
    return (1.0 - f) * gamma_plus[lo] + f * gamma_plus[hi];
}

std::vector<DualEdge> contour_edges(const SpinConfig& config) {
    return EdgeGrid(config).all();
}

ContourSet trace_contours(const SpinConfig& config) {
    const auto& g = config.geometry();
    if (g.boundary() != Boundary::plus_minus && g.boundary() != Boundary::minus_plus)
        throw StructuralError("open contour needs a mixed boundary condition");
    EdgeGrid grid(config);
    grid.reset_visits();
    Tracer tracer(grid, g);
    ContourSet out{g, tracer.open_path(), {}, kSplitConvention};
    for (const auto& e : grid.all()) {
        if (!grid.visited(e)) out.closed.push_back(tracer.loop_from(e));
    }
    return out;
}

std::vector<Site> s_cluster(const SpinConfig& config) {
    const auto& g = config.geometry();
    static constexpr std::array<Site, 6> kNbr{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {-1, 1}, {1, -1}}};
    std::vector<std::uint8_t> seen(g.site_count(), 0);
    std::deque<Site> queue;
    for (std::size_t i = 0; i < g.site_count(); ++i) {
        const Site s = g.site(i);
        if (config.spin(s.x, s.y) != -1) continue;
        for (const auto& d : kNbr) {
            const int nx = s.x + d.x;
            const int ny = s.y + d.y;
            if (!g.contains(nx, ny) && g.boundary_spin(nx, ny) == -1) {
                seen[i] = 1;
                queue.push_back(s);
                break;
            }
        }
    }
    while (!queue.empty()) {
        const Site s = queue.front();
        queue.pop_front();
        for (const auto& d : kNbr) {
            const int nx = s.x + d.x;
            const int ny = s.y + d.y;
            if (!g.contains(nx, ny) || config.spin(nx, ny) != -1) continue;
            const auto j = g.index(nx, ny);
            if (seen[j]) continue;
            seen[j] = 1;
            queue.push_back({nx, ny});
        }
    }
    std::vector<Site> out;
    for (std::size_t i = 0; i < g.site_count(); ++i)
        if (seen[i]) out.push_back(g.site(i));
    return out;
}

SpinConfig omega_gamma(const ContourSet& contours) {
    const auto& g = contours.geometry;
    // Horizontal gamma edges per column; a vertical ray from below the box
    // changes side exactly when it crosses one of them.
    std::vector<std::vector<std::uint8_t>> cross(static_cast<std::size_t>(g.width()),
                                                 std::vector<std::uint8_t>(g.height() + 1, 0));
    const auto& path = contours.open_gamma;
    for (std::size_t k = 1; k < path.size(); ++k) {
        const auto& p = path[k - 1];
        const auto& q = path[k];
        if (p.y != q.y) continue;
        const int column = std::min(p.x, q.x) + 1;
        if (column < g.x_min() || column > g.x_max() || p.y < -1 || p.y > g.height() - 1) continue;
        cross[column - g.x_min()][p.y + 1] ^= 1;
    }
    SpinConfig out(g);
    for (int x = g.x_min(); x <= g.x_max(); ++x) {
        int sign = g.boundary_spin(x, -1);
        const auto& c = cross[x - g.x_min()];
        for (int y = 0; y < g.height(); ++y) {
            if (c[y]) sign = -sign;  // edge between rows y-1 and y
            out.set(x, y, sign);
        }
    }
    return out;
}

InterfaceProfile envelopes(const ContourSet& contours) {
    const auto& g = contours.geometry;
    const SpinConfig omega = omega_gamma(contours);
    InterfaceProfile p;
    p.x_min = g.x_min();
    p.gamma_plus.resize(g.width());
    p.gamma_minus.resize(g.width());
    for (int x = g.x_min(); x <= g.x_max(); ++x) {
        int top_minus = -1;  // everything below the box is minus
        int low_plus = g.height();  // everything above the box is plus
        for (int y = 0; y < g.height(); ++y) {
            const int s = normalised_spin(omega, x, y);
            if (s == -1) {
                top_minus = y;
                ++p.minus_area;
            } else if (low_plus == g.height()) {
                low_plus = y;
            }
        }
        p.gamma_plus[x - g.x_min()] = top_minus + 1;
        p.gamma_minus[x - g.x_min()] = low_plus - 1;
    }
    p.gamma_length = static_cast<long>(contours.gamma_length());
    return p;
}

int max_closed_diameter(const ContourSet& contours) {
    int best = 0;
    for (const auto& loop : contours.closed) {
        if (loop.empty()) continue;
        auto [xlo, xhi] = std::minmax_element(loop.begin(), loop.end(),
                                              [](auto& a, auto& b) { return a.x < b.x; });
        auto [ylo, yhi] = std::minmax_element(loop.begin(), loop.end(),
                                              [](auto& a, auto& b) { return a.y < b.y; });
        best = std::max({best, xhi->x - xlo->x, yhi->y - ylo->y});
    }
    return best;
}

bool check_restricted_phase(const ContourSet& contours, double kappa, int n) {
    if (n < 2) throw ValidationError("restricted phase needs n >= 2");
    return max_closed_diameter(contours) <= kappa * std::log(static_cast<double>(n));
}

bool hits_box(const InterfaceProfile& profile, int half_width, int height) {
    const int lo = -half_width;
    const int hi = half_width;
    if (half_width < 0 || lo < profile.x_min || hi >= profile.x_min + profile.columns())
        throw ValidationError("box half-width exceeds the interface columns");
    for (int i = lo; i <= hi; ++i)
        if (profile.minus_at(i) + 1 <= height) return true;
    return false;
}

}  // namespace prewet
