#include "prewet/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prewet/error.hpp"

namespace prewet {

namespace {

// In the rotated coordinates s = x + y, d = x - y the forward cone is the
// quadrant {ds >= 0, dd >= 0}, so cone membership reduces to running
// minima and maxima.
struct Rotated {
    long s;
    long d;
};

Rotated rotate(const DualPoint& p) { return {static_cast<long>(p.x) + p.y, static_cast<long>(p.x) - p.y}; }

// Marks the vertices with every predecessor in the backward cone and every
// successor in the forward cone.
void mark_oriented(const std::vector<Rotated>& r, std::vector<std::uint8_t>& mark) {
    const std::size_t n = r.size();
    std::vector<long> suf_min_s(n + 1, std::numeric_limits<long>::max());
    std::vector<long> suf_min_d(n + 1, std::numeric_limits<long>::max());
    for (std::size_t k = n; k-- > 0;) {
        suf_min_s[k] = std::min(suf_min_s[k + 1], r[k].s);
        suf_min_d[k] = std::min(suf_min_d[k + 1], r[k].d);
    }
    long pre_max_s = std::numeric_limits<long>::min();
    long pre_max_d = std::numeric_limits<long>::min();
    for (std::size_t k = 0; k < n; ++k) {
        const bool back_ok = pre_max_s <= r[k].s && pre_max_d <= r[k].d;
        const bool fwd_ok = suf_min_s[k + 1] >= r[k].s && suf_min_d[k + 1] >= r[k].d;
        if (back_ok && fwd_ok) mark[k] = 1;
        pre_max_s = std::max(pre_max_s, r[k].s);
        pre_max_d = std::max(pre_max_d, r[k].d);
    }
}

}  // namespace

std::vector<std::size_t> cone_point_indices(const LatticePath& path) {
    const std::size_t n = path.size();
    std::vector<Rotated> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = rotate(path[k]);
    std::vector<std::uint8_t> mark(n, 0);
    mark_oriented(r, mark);
    // A trail through a cone point enters from one cone and leaves into the
    // opposite one; the reversed orientation covers westward paths.
    std::vector<Rotated> neg(n);
    for (std::size_t k = 0; k < n; ++k) neg[k] = {-r[k].s, -r[k].d};
    mark_oriented(neg, mark);
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < n; ++k)
        if (mark[k]) out.push_back(k);
    return out;
}

std::vector<DualPoint> cone_points(const LatticePath& path) {
    std::vector<DualPoint> out;
    for (auto k : cone_point_indices(path)) out.push_back(path[k]);
    return out;
}

PathClass classify(const LatticePath& path) {
    PathClass c;
    if (path.empty()) return c;
    // The apex of a forward cone containing the path minimises both rotated
    // coordinates at once; the backward apex maximises both.
    long min_s = std::numeric_limits<long>::max(), min_d = min_s;
    long max_s = std::numeric_limits<long>::min(), max_d = max_s;
    for (const auto& p : path) {
        const auto r = rotate(p);
        min_s = std::min(min_s, r.s);
        min_d = std::min(min_d, r.d);
        max_s = std::max(max_s, r.s);
        max_d = std::max(max_d, r.d);
    }
    for (const auto& p : path) {
        const auto r = rotate(p);
        if (r.s == min_s && r.d == min_d) c.f = p;
        if (r.s == max_s && r.d == max_d) c.b = p;
    }
    c.forward_confined = c.f.has_value();
    c.backward_confined = c.b.has_value();
    c.diamond_confined = c.forward_confined && c.backward_confined;
    if (c.diamond_confined) {
        c.irreducible = true;
        for (const auto& u : cone_points(path)) {
            if (!(u == *c.f) && !(u == *c.b)) {
                c.irreducible = false;
                break;
            }
        }
    }
    return c;
}

LatticePath Decomposition::concatenate() const {
    LatticePath out = left;
    auto append = [&out](const LatticePath& piece) {
        if (piece.empty()) return;
        const std::size_t skip = out.empty() ? 0 : 1;
        out.insert(out.end(), piece.begin() + static_cast<long>(skip), piece.end());
    };
    for (const auto& piece : irreducibles) append(piece);
    append(right);
    return out;
}

Decomposition decompose(const LatticePath& path) {
    const auto idx = cone_point_indices(path);
    if (idx.empty()) throw NoConePoints("path has no cone points");
    Decomposition dec;
    auto slice = [&path](std::size_t a, std::size_t b) {
        return LatticePath(path.begin() + static_cast<long>(a), path.begin() + static_cast<long>(b) + 1);
    };
    dec.left = slice(0, idx.front());
    for (std::size_t k = 1; k < idx.size(); ++k) dec.irreducibles.push_back(slice(idx[k - 1], idx[k]));
    dec.right = slice(idx.back(), path.size() - 1);
    for (auto k : idx) dec.cone_points.push_back(path[k]);
    return dec;
}

std::vector<Step> EffectiveWalk::steps() const {
    std::vector<Step> out;
    for (std::size_t i = 1; i < points.size(); ++i) out.push_back(step(i));
    return out;
}

double EffectiveWalk::gap() const {
    double g = 0.0;
    for (const auto& s : steps()) g = std::max(g, std::hypot(double(s.theta), double(s.zeta)));
    return g;
}

EffectiveWalk effective_walk(const Decomposition& dec) {
    EffectiveWalk w;
    w.points = dec.cone_points;
    for (std::size_t i = 1; i < w.points.size(); ++i) {
        const auto s = w.step(i);
        if (s.theta < 1 || !in_forward_cone({s.theta, s.zeta}))
            throw StructuralError("effective-walk step outside the forward cone");
    }
    return w;
}

EffectiveWalk interface_walk(const ContourSet& contours) {
    auto w = effective_walk(decompose(contours.open_gamma));
    for (auto& p : w.points) p.y += 1;
    return w;
}

ChiEstimate estimate_chi(const std::vector<EffectiveWalk>& walks) {
    struct Sums {
        double n = 0, theta = 0, zeta = 0, zeta2 = 0;
        void add(const Sums& o, double sign = 1.0) {
            n += sign * o.n;
            theta += sign * o.theta;
            zeta += sign * o.zeta;
            zeta2 += sign * o.zeta2;
        }
        double chi() const {
            const double mz = zeta / n;
            return (zeta2 / n - mz * mz) / (theta / n);
        }
        double mean_zeta() const { return zeta / n; }
    };
    std::vector<Sums> parts;
    Sums total;
    for (const auto& w : walks) {
        Sums s;
        for (const auto& st : w.steps()) {
            s.n += 1;
            s.theta += st.theta;
            s.zeta += st.zeta;
            s.zeta2 += double(st.zeta) * st.zeta;
        }
        total.add(s);
        if (s.n > 0) parts.push_back(s);
    }
    if (total.n < 2) throw InsufficientData("chi estimate needs at least two steps");
    if (parts.size() < 2) {
        // Single walk: resample its steps instead.
        parts.clear();
        for (const auto& w : walks)
            for (const auto& st : w.steps())
                parts.push_back({1.0, double(st.theta), double(st.zeta), double(st.zeta) * st.zeta});
    }
    ChiEstimate est;
    est.chi = total.chi();
    est.mean_theta = total.theta / total.n;
    est.mean_zeta = total.mean_zeta();
    est.steps = static_cast<std::size_t>(total.n);
    const double m = static_cast<double>(parts.size());
    std::vector<double> jc, jz;
    for (const auto& p : parts) {
        Sums rest = total;
        rest.add(p, -1.0);
        jc.push_back(rest.chi());
        jz.push_back(rest.mean_zeta());
    }
    auto jack_se = [m](const std::vector<double>& v) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= m;
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt((m - 1.0) / m * ss);
    };
    est.std_error = jack_se(jc);
    est.mean_zeta_se = jack_se(jz);
    return est;
}

}  // namespace prewet
