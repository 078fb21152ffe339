#include "prewet/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "prewet/csv.hpp"
#include "prewet/error.hpp"

namespace prewet {

namespace {

constexpr double kLeakFraction = 1e-3;
constexpr double kTopBand = 0.9;

// Fraction of a weight vector above 0.9 * cap.
void monitor_cap(const double* w, int cap, const char* where) {
    double total = 0, top = 0;
    for (int z = 0; z <= cap; ++z) {
        total += w[z];
        if (z > kTopBand * cap) top += w[z];
    }
    if (total > 0 && top / total >= kLeakFraction)
        throw CapTooSmall(std::string(where) + ": " + format_double(100.0 * top / total) +
                          "% of the weight sits in the top 10% of height cap " +
                          std::to_string(cap));
}

// p_k * exp(-c theta_k z) for every support point and height.
std::vector<double> factor_table(const StepLaw& law, double c, int cap) {
    std::vector<double> fac(law.size() * static_cast<std::size_t>(cap + 1));
    for (std::size_t k = 0; k < law.size(); ++k)
        for (int z = 0; z <= cap; ++z)
            fac[k * static_cast<std::size_t>(cap + 1) + static_cast<std::size_t>(z)] =
                law.prob()[k] * std::exp(-c * law.support()[k].theta * z);
    return fac;
}

// Rescales v to max 1 and returns log of the factor removed.
double normalise(double* v, std::size_t len) {
    double m = 0;
    for (std::size_t i = 0; i < len; ++i) m = std::max(m, v[i]);
    if (m <= 0) return 0.0;
    for (std::size_t i = 0; i < len; ++i) v[i] /= m;
    return std::log(m);
}

// Weight of walks from (start.x + dx, z) to the pinned end, organised
// backwards by column.
class BackTable {
public:
    BackTable(const StepLaw& law, const TiltParams& tilt, int span, int end_height,
              CapPolicy policy)
        : span_(span), cap_(tilt.height_cap) {
        const auto fac = factor_table(law, tilt.c_tilt, cap_);
        const auto stride = static_cast<std::size_t>(cap_ + 1);
        w_.assign(static_cast<std::size_t>(span + 1) * stride, 0.0);
        scale_.assign(static_cast<std::size_t>(span + 1), 0.0);
        w_[static_cast<std::size_t>(span) * stride + static_cast<std::size_t>(end_height)] = 1.0;
        for (int dx = span - 1; dx >= 0; --dx) {
            const double ref = scale_[dx + 1];
            double* col = &w_[static_cast<std::size_t>(dx) * stride];
            for (std::size_t k = 0; k < law.size(); ++k) {
                const auto st = law.support()[k];
                if (dx + st.theta > span) continue;
                const double rel = std::exp(scale_[dx + st.theta] - ref);
                const double* next = &w_[static_cast<std::size_t>(dx + st.theta) * stride];
                const double* f = &fac[k * stride];
                for (int z = std::max(0, -st.zeta); z <= cap_ && z + st.zeta <= cap_; ++z)
                    col[z] += f[z] * next[z + st.zeta] * rel;
            }
            scale_[dx] = ref + normalise(col, stride);
            if (policy == CapPolicy::monitor) monitor_cap(col, cap_, "backward table");
        }
    }

    double scaled(int dx, int z) const {
        return w_[static_cast<std::size_t>(dx) * static_cast<std::size_t>(cap_ + 1) +
                  static_cast<std::size_t>(z)];
    }
    double log_scale(int dx) const { return scale_[dx]; }

private:
    int span_;
    int cap_;
    std::vector<double> w_;
    std::vector<double> scale_;
};

void check_endpoints(DualPoint u, DualPoint v, int cap) {
    if (u.y < 0 || v.y < 0) throw NegativeHeight("bridge endpoints must have height >= 0");
    if (u.y > cap || v.y > cap) throw ValidationError("bridge endpoint above the height cap");
    if (!in_forward_cone(v - u)) throw ValidationError("v - u must lie in the forward cone");
}

}  // namespace

// ---------------------------------------------------------------- StepLaw

StepLaw::StepLaw(std::vector<Step> support, std::vector<double> prob)
    : support_(std::move(support)), prob_(std::move(prob)) {
    if (support_.empty() || support_.size() != prob_.size())
        throw ValidationError("step law needs matching, nonempty support and probabilities");
    double total = 0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
        const auto s = support_[k];
        if (s.theta < 1 || std::abs(s.zeta) > s.theta)
            throw ValidationError("step (" + std::to_string(s.theta) + "," +
                                  std::to_string(s.zeta) + ") outside the cone");
        if (!(prob_[k] >= 0.0)) throw ValidationError("negative step probability");
        total += prob_[k];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("step probabilities must sum to 1");
    if (std::abs(mean_zeta()) > 1e-12) throw ValidationError("step law must have E[zeta] = 0");
}

StepLaw StepLaw::default_law() {
    std::vector<Step> sup;
    std::vector<double> w;
    double total = 0;
    for (int th = 1; th <= 3; ++th)
        for (int ze = -th; ze <= th; ++ze) {
            sup.push_back({th, ze});
            w.push_back(std::exp(-th - std::abs(ze)));
            total += w.back();
        }
    for (auto& x : w) x /= total;
    return StepLaw(std::move(sup), std::move(w));
}

StepLaw StepLaw::from_walks(const std::vector<EffectiveWalk>& walks) {
    std::map<Step, double> counts;
    double total = 0;
    for (const auto& w : walks)
        for (const auto& s : w.steps()) {
            counts[s] += 0.5;
            counts[{s.theta, -s.zeta}] += 0.5;
            total += 1;
        }
    if (total == 0) throw InsufficientData("no steps to build a step law from");
    std::vector<Step> sup;
    std::vector<double> p;
    for (const auto& [s, c] : counts) {
        sup.push_back(s);
        p.push_back(c / total);
    }
    return StepLaw(std::move(sup), std::move(p));
}

StepLaw StepLaw::read_csv(const std::string& path) {
    CsvReader in(path, {"theta", "zeta", "p"});
    std::vector<Step> sup;
    std::vector<double> p;
    while (in.next()) {
        sup.push_back({static_cast<int>(in.get_long(0)), static_cast<int>(in.get_long(1))});
        p.push_back(in.get_double(2));
    }
    return StepLaw(std::move(sup), std::move(p));
}

void StepLaw::write_csv(const std::string& path) const {
    CsvWriter out(path, {"theta", "zeta", "p"});
    for (std::size_t k = 0; k < size(); ++k) {
        out << support_[k].theta << support_[k].zeta << prob_[k];
        out.end_row();
    }
    out.close();
}

double StepLaw::mean_theta() const {
    double m = 0;
    for (std::size_t k = 0; k < size(); ++k) m += prob_[k] * support_[k].theta;
    return m;
}

double StepLaw::mean_zeta() const {
    double m = 0;
    for (std::size_t k = 0; k < size(); ++k) m += prob_[k] * support_[k].zeta;
    return m;
}

double StepLaw::chi() const {
    const double mz = mean_zeta();
    double v = 0;
    for (std::size_t k = 0; k < size(); ++k)
        v += prob_[k] * (support_[k].zeta - mz) * (support_[k].zeta - mz);
    return v / mean_theta();
}

int StepLaw::theta_max() const {
    int m = 0;
    for (const auto& s : support_) m = std::max(m, s.theta);
    return m;
}

int StepLaw::zeta_max() const {
    int m = 0;
    for (const auto& s : support_) m = std::max(m, std::abs(s.zeta));
    return m;
}

// ---------------------------------------------------------------- TiltParams

TiltParams TiltParams::from_model(double lambda, double m_star, int n, int height_cap) {
    if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
    if (!(m_star > 0.0 && m_star <= 1.0)) throw ValidationError("m* must lie in (0, 1]");
    if (n < 1) throw ValidationError("n must be >= 1");
    const double guard = 4.0 * std::cbrt(static_cast<double>(n));
    if (height_cap == 0) height_cap = static_cast<int>(std::ceil(2.0 * guard));
    if (height_cap < guard)
        throw ValidationError("height cap " + std::to_string(height_cap) +
                              " is below 4 n^(1/3) = " + format_double(guard));
    TiltParams t;
    t.c_tilt = 2.0 * lambda * m_star / static_cast<double>(n);
    t.height_cap = height_cap;
    t.lambda = lambda;
    t.m_star = m_star;
    t.n = n;
    return t;
}

TiltParams TiltParams::raw(double c_tilt, int height_cap) {
    if (!(c_tilt >= 0.0)) throw ValidationError("c_tilt must be >= 0");
    if (height_cap < 0) throw ValidationError("height cap must be >= 0");
    TiltParams t;
    t.c_tilt = c_tilt;
    t.height_cap = height_cap;
    return t;
}

// ---------------------------------------------------------------- ColumnTable

ColumnTable::ColumnTable(const StepLaw& law, const TiltParams& tilt, DualPoint u, int span,
                         CapPolicy policy)
    : law_(law), tilt_(tilt), start_(u), span_(span), cap_(tilt.height_cap) {
    if (u.y < 0) throw NegativeHeight("start height must be >= 0");
    if (u.y > cap_) throw ValidationError("start height above the height cap");
    if (span < 0) throw ValidationError("span must be >= 0");
    const auto fac = factor_table(law, tilt.c_tilt, cap_);
    const auto stride = static_cast<std::size_t>(cap_ + 1);
    w_.assign(static_cast<std::size_t>(span + 1) * stride, 0.0);
    scale_.assign(static_cast<std::size_t>(span + 1), 0.0);
    w_[static_cast<std::size_t>(u.y)] = 1.0;
    for (int x = 1; x <= span; ++x) {
        const double ref = scale_[x - 1];
        double* col = &w_[static_cast<std::size_t>(x) * stride];
        for (std::size_t k = 0; k < law.size(); ++k) {
            const auto st = law.support()[k];
            if (x - st.theta < 0) continue;
            const double rel = std::exp(scale_[x - st.theta] - ref);
            const double* prev = &w_[static_cast<std::size_t>(x - st.theta) * stride];
            const double* f = &fac[k * stride];
            for (int zp = std::max(0, -st.zeta); zp <= cap_ && zp + st.zeta <= cap_; ++zp)
                col[zp + st.zeta] += prev[zp] * f[zp] * rel;
        }
        scale_[x] = ref + normalise(col, stride);
        if (policy == CapPolicy::monitor) monitor_cap(col, cap_, "column_dp");
    }
}

double ColumnTable::weight(int dx, int z) const {
    const double s = scaled(dx, z);
    return s == 0.0 ? 0.0 : s * std::exp(scale_[dx]);
}

double ColumnTable::log_weight(int dx, int z) const {
    const double s = scaled(dx, z);
    return s == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(s) + scale_[dx];
}

double ColumnTable::step_factor(std::size_t k, int z) const {
    return law_.prob()[k] * std::exp(-tilt_.c_tilt * law_.support()[k].theta * z);
}

ColumnTable column_dp(const StepLaw& law, const TiltParams& tilt, DualPoint u, int span,
                      CapPolicy policy) {
    return ColumnTable(law, tilt, u, span, policy);
}

// ---------------------------------------------------------------- area

long area(const EffectiveWalk& walk) {
    for (const auto& p : walk.points)
        if (p.y < 0) throw NegativeHeight("walk height below zero");
    long a = 0;
    for (std::size_t i = 1; i < walk.points.size(); ++i)
        a += static_cast<long>(walk.points[i].x - walk.points[i - 1].x) * walk.points[i - 1].y;
    return a;
}

// ---------------------------------------------------------------- partitions

namespace {

// Weights of n-step walks by terminal height, scaled; returns log scale.
double height_dp(int u_height, int n_steps, const StepLaw& law, const TiltParams& tilt,
                 CapPolicy policy, std::vector<double>& w) {
    const int cap = tilt.height_cap;
    if (n_steps < 0) throw ValidationError("n_steps must be >= 0");
    if (u_height < 0) throw NegativeHeight("start height must be >= 0");
    if (u_height > cap) throw ValidationError("start height above the height cap");
    const auto stride = static_cast<std::size_t>(cap + 1);
    const auto fac = factor_table(law, tilt.c_tilt, cap);
    w.assign(stride, 0.0);
    w[static_cast<std::size_t>(u_height)] = 1.0;
    std::vector<double> next(stride);
    double log_scale = 0;
    for (int i = 0; i < n_steps; ++i) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t k = 0; k < law.size(); ++k) {
            const int ze = law.support()[k].zeta;
            const double* f = &fac[k * stride];
            for (int z = std::max(0, -ze); z <= cap && z + ze <= cap; ++z)
                next[z + ze] += w[z] * f[z];
        }
        w.swap(next);
        log_scale += normalise(w.data(), stride);
        if (policy == CapPolicy::monitor) monitor_cap(w.data(), cap, "n_step_partition");
    }
    return log_scale;
}

}  // namespace

double n_step_partition(int u_height, int n_steps, const HeightFn& f, const StepLaw& law,
                        const TiltParams& tilt, CapPolicy policy) {
    std::vector<double> w;
    const double ls = height_dp(u_height, n_steps, law, tilt, policy, w);
    double s = 0;
    for (int z = 0; z <= tilt.height_cap; ++z)
        if (w[z] != 0.0) s += w[z] * f(z);
    return s * std::exp(ls);
}

double log_n_step_partition(int u_height, int n_steps, const HeightFn& f, const StepLaw& law,
                            const TiltParams& tilt, CapPolicy policy) {
    std::vector<double> w;
    const double ls = height_dp(u_height, n_steps, law, tilt, policy, w);
    double s = 0;
    for (int z = 0; z <= tilt.height_cap; ++z)
        if (w[z] != 0.0) s += w[z] * f(z);
    if (!(s > 0)) throw DomainError("log partition needs a positive weighted sum");
    return std::log(s) + ls;
}

double fdd_weights(DualPoint u, DualPoint v, int n_steps, const std::vector<int>& marks,
                   const std::vector<HeightFn>& fs, const StepLaw& law, const TiltParams& tilt,
                   CapPolicy policy) {
    const int cap = tilt.height_cap;
    check_endpoints(u, v, cap);
    if (n_steps < 0) throw ValidationError("n_steps must be >= 0");
    if (marks.size() != fs.size()) throw ValidationError("one function per marked time");
    for (std::size_t i = 0; i < marks.size(); ++i) {
        if (marks[i] < 1 || marks[i] >= n_steps || (i > 0 && marks[i] <= marks[i - 1]))
            throw ValidationError("marked times must satisfy 1 <= n_1 < ... < n_m < n");
    }
    const int span = v.x - u.x;
    const auto stride = static_cast<std::size_t>(cap + 1);
    const auto cells = static_cast<std::size_t>(span + 1) * stride;
    const auto fac = factor_table(law, tilt.c_tilt, cap);
    std::vector<double> w(cells, 0.0), next(cells);
    w[static_cast<std::size_t>(u.y)] = 1.0;
    double log_scale = 0;
    std::size_t mark = 0;
    for (int i = 1; i <= n_steps; ++i) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int dx = 0; dx <= span; ++dx) {
            const double* col = &w[static_cast<std::size_t>(dx) * stride];
            for (std::size_t k = 0; k < law.size(); ++k) {
                const auto st = law.support()[k];
                if (dx + st.theta > span) continue;
                double* out = &next[static_cast<std::size_t>(dx + st.theta) * stride];
                const double* f = &fac[k * stride];
                for (int z = std::max(0, -st.zeta); z <= cap && z + st.zeta <= cap; ++z)
                    out[z + st.zeta] += col[z] * f[z];
            }
        }
        w.swap(next);
        if (mark < marks.size() && marks[mark] == i) {
            for (int dx = 0; dx <= span; ++dx)
                for (int z = 0; z <= cap; ++z) {
                    auto& c = w[static_cast<std::size_t>(dx) * stride + static_cast<std::size_t>(z)];
                    if (c != 0.0) c *= fs[mark](z);
                }
            ++mark;
        }
        if (policy == CapPolicy::monitor) {
            double total = 0, top = 0;
            for (int dx = 0; dx <= span; ++dx)
                for (int z = 0; z <= cap; ++z) {
                    const double c = std::abs(w[static_cast<std::size_t>(dx) * stride + static_cast<std::size_t>(z)]);
                    total += c;
                    if (z > kTopBand * cap) top += c;
                }
            if (total > 0 && top / total >= kLeakFraction)
                throw CapTooSmall("height cap " + std::to_string(cap) + " reached after step " +
                                  std::to_string(i));
        }
        // The marked functions may be signed; rescale by the largest magnitude.
        double m = 0;
        for (double c : w) m = std::max(m, std::abs(c));
        if (m > 0) {
            for (double& c : w) c /= m;
            log_scale += std::log(m);
        }
    }
    return w[static_cast<std::size_t>(span) * stride + static_cast<std::size_t>(v.y)] *
           std::exp(log_scale);
}

// ---------------------------------------------------------------- bridges

namespace {

ColumnTable bridge_table(const StepLaw& law, const TiltParams& tilt, DualPoint u, DualPoint v,
                         CapPolicy policy) {
    check_endpoints(u, v, tilt.height_cap);
    return ColumnTable(law, tilt, u, v.x - u.x, policy);
}

}  // namespace

BridgeSampler::BridgeSampler(const StepLaw& law, const TiltParams& tilt, DualPoint u,
                             DualPoint v, CapPolicy policy)
    : table_(bridge_table(law, tilt, u, v, policy)),
      u_(u),
      v_(v) {
    if (table_.scaled(v.x - u.x, v.y) == 0.0)
        throw ZeroBridgeWeight("endpoint v is unreachable from u");
}

EffectiveWalk BridgeSampler::sample(CounterRng& rng) const {
    const auto& law = table_.law();
    std::vector<double> cand(law.size());
    std::vector<DualPoint> rev{v_};
    int dx = v_.x - u_.x;
    int z = v_.y;
    while (dx > 0) {
        double total = 0;
        for (std::size_t k = 0; k < law.size(); ++k) {
            const auto st = law.support()[k];
            const int px = dx - st.theta;
            const int pz = z - st.zeta;
            double c = 0;
            if (px >= 0 && pz >= 0 && pz <= table_.height_cap()) {
                const double s = table_.scaled(px, pz);
                if (s != 0.0)
                    c = s * table_.step_factor(k, pz) *
                        std::exp(table_.log_scale(px) - table_.log_scale(dx));
            }
            cand[k] = c;
            total += c;
        }
        if (!(total > 0)) throw StructuralError("bridge sampler reached a dead state");
        double r = rng.uniform() * total;
        std::size_t pick = 0;
        for (; pick + 1 < law.size(); ++pick) {
            if (r < cand[pick]) break;
            r -= cand[pick];
        }
        while (cand[pick] == 0.0) --pick;  // guard against rounding at the top end
        dx -= law.support()[pick].theta;
        z -= law.support()[pick].zeta;
        rev.push_back({u_.x + dx, z});
    }
    EffectiveWalk w;
    w.points.assign(rev.rbegin(), rev.rend());
    return w;
}

double BridgeSampler::path_probability(const EffectiveWalk& walk) const {
    if (walk.points.empty() || !(walk.points.front() == u_) || !(walk.points.back() == v_))
        return 0.0;
    const auto& law = table_.law();
    double lp = 0;
    for (std::size_t i = 1; i < walk.points.size(); ++i) {
        const auto s = walk.step(i);
        const int z0 = walk.points[i - 1].y;
        const int z1 = walk.points[i].y;
        if (z0 < 0 || z1 < 0 || z0 > table_.height_cap() || z1 > table_.height_cap()) return 0.0;
        std::size_t k = 0;
        while (k < law.size() && !(law.support()[k] == s)) ++k;
        if (k == law.size()) return 0.0;
        lp += std::log(law.prob()[k]) - table_.tilt().c_tilt * s.theta * z0;
    }
    return std::exp(lp - log_partition());
}

EffectiveWalk sample_tilted_bridge(DualPoint u, DualPoint v, const StepLaw& law,
                                   const TiltParams& tilt, CounterRng& rng) {
    return BridgeSampler(law, tilt, u, v).sample(rng);
}

// ---------------------------------------------------------------- rescaling

double PiecewiseLinear::operator()(double tau) const {
    if (t.empty()) return 0.0;
    if (tau <= t.front()) return y.front();
    if (tau >= t.back()) return y.back();
    const auto it = std::upper_bound(t.begin(), t.end(), tau);
    const auto hi = static_cast<std::size_t>(it - t.begin());
    const auto lo = hi - 1;
    const double span = t[hi] - t[lo];
    if (span <= 0) return y[hi];
    const double f = (tau - t[lo]) / span;
    return y[lo] + f * (y[hi] - y[lo]);
}

PiecewiseLinear rescale_diffusive(const EffectiveWalk& walk, double n, double chi) {
    if (!(chi > 0)) throw DomainError("chi must be > 0");
    const double ht = std::cbrt(n) * std::cbrt(n);
    const double vt = std::cbrt(n) * std::sqrt(chi);
    PiecewiseLinear f;
    for (const auto& p : walk.points) {
        f.t.push_back(p.x / ht);
        f.y.push_back(p.y / vt);
    }
    return f;
}

PiecewiseLinear rescale_fixed_steps(const EffectiveWalk& walk, double s, double r, double t,
                                    double y, double n, double chi) {
    if (!(chi > 0)) throw DomainError("chi must be > 0");
    const std::size_t l = walk.size();
    if (l < 1) throw ValidationError("walk needs at least one step");
    const double vt = std::cbrt(n) * std::sqrt(chi);
    PiecewiseLinear f;
    f.t.push_back(s);
    f.y.push_back(r);
    for (std::size_t k = 1; k < l; ++k) {
        f.t.push_back(s + (t - s) * static_cast<double>(k) / static_cast<double>(l));
        f.y.push_back(walk.points[k].y / vt);
    }
    f.t.push_back(t);
    f.y.push_back(y);
    return f;
}

PiecewiseLinear time_change_map(const EffectiveWalk& walk, double s, double t, double n) {
    const std::size_t l = walk.size();
    if (l < 1) throw ValidationError("walk needs at least one step");
    const double ht = std::cbrt(n) * std::cbrt(n);
    PiecewiseLinear f;
    for (std::size_t k = 0; k <= l; ++k) {
        f.t.push_back(k == l ? t : s + (t - s) * static_cast<double>(k) / static_cast<double>(l));
        f.y.push_back(walk.points[k].x / ht);
    }
    return f;
}

double height_at(const EffectiveWalk& walk, double x) {
    const auto& p = walk.points;
    if (p.empty()) throw ValidationError("empty walk");
    if (x <= p.front().x) return p.front().y;
    if (x >= p.back().x) return p.back().y;
    const auto it = std::upper_bound(p.begin(), p.end(), x,
                                     [](double v, const DualPoint& q) { return v < q.x; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double f = (x - a.x) / static_cast<double>(b.x - a.x);
    return a.y + f * (b.y - a.y);
}

Quantiles quantiles(std::vector<double> v) {
    Quantiles q;
    if (v.empty()) return q;
    std::sort(v.begin(), v.end());
    auto at = [&v](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    q.q05 = at(0.05);
    q.q25 = at(0.25);
    q.q50 = at(0.5);
    q.q75 = at(0.75);
    q.q95 = at(0.95);
    return q;
}

WalkEnsembleStats ensemble_stats(const std::vector<EffectiveWalk>& samples) {
    if (samples.empty()) throw InsufficientData("ensemble_stats needs at least one sample");
    WalkEnsembleStats st;
    std::vector<double> a, ns, g, len;
    for (const auto& w : samples) {
        st.area.push_back(area(w));
        st.nsteps.push_back(static_cast<long>(w.size()));
        st.gap.push_back(w.gap());
        long l = 0;
        for (const auto& s : w.steps()) l += s.theta + std::abs(s.zeta);
        st.length.push_back(l);
        const double mid = 0.5 * (w.points.front().x + w.points.back().x);
        ++st.midpoint_histogram[height_at(w, mid)];
        a.push_back(static_cast<double>(st.area.back()));
        ns.push_back(static_cast<double>(st.nsteps.back()));
        g.push_back(st.gap.back());
        len.push_back(static_cast<double>(l));
    }
    st.area_q = quantiles(a);
    st.nsteps_q = quantiles(ns);
    st.gap_q = quantiles(g);
    st.length_q = quantiles(len);
    return st;
}

// ---------------------------------------------------------------- endpoints

std::vector<double> crossing_marginal(DualPoint u, DualPoint v, const StepLaw& law,
                                      const TiltParams& tilt, int x_mid, CapPolicy policy) {
    const int cap = tilt.height_cap;
    check_endpoints(u, v, cap);
    if (!(u.x < x_mid && x_mid <= v.x))
        throw ValidationError("crossing column must satisfy u.x < x_mid <= v.x");
    const int span = v.x - u.x;
    const ColumnTable fwd(law, tilt, u, span, policy);
    if (fwd.scaled(span, v.y) == 0.0) throw ZeroBridgeWeight("endpoint v is unreachable from u");
    const BackTable back(law, tilt, span, v.y, policy);
    const int m = x_mid - u.x;
    // Every crossing term carries scale fwd(dx) + back(dx + theta); measure
    // them relative to the largest.
    double ref = -std::numeric_limits<double>::infinity();
    for (int dx = std::max(0, m - law.theta_max()); dx < m; ++dx)
        for (const auto& st : law.support())
            if (dx + st.theta >= m && dx + st.theta <= span)
                ref = std::max(ref, fwd.log_scale(dx) + back.log_scale(dx + st.theta));
    std::vector<double> mass(static_cast<std::size_t>(cap + 1), 0.0);
    for (int dx = std::max(0, m - law.theta_max()); dx < m; ++dx) {
        for (std::size_t k = 0; k < law.size(); ++k) {
            const auto st = law.support()[k];
            const int nx = dx + st.theta;
            if (nx < m || nx > span) continue;
            const double rel = std::exp(fwd.log_scale(dx) + back.log_scale(nx) - ref);
            for (int z = std::max(0, -st.zeta); z <= cap && z + st.zeta <= cap; ++z) {
                const double a = fwd.scaled(dx, z);
                if (a == 0.0) continue;
                mass[z + st.zeta] += a * fwd.step_factor(k, z) * back.scaled(nx, z + st.zeta) * rel;
            }
        }
    }
    double total = 0;
    for (double x : mass) total += x;
    if (!(total > 0)) throw ZeroBridgeWeight("no bridge crosses the requested column");
    for (double& x : mass) x /= total;
    return mass;
}

double endpoint_insensitivity(DualPoint u, DualPoint u2, DualPoint v, DualPoint v2,
                              const StepLaw& law, const TiltParams& tilt, int x_mid,
                              CapPolicy policy) {
    const auto a = crossing_marginal(u, v, law, tilt, x_mid, policy);
    const auto b = crossing_marginal(u2, v2, law, tilt, x_mid, policy);
    double tv = 0;
    for (std::size_t z = 0; z < a.size(); ++z) tv += std::abs(a[z] - b[z]);
    return 0.5 * tv;
}

}  // namespace prewet
