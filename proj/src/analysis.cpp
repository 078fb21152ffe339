#include "prewet/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "prewet/error.hpp"
#include "prewet/rng.hpp"

namespace prewet {

namespace {

constexpr std::size_t kMinKsSamples = 100;

// Type-7 quantile of sorted data.
double sorted_quantile(const std::vector<double>& v, double p) {
    const double h = (static_cast<double>(v.size()) - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::size_t draw_index(CounterRng& rng, std::size_t n) {
    return std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)), n - 1);
}

std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace

PiecewiseLinear rescale_interface(const InterfaceProfile& profile, double n, double chi) {
    if (!(chi > 0)) throw DomainError("chi must be > 0");
    const double ht = std::cbrt(n) * std::cbrt(n);
    const double vt = std::cbrt(n) * std::sqrt(chi);
    PiecewiseLinear f;
    for (int i = 0; i < profile.columns(); ++i) {
        f.t.push_back((profile.x_min + i) / ht);
        f.y.push_back(profile.gamma_plus[static_cast<std::size_t>(i)] / vt);
    }
    return f;
}

std::vector<double> RescaledEnsemble::values_at(double t) const {
    if (std::abs(t) > window) throw DomainError("time outside the comparison window");
    std::vector<double> out;
    out.reserve(profiles.size());
    for (const auto& p : profiles) out.push_back(p(t));
    return out;
}

RescaledEnsemble rescale_interfaces(const std::vector<InterfaceProfile>& profiles, double n,
                                    double chi, double lambda, double beta, double window) {
    RescaledEnsemble e{{}, "ising", n, lambda, beta, chi, window};
    for (const auto& p : profiles) e.profiles.push_back(rescale_interface(p, n, chi));
    return e;
}

RescaledEnsemble rescale_walks(const std::vector<EffectiveWalk>& walks, double n, double chi,
                               double lambda, double window) {
    RescaledEnsemble e{{}, "walk", n, lambda, 0.0, chi, window};
    for (const auto& w : walks) e.profiles.push_back(rescale_diffusive(w, n, chi));
    return e;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
    if (values.empty()) throw InsufficientData("KS needs at least one value");
    std::sort(values.begin(), values.end());
    const double m = static_cast<double>(values.size());
    double d = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max({d, f - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - f});
    }
    return d;
}

KsResult ks_against_fs(const std::vector<double>& values, const FSReference& fs,
                       std::uint64_t seed, int resamples) {
    if (values.size() < kMinKsSamples)
        throw InsufficientData("KS needs >= 100 samples, got " + std::to_string(values.size()));
    const auto cdf = [&fs](double r) { return fs.cdf(r); };
    KsResult out;
    out.samples = values.size();
    out.statistic = ks_statistic(values, cdf);
    out.null_band = 1.358 / std::sqrt(static_cast<double>(values.size()));
    CounterRng rng(derive_key(seed, 0x6b73));
    std::vector<double> boot, draw(values.size());
    for (int b = 0; b < resamples; ++b) {
        for (auto& d : draw) d = values[draw_index(rng, values.size())];
        boot.push_back(ks_statistic(draw, cdf));
    }
    std::sort(boot.begin(), boot.end());
    out.ci_low = sorted_quantile(boot, 0.025);
    out.ci_high = sorted_quantile(boot, 0.975);
    return out;
}

DiagnosticThresholds DiagnosticThresholds::defaults(int n, double eps) {
    DiagnosticThresholds t;
    t.box_half_width = static_cast<int>(std::floor(3.0 * std::pow(n, 1.0 - 5.0 * eps)));
    t.box_height = static_cast<int>(std::ceil(std::pow(n, eps)));
    return t;
}

DiagnosticsReport diagnostics(const std::vector<InterfaceSample>& samples, int n,
                              const DiagnosticThresholds& th) {
    if (n < 2) throw DomainError("diagnostics need n >= 2");
    DiagnosticsReport r;
    r.samples = samples.size();
    if (samples.empty()) return r;
    const double diam_max = th.kappa * std::log(n);
    const double area_scale = std::pow(n, 4.0 / 3.0);
    std::vector<double> width, area, length;
    long restricted = 0, hits = 0, big_area = 0, long_gamma = 0;
    for (const auto& s : samples) {
        const auto& p = s.profile;
        if (s.max_closed_diameter <= diam_max) ++restricted;
        if (hits_box(p, th.box_half_width, th.box_height)) ++hits;
        if (static_cast<double>(p.minus_area) > th.c_area * area_scale) ++big_area;
        if (static_cast<double>(p.gamma_length) > th.c_len * n) ++long_gamma;
        int w = 0;
        for (int i = -th.box_half_width; i <= th.box_half_width; ++i)
            w = std::max(w, p.plus_at(i) - p.minus_at(i));
        width.push_back(w);
        area.push_back(static_cast<double>(p.minus_area) / area_scale);
        length.push_back(static_cast<double>(p.gamma_length) / n);
    }
    const double m = static_cast<double>(samples.size());
    r.restricted_rate = static_cast<double>(restricted) / m;
    r.repulsion_rate = static_cast<double>(hits) / m;
    r.area_exceed_rate = static_cast<double>(big_area) / m;
    r.length_exceed_rate = static_cast<double>(long_gamma) / m;
    r.width_q = quantiles(width);
    r.area_q = quantiles(area);
    r.length_q = quantiles(length);
    return r;
}

TwoTimeResult two_time_check(const std::vector<std::pair<double, double>>& pairs, double dt,
                             const FSReference& fs, std::uint64_t seed, int bins, double r_max,
                             bool product_form) {
    if (pairs.size() < kMinKsSamples)
        throw InsufficientData("two-time check needs >= 100 pairs, got " +
                               std::to_string(pairs.size()));
    if (!(dt > 0)) throw DomainError("two-time check needs t1 < t2");
    if (bins < 2) throw DomainError("two-time check needs >= 2 bins");
    TwoTimeResult out;
    out.bins = bins;
    out.r_max = r_max > 0 ? r_max : fs.quantile(0.999);
    const double h = out.r_max / bins;
    const auto cells = static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins);

    // Predicted cell masses, last entry for everything outside the grid.
    std::vector<double> pred(cells + 1, 0.0);
    const int sub = 4;
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            double mass = 0;
            if (product_form) {
                mass = (fs.cdf((i + 1) * h) - fs.cdf(i * h)) * (fs.cdf((j + 1) * h) - fs.cdf(j * h));
            } else {
                for (int a = 0; a < sub; ++a)
                    for (int b = 0; b < sub; ++b) {
                        const double r = (i + (a + 0.5) / sub) * h;
                        const double y = (j + (b + 0.5) / sub) * h;
                        mass += fs.density(r) * fs.transition_kernel(dt, r, y, fs.params().modes(), 1.0).value;
                    }
                mass *= h * h / (sub * sub);
            }
            pred[static_cast<std::size_t>(i * bins + j)] = std::max(mass, 0.0);
        }
    double inside = 0;
    for (std::size_t c = 0; c < cells; ++c) inside += pred[c];
    pred[cells] = std::max(0.0, 1.0 - inside);

    const auto cell_of = [&](double x1, double x2) {
        if (x1 < 0 || x2 < 0 || x1 >= out.r_max || x2 >= out.r_max) return cells;
        return static_cast<std::size_t>(static_cast<int>(x1 / h) * bins + static_cast<int>(x2 / h));
    };
    const auto l1 = [&](const std::vector<double>& counts, double m) {
        double d = 0;
        for (std::size_t c = 0; c <= cells; ++c) d += std::abs(counts[c] / m - pred[c]);
        return d;
    };
    std::vector<double> counts(cells + 1, 0.0);
    for (const auto& [a, b] : pairs) counts[cell_of(a, b)] += 1;
    const double m = static_cast<double>(pairs.size());
    out.discrepancy = l1(counts, m);

    // Null distribution: multinomial draws of the same size from the prediction.
    std::vector<double> cum(pred.size());
    double acc = 0;
    for (std::size_t c = 0; c < pred.size(); ++c) cum[c] = (acc += pred[c]);
    CounterRng rng(derive_key(seed, 0x7474));
    std::vector<double> null;
    for (int rep = 0; rep < 200; ++rep) {
        std::fill(counts.begin(), counts.end(), 0.0);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const double u = rng.uniform() * acc;
            const auto it = std::upper_bound(cum.begin(), cum.end(), u);
            counts[std::min(static_cast<std::size_t>(it - cum.begin()), cells)] += 1;
        }
        null.push_back(l1(counts, m));
    }
    std::sort(null.begin(), null.end());
    out.null_q95 = sorted_quantile(null, 0.95);
    return out;
}

ScalingFit height_scaling_fit(const std::vector<double>& ns,
                              const std::vector<std::vector<double>>& heights, std::uint64_t seed,
                              int resamples) {
    if (ns.size() < 4) throw DomainError("scaling fit needs at least 4 values of n");
    if (heights.size() != ns.size()) throw DomainError("one height sample per value of n");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (heights[i].empty()) throw InsufficientData("empty height sample");
        double mean = 0;
        for (double h : heights[i]) mean += h;
        mean /= static_cast<double>(heights[i].size());
        if (!(mean > 0) || !(ns[i] > 0)) throw DomainError("scaling fit needs positive n and heights");
        lx.push_back(std::log(ns[i]));
        ly.push_back(std::log(mean));
    }
    ScalingFit fit;
    std::tie(fit.slope, fit.intercept) = ols(lx, ly);
    CounterRng rng(derive_key(seed, 0x6873));
    std::vector<double> slopes;
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const auto& hs = heights[i];
            double mean = 0;
            for (std::size_t k = 0; k < hs.size(); ++k) mean += hs[draw_index(rng, hs.size())];
            ly[i] = std::log(mean / static_cast<double>(hs.size()));
        }
        slopes.push_back(ols(lx, ly).first);
    }
    std::sort(slopes.begin(), slopes.end());
    fit.ci_low = sorted_quantile(slopes, 0.025);
    fit.ci_high = sorted_quantile(slopes, 0.975);
    return fit;
}

}  // namespace prewet
