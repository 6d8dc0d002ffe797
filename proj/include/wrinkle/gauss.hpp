#ifndef WRINKLE_GAUSS_HPP
#define WRINKLE_GAUSS_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wrinkle/chart.hpp"
#include "wrinkle/grassmann.hpp"
#include "wrinkle/wrinkled.hpp"

namespace wrinkle {

namespace detail {

// Raw tangent columns by central differences (one-sided at grid borders).
inline Mat difference_tangents(const SampledChart& c, std::size_t f) {
    const Grid& g = c.grid;
    auto idx = g.unflat(f);
    Mat T(c.m, c.n());
    for (int d = 0; d < c.n(); ++d) {
        int count = static_cast<int>(g.axes[d].size());
        auto lo = idx, hi = idx;
        double dp;
        if (g.is_periodic(d)) {
            lo[d] = (idx[d] + count - 1) % count;
            hi[d] = (idx[d] + 1) % count;
            dp = 2.0 * (g.axes[d][1] - g.axes[d][0]);
        } else {
            if (idx[d] > 0) lo[d] = idx[d] - 1;
            if (idx[d] < count - 1) hi[d] = idx[d] + 1;
            dp = g.axes[d][hi[d]] - g.axes[d][lo[d]];
        }
        T.col(d) = (c.values.row(g.flat(hi)) - c.values.row(g.flat(lo))).transpose() / dp;
    }
    return T;
}

// Oriented unit normal of an m x (m-1) tangent matrix via the generalized
// cross product (continuous in the raw tangents, sign from the determinant).
inline Vec oriented_normal_from_tangents(const Mat& T) {
    const int m = static_cast<int>(T.rows());
    Vec nrm(m);
    Mat minor(m - 1, m - 1);
    for (int i = 0; i < m; ++i) {
        int rr = 0;
        for (int r = 0; r < m; ++r) {
            if (r == i) continue;
            minor.row(rr++) = T.row(r);
        }
        nrm(i) = ((i % 2) == 0 ? 1.0 : -1.0) * minor.determinant();
    }
    // sign convention: det([T | nrm]) > 0
    if ((m % 2) == 0) nrm = -nrm;
    return nrm;
}

}  // namespace detail

struct GaussAnomaly {
    std::size_t node = 0;
    std::string what;
};

struct GaussReport {
    std::vector<GaussAnomaly> anomalies;
    double min_rank_ratio = 0;
    bool ok() const { return anomalies.empty(); }
};

// Gauss field of a plain immersed chart (no singular charts): planes from
// central differences, oriented normal in the hypersurface case.
inline GaussReport gauss_map(const SampledChart& chart, std::vector<GrassPoint>& out,
                             double rank_tol = 1e-8) {
    GaussReport rep;
    rep.min_rank_ratio = std::numeric_limits<double>::infinity();
    out.assign(chart.node_count(), GrassPoint{});
    const bool hyper = chart.m == chart.n() + 1;
    for (std::size_t f = 0; f < chart.node_count(); ++f) {
        if (!chart.is_active(f)) continue;
        Mat T = detail::difference_tangents(chart, f);
        double ratio = svd_rank_ratio(T);
        rep.min_rank_ratio = std::min(rep.min_rank_ratio, ratio);
        if (!(ratio >= rank_tol)) {
            rep.anomalies.push_back({f, "degenerate differential at node"});
            continue;
        }
        GrassPoint g;
        g.frame = orthonormalize(T);
        if (hyper) {
            Vec nrm = detail::oriented_normal_from_tangents(T);
            double nn = nrm.norm();
            if (nn > 0) g.oriented_normal = (chart.orientation * nrm / nn).eval();
        }
        out[f] = std::move(g);
    }
    return rep;
}

// Gauss field of a wrinkled embedding. Uses the construction's exact
// differential when available, finite differences otherwise; at singular
// nodes the stored limit plane is used. The oriented normal at a regular
// node flips with the parity of enclosing wrinkles.
inline GaussReport gauss_map(WrinkledEmbedding& we,
                             const std::function<std::optional<GrassPoint>(std::size_t)>&
                                 singular_limit = nullptr,
                             double rank_tol = 1e-8) {
    GaussReport rep;
    rep.min_rank_ratio = std::numeric_limits<double>::infinity();
    const SampledChart& chart = we.base;
    we.gauss.assign(chart.node_count(), GrassPoint{});
    if (we.singular_mask.empty()) we.singular_mask.assign(chart.node_count(), 0);
    const bool hyper = chart.m == chart.n() + 1;
    for (std::size_t f = 0; f < chart.node_count(); ++f) {
        if (!chart.is_active(f)) continue;
        if (we.singular_mask[f]) {
            if (singular_limit) {
                if (auto lim = singular_limit(f)) {
                    we.gauss[f] = *lim;
                    continue;
                }
            }
            rep.anomalies.push_back({f, "singular node without a stored limit"});
            continue;
        }
        Mat T = we.analytic_jacobian ? we.analytic_jacobian(f)
                                     : detail::difference_tangents(chart, f);
        double ratio = svd_rank_ratio(T);
        rep.min_rank_ratio = std::min(rep.min_rank_ratio, ratio);
        if (!(ratio >= rank_tol)) {
            rep.anomalies.push_back({f, "degenerate differential off the singular charts"});
            continue;
        }
        GrassPoint g;
        g.frame = orthonormalize(T);
        if (hyper) {
            Vec nrm = detail::oriented_normal_from_tangents(T);
            double nn = nrm.norm();
            if (nn > 0) {
                int parity;
                if (!we.fiber_sign.empty())
                    parity = we.fiber_sign[f];
                else
                    parity = we.enclosure_count(chart.grid.param(f)) % 2 == 0 ? 1 : -1;
                g.oriented_normal = (chart.orientation * parity * nrm / nn).eval();
            }
        }
        we.gauss[f] = std::move(g);
    }
    return rep;
}

enum class HorizontalityClass { EpsHorizontal, Graphical, EpsGraphical, QuasiGraphical, None };

inline std::string to_string(HorizontalityClass c) {
    switch (c) {
        case HorizontalityClass::EpsHorizontal: return "eps-horizontal";
        case HorizontalityClass::Graphical: return "graphical";
        case HorizontalityClass::EpsGraphical: return "eps-graphical";
        case HorizontalityClass::QuasiGraphical: return "quasi-graphical";
        case HorizontalityClass::None: return "none";
    }
    return "?";
}

// Strongest class whose open cap U_r(pole) contains the whole sampled
// oriented Gauss image (r = eps, pi/2, pi/2 + eps, pi).
inline HorizontalityClass horizontality_class(const std::vector<GrassPoint>& gauss,
                                              const std::vector<uint8_t>& active,
                                              const Vec& pole, double eps,
                                              double* max_angle_out = nullptr) {
    double worst = 0;
    bool any = false;
    for (std::size_t i = 0; i < gauss.size(); ++i) {
        if (!active.empty() && !active[i]) continue;
        if (gauss[i].frame.size() == 0) continue;
        if (!gauss[i].oriented_normal)
            throw std::invalid_argument("horizontality_class: missing orientation");
        worst = std::max(worst, angle_to_pole(gauss[i], pole));
        any = true;
    }
    if (max_angle_out) *max_angle_out = worst;
    if (!any) return HorizontalityClass::None;
    if (worst < eps) return HorizontalityClass::EpsHorizontal;
    if (worst < M_PI / 2) return HorizontalityClass::Graphical;
    if (worst < M_PI / 2 + eps) return HorizontalityClass::EpsGraphical;
    if (worst < M_PI) return HorizontalityClass::QuasiGraphical;
    return HorizontalityClass::None;
}

struct DirectedWitness {
    bool directed = true;
    std::size_t failing_node = 0;
};

// True iff every sampled Gauss value satisfies the predicate.
inline DirectedWitness a_directed_check(const WrinkledEmbedding& we,
                                        const std::function<bool(const GrassPoint&)>& predicate) {
    for (std::size_t i = 0; i < we.gauss.size(); ++i) {
        if (!we.base.is_active(i)) continue;
        if (we.gauss[i].frame.size() == 0) continue;
        if (!predicate(we.gauss[i])) return {false, i};
    }
    return {true, 0};
}

// Continuity of the Gauss field across the singular set: finite-difference
// planes at nearby regular nodes against the stored limit at each singular
// node. Returns the worst angle gap (radians).
inline double gauss_continuity_gap(const WrinkledEmbedding& we) {
    const SampledChart& c = we.base;
    const Grid& g = c.grid;
    double worst = 0;
    for (std::size_t f = 0; f < c.node_count(); ++f) {
        if (we.singular_mask.empty() || !we.singular_mask[f]) continue;
        if (we.gauss[f].frame.size() == 0) continue;
        auto idx = g.unflat(f);
        for (int d = 0; d < c.n(); ++d) {
            for (int dir : {-1, 1}) {
                for (int step = 1; step <= 2; ++step) {
                    auto j = idx;
                    j[d] += dir * step;
                    if (j[d] < 0 || j[d] >= static_cast<int>(g.axes[d].size())) continue;
                    std::size_t fj = g.flat(j);
                    if (we.singular_mask[fj] || !c.is_active(fj)) continue;
                    Mat T = detail::difference_tangents(c, fj);
                    if (svd_rank_ratio(T) < 1e-10) continue;
                    GrassPoint plane{orthonormalize(T), std::nullopt};
                    GrassPoint lim{we.gauss[f].frame, std::nullopt};
                    worst = std::max(worst, angle(plane, lim));
                    break;  // nearest regular node on this side found
                }
            }
        }
    }
    return worst;
}

}  // namespace wrinkle

#endif
