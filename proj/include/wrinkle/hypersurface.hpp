#ifndef WRINKLE_HYPERSURFACE_HPP
#define WRINKLE_HYPERSURFACE_HPP

#include <algorithm>
#include <cmath>

#include "wrinkle/goffer.hpp"

namespace wrinkle {

namespace detail {

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0;
    std::size_t k = static_cast<std::size_t>(q * (v.size() - 1));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
}

}  // namespace detail

// Multilinear interpolation of a sampled chart; exact at the grid nodes.
inline std::function<Vec(const Vec&)> make_interpolator(const SampledChart& chart) {
    SampledChart c = chart;
    return [c](const Vec& p) {
        const Grid& g = c.grid;
        const int n = c.n();
        std::vector<int> i0(n);
        std::vector<double> w(n);
        bool on_node = true;
        for (int d = 0; d < n; ++d) {
            const auto& ax = g.axes[d];
            auto it = std::upper_bound(ax.begin(), ax.end(), p(d));
            int hi = std::clamp<int>(static_cast<int>(it - ax.begin()), 1,
                                     static_cast<int>(ax.size()) - 1);
            i0[d] = hi - 1;
            w[d] = (p(d) - ax[i0[d]]) / (ax[hi] - ax[i0[d]]);
            w[d] = std::clamp(w[d], 0.0, 1.0);
            if (w[d] != 0.0) on_node = false;
        }
        if (on_node) return c.value(g.flat(i0));
        Vec acc = Vec::Zero(c.m);
        for (int corner = 0; corner < (1 << n); ++corner) {
            double cw = 1.0;
            auto idx = i0;
            for (int d = 0; d < n; ++d) {
                if (corner & (1 << d)) {
                    idx[d] += 1;
                    cw *= w[d];
                } else {
                    cw *= 1.0 - w[d];
                }
            }
            if (cw != 0.0) acc += cw * c.value(g.flat(idx));
        }
        return acc;
    };
}

// One construction pass at fixed parameters: output chart, wrinkle manifest,
// masks, exact differentials.
inline GofferedOutput goffer_frame(Gofferer& eng) {
    GofferedOutput out;
    const SampledChart& base = eng.base;
    const Grid& grid = base.grid;
    const int n = base.n();
    const int m = base.m;
    const double M = eng.params.bands();

    out.we.base = base;
    out.we.base.values.setZero(base.node_count(), m);
    out.core_mask.assign(base.node_count(), 0);
    out.we.singular_mask.assign(base.node_count(), 0);

    std::vector<Vec> tangent_x(base.node_count());
    const double dx_param = grid.axes[n - 1][1] - grid.axes[n - 1][0];

    for (std::size_t f = 0; f < base.node_count(); ++f) {
        if (!base.is_active(f)) {
            out.we.base.values.row(f) = base.values.row(f);
            continue;
        }
        Vec p = grid.param(f);
        auto ev = eng.eval_node(p, dx_param);
        out.we.base.values.row(f) = ev.out.transpose();
        tangent_x[f] = ev.tangent_x;
        if (ev.in_core) out.core_mask[f] = 1;
        if (ev.fold_adjacent) out.we.singular_mask[f] = 1;
        // the flow is horizontal: output levels match the reparameterized base
        double drift = std::abs((ev.out - eng.base_at(ev.gp)).dot(eng.pole_at(p)));
        out.measures.max_level_drift = std::max(out.measures.max_level_drift, drift);
    }

    // fiber orientation by continuation along each gradient line: the sign
    // flips where the x-tangent reverses (fold crossings)
    out.we.fiber_sign.assign(base.node_count(), 1);
    {
        std::vector<int> shape = grid.shape();
        int nx = shape[n - 1];
        std::size_t lines = base.node_count() / nx;
        for (std::size_t line = 0; line < lines; ++line) {
            int s = 1;
            Vec prev;
            for (int i = 0; i < nx; ++i) {
                std::size_t f = line * nx + i;
                if (!base.is_active(f) || tangent_x[f].size() == 0) {
                    prev = Vec();
                    s = 1;
                    continue;
                }
                if (prev.size() && prev.dot(tangent_x[f]) < 0) s = -s;
                if (tangent_x[f].norm() > 0) prev = tangent_x[f];
                out.we.fiber_sign[f] = static_cast<int8_t>(s);
            }
        }
    }

    // per-node differentials: finite differences on the level axes (the
    // output is smooth there), exact x-column through the reparameterization
    std::vector<Mat> jac(base.node_count());
    const SampledChart& oc = out.we.base;
    for (std::size_t f = 0; f < base.node_count(); ++f) {
        if (!base.is_active(f)) continue;
        Mat J(m, n);
        auto idx = grid.unflat(f);
        for (int d = 0; d + 1 < n; ++d) {
            int count = static_cast<int>(grid.axes[d].size());
            auto lo = idx, hi = idx;
            double dp;
            if (grid.is_periodic(d)) {
                lo[d] = (idx[d] + count - 1) % count;
                hi[d] = (idx[d] + 1) % count;
                dp = 2.0 * (grid.axes[d][1] - grid.axes[d][0]);
            } else {
                if (idx[d] > 0) lo[d] = idx[d] - 1;
                if (idx[d] < count - 1) hi[d] = idx[d] + 1;
                dp = grid.axes[d][hi[d]] - grid.axes[d][lo[d]];
            }
            J.col(d) =
                (oc.values.row(grid.flat(hi)) - oc.values.row(grid.flat(lo))).transpose() / dp;
        }
        const CylinderChart* ref = nullptr;
        for (const auto& cyl : eng.cover.cylinders)
            if (cyl.contains(grid.param(f))) ref = &cyl;
        double xhw = ref ? ref->x_halfwidth()
                         : 0.5 * (grid.axes[n - 1].back() - grid.axes[n - 1].front());
        if (tangent_x[f].size() == m) {
            J.col(n - 1) = tangent_x[f] / xhw;
        } else {
            int count = static_cast<int>(grid.axes[n - 1].size());
            auto lo = idx, hi = idx;
            if (idx[n - 1] > 0) lo[n - 1] = idx[n - 1] - 1;
            if (idx[n - 1] < count - 1) hi[n - 1] = idx[n - 1] + 1;
            double dp = grid.axes[n - 1][hi[n - 1]] - grid.axes[n - 1][lo[n - 1]];
            J.col(n - 1) =
                (oc.values.row(grid.flat(hi)) - oc.values.row(grid.flat(lo))).transpose() / dp;
        }
        jac[f] = std::move(J);
    }
    out.we.analytic_jacobian = [jac](std::size_t f) { return jac[f]; };

    // wrinkle manifest: one record per live band per cylinder
    double t_top = std::min(1.0, eng.intensity);
    if (t_top > 0) {
        for (std::size_t a = 0; a < eng.cover.cylinders.size(); ++a) {
            const auto& cyl = eng.cover.cylinders[a];
            double xhw = cyl.x_halfwidth();
            Eigen::Index dx = n - 1;
            double xc = 0.5 * (cyl.lo(dx) + cyl.hi(dx));
            const BandReparam& rep = eng.reparam_for(t_top, eng.zone_halfwidth());
            double eta_fold = rep.eta_fold();
            for (int k = -eng.params.N; k <= eng.params.N; ++k) {
                // the wrinkle disk is the descent segment between the right
                // fold of core k and the left fold of core k+1
                if (!eng.band_inside(cyl, k) || !eng.band_inside(cyl, k + 1)) continue;
                double xk_hat = 2.0 * (k + cyl.phase) / M;
                double xk1_hat = 2.0 * (k + 1 + cyl.phase) / M;
                double amp = eng.amp_profile(static_cast<int>(a), xk_hat) * eng.intensity;
                double amp1 = eng.amp_profile(static_cast<int>(a), xk1_hat) * eng.intensity;
                if (smoothstep01(std::min(amp, amp1) / eng.amp_full) < 1.0) continue;
                double fold_hat = 2.0 * eta_fold / M;
                double core_hat = 2.0 * (eng.params.sigma * WFunction::kCut * 1.2) / M;

                Wrinkle w;
                w.dom_lo = cyl.lo;
                w.dom_hi = cyl.hi;
                w.dom_lo(dx) = xc + (xk_hat + fold_hat) * xhw;
                w.dom_hi(dx) = xc + (xk1_hat - fold_hat) * xhw;
                if (n >= 2 && !cyl.wrap_r) {
                    double rh = 1.0 - eng.params.eps;
                    double rc = 0.5 * (cyl.lo(0) + cyl.hi(0));
                    double rhw = 0.5 * (cyl.hi(0) - cyl.lo(0));
                    w.dom_lo(0) = rc - rh * rhw;
                    w.dom_hi(0) = rc + rh * rhw;
                    Vec tip1 = Vec::Zero(n), tip2 = Vec::Zero(n);
                    tip1(0) = rc - rh * rhw;
                    tip2(0) = rc + rh * rhw;
                    tip1(dx) = tip2(dx) = xc + xk_hat * xhw;
                    w.equator = {tip1, tip2};
                }
                // exclusion core around each bounding cusp core
                w.core_lo = w.dom_lo;
                w.core_hi = w.dom_hi;
                w.core_lo(dx) = xc + (xk_hat - core_hat) * xhw;
                w.core_hi(dx) = xc + (xk_hat + core_hat) * xhw;
                w.chart_center = Vec::Zero(n);
                w.chart_center(dx) = xc + 0.5 * (xk_hat + xk1_hat) * xhw;
                if (n >= 2) w.chart_center(0) = 0.5 * (cyl.lo(0) + cyl.hi(0));
                w.chart_scale = Vec::Ones(n);
                w.chart_scale(dx) = 0.5 * (xk1_hat - xk_hat) * xhw;
                w.t_param = t_top;
                w.band_width = 2.0 / M * xhw;
                w.depth = 1;
                Vec fp1 = w.chart_center, fp2 = w.chart_center;
                fp1(dx) = w.dom_lo(dx);
                fp2(dx) = w.dom_hi(dx);
                w.fold_samples = {fp1, fp2};
                out.we.wrinkles.push_back(std::move(w));
                out.we.parent.push_back(-1);
            }
        }
    }
    out.measures.wrinkle_count = static_cast<int>(out.we.wrinkles.size());

    // corrugation-active ranges per cylinder, used as locality zones by the
    // embedding check
    for (std::size_t a = 0; a < eng.cover.cylinders.size(); ++a) {
        const auto& cyl = eng.cover.cylinders[a];
        Eigen::Index dx = n - 1;
        double xc = 0.5 * (cyl.lo(dx) + cyl.hi(dx));
        double xhw = cyl.x_halfwidth();
        double lo_hat = 2.0, hi_hat = -2.0;
        for (int k = -eng.params.N; k <= eng.params.N; ++k) {
            if (!eng.band_inside(cyl, k)) continue;
            double xk_hat = 2.0 * (k + cyl.phase) / M;
            if (eng.amp_profile(static_cast<int>(a), xk_hat) * eng.intensity <= 0.0) continue;
            lo_hat = std::min(lo_hat, xk_hat - 3.0 / M);
            hi_hat = std::max(hi_hat, xk_hat + 3.0 / M);
        }
        if (lo_hat > hi_hat) continue;
        Wrinkle z;
        z.dom_lo = cyl.lo;
        z.dom_hi = cyl.hi;
        z.dom_lo(dx) = xc + lo_hat * xhw;
        z.dom_hi(dx) = xc + hi_hat * xhw;
        z.band_width = 2.0 / M * xhw;
        out.exclusion_zones.push_back(std::move(z));
    }
    return out;
}

// Measurements against a fixed pole (hypersurface case).
inline void measure_frame(Gofferer& eng, GofferedOutput& out, const Vec& pole) {
    const SampledChart& base = eng.base;
    out.measures.c0 = c0_distance(out.we.base, base);

    double bdrift = 0, ldrift = 0;
    for (std::size_t f = 0; f < base.node_count(); ++f) {
        if (base.is_boundary(f))
            bdrift = std::max(bdrift,
                              (out.we.base.values.row(f) - base.values.row(f)).norm());
    }
    out.measures.boundary_drift = bdrift;
    (void)ldrift;

    out.measures.gauss_report =
        gauss_map(out.we, [&](std::size_t f) -> std::optional<GrassPoint> {
            Vec p = base.grid.param(f);
            Mat J = out.we.analytic_jacobian(f);
            Mat span(base.m, base.n());
            for (int d = 0; d + 1 < base.n(); ++d) span.col(d) = J.col(d);
            span.col(base.n() - 1) = eng.v_at(p);
            GrassPoint g = plane_from_vectors(span);
            if (base.m == base.n() + 1) {
                Vec nrm = detail::oriented_normal_from_tangents(span);
                double nn = nrm.norm();
                if (nn > 0) {
                    Vec cand = nrm / nn;
                    if (cand.dot(pole) < 0) cand = -cand;  // continuous fold limit
                    g.oriented_normal = cand;
                }
            }
            return g;
        });

    std::vector<double> angles;
    std::size_t core_nodes = 0, active_nodes = 0;
    for (std::size_t f = 0; f < base.node_count(); ++f) {
        if (!base.is_active(f)) continue;
        ++active_nodes;
        if (out.core_mask[f]) ++core_nodes;
        if (out.we.gauss[f].frame.size() == 0 || !out.we.gauss[f].oriented_normal) continue;
        double a = angle_to_pole(out.we.gauss[f], pole);
        if (!out.core_mask[f]) angles.push_back(a);
    }
    out.measures.core_fraction =
        active_nodes ? static_cast<double>(core_nodes) / active_nodes : 0.0;
    out.measures.max_angle =
        angles.empty() ? 0 : *std::max_element(angles.begin(), angles.end());
    out.measures.angle_quantile99 = detail::quantile(angles, 0.99);
    double worst_all = 0;
    out.measures.h_class =
        horizontality_class(out.we.gauss, base.active, pole, eng.params.eps, &worst_all);
    out.measures.horizontality_ok = out.measures.h_class == HorizontalityClass::EpsHorizontal;
    out.measures.embed = check_topological_embedding(out.we.base, out.we.wrinkles, {},
                                                     out.exclusion_zones);
    // fibered injectivity: the flow preserves levels and the base height is
    // strictly monotone along gradient lines, so the output heights must be
    // strictly monotone there too
    bool fibered = true;
    {
        const Grid& grid = base.grid;
        std::vector<int> shape = grid.shape();
        int nx = shape[base.n() - 1];
        std::size_t lines = base.node_count() / nx;
        for (std::size_t line = 0; line < lines && fibered; ++line) {
            double prev = 0;
            bool have = false;
            for (int i = 0; i < nx; ++i) {
                std::size_t f = line * nx + i;
                if (!base.is_active(f)) {
                    have = false;
                    continue;
                }
                double hval = out.we.base.values.row(f).dot(pole.transpose());
                if (have && hval <= prev) {
                    fibered = false;
                    break;
                }
                prev = hval;
                have = true;
            }
        }
    }
    out.measures.embedding_ok = out.measures.embed.pass && fibered;
}

struct GofferProblem {
    SampledChart chart;
    Vec pole;
    std::function<Vec(const Vec&)> base_at;
    std::function<Mat(const Vec&)> base_jac;
    double boundary_margin_factor = 0.5;  // "special" margin: eps/2 by default
};

// The Main Lemma driver: approximate an oriented quasi-graphical hypersurface
// chart (almost horizontal near its boundary) by an eps-horizontal wrinkled
// embedding of depth <= 1 that agrees with the input near the boundary.
// Tunes N upward (then the leg margin) until the horizontality and embedding
// checks pass or the budget N_max is exhausted.
inline GofferedOutput goffer_hypersurface(const GofferProblem& prob, GofferParams params) {
    params.check();
    const SampledChart& S = prob.chart;
    const Vec& pole = prob.pole;

    std::vector<GrassPoint> field;
    gauss_map(S, field);
    double tilt_max = 0, collar_tilt = 0;
    for (std::size_t f = 0; f < S.node_count(); ++f) {
        if (!S.is_active(f) || field[f].frame.size() == 0) continue;
        double a = angle_to_pole(field[f], pole);
        tilt_max = std::max(tilt_max, a);
        if (S.is_boundary(f)) collar_tilt = std::max(collar_tilt, a);
    }
    if (tilt_max >= M_PI - 1e-6)
        throw std::invalid_argument("goffer_hypersurface: chart is not quasi-graphical");
    if (collar_tilt > params.eps * prob.boundary_margin_factor + 1e-9)
        throw std::invalid_argument(
            "goffer_hypersurface: chart is not almost horizontal near the boundary");

    if (tilt_max < params.eps * 0.9) {
        GofferedOutput out;
        out.we = WrinkledEmbedding::smooth(S);
        out.core_mask.assign(S.node_count(), 0);
        out.pass = true;
        out.unchanged = true;
        out.tuned = params;
        gauss_map(out.we);
        out.measures.h_class = HorizontalityClass::EpsHorizontal;
        out.measures.max_angle = tilt_max;
        return out;
    }

    // transversal horizontal field: horizontal part of the co-orienting
    // normal, pointing down-slope (radial for rotationally symmetric charts)
    std::function<Vec(const Vec&)> v_at;
    const bool radial = S.grid.is_periodic(0);
    if (radial) {
        auto bat = prob.base_at ? prob.base_at : make_interpolator(S);
        Vec pl = pole;
        v_at = [bat, pl](const Vec& p) {
            Vec q = bat(p);
            Vec h = q - q.dot(pl) * pl;
            double nn = h.norm();
            return nn > 0 ? Vec(h / nn) : Vec(Vec::Zero(q.size()));
        };
    } else {
        Vec vdir = Vec::Zero(S.m);
        double best = -1;
        for (std::size_t f = 0; f < S.node_count(); ++f) {
            if (!S.is_active(f) || field[f].frame.size() == 0) continue;
            Vec nrm = *field[f].oriented_normal;
            Vec hpart = nrm - nrm.dot(pole) * pole;
            if (hpart.norm() > best) {
                best = hpart.norm();
                vdir = hpart;
            }
        }
        if (best <= 1e-12)
            throw std::invalid_argument("goffer_hypersurface: surface has no tilt direction");
        vdir.normalize();
        vdir = -vdir;
        v_at = [vdir](const Vec&) { return vdir; };
    }

    CoverReport cover_rep;
    GofferParams p = params;
    GofferedOutput out;
    double margin = 0.80;
    for (int attempt = 0; attempt < 16; ++attempt) {
        Gofferer eng;
        eng.base = S;
        eng.params = p;
        eng.pole_at = [pole](const Vec&) { return pole; };
        eng.v_at = v_at;
        eng.base_at = prob.base_at ? prob.base_at : make_interpolator(S);
        eng.base_jac = prob.base_jac;
        // keep the cylinders clear of the boundary collar so the collar
        // nodes stay bit-exactly fixed
        auto collar_margin = [&](int d) {
            if (S.grid.is_periodic(d) || S.boundary_mask.empty()) return 0.0;
            const auto& ax = S.grid.axes[d];
            int lead = 0;
            for (std::size_t i = 0; i < ax.size(); ++i) {
                bool all_boundary = true;
                for (std::size_t f = 0; f < S.node_count(); ++f) {
                    if (S.grid.unflat(f)[d] != static_cast<int>(i)) continue;
                    if (!S.is_boundary(f)) {
                        all_boundary = false;
                        break;
                    }
                }
                if (!all_boundary) break;
                ++lead;
            }
            if (lead == 0) return 0.0;
            return ax[lead] - ax[0] + 0.25 * (ax[1] - ax[0]);
        };
        double x_margin = collar_margin(S.n() - 1);
        double r_margin = S.n() >= 2 ? collar_margin(0) : 0.0;
        eng.cover = build_cylindrical_cover(S, pole, p, &cover_rep, x_margin, r_margin);
        if (!cover_rep.ok)
            throw std::invalid_argument("goffer_hypersurface: " + cover_rep.error);
        const WFunction& w1 = eng.w_for(1.0);
        double leg = std::max(0.2, w1.s_mag);
        auto need = [&](double tilt) {
            return std::cos(tilt) + std::sin(tilt) / std::tan(p.eps * margin);
        };
        double slope_need = need(tilt_max);
        eng.params.gamma = 2.0 * slope_need / (leg * eng.params.bands());
        eng.intensity = 1.0;

        // wrinkle only where the input tilt demands it: relative amplitude per
        // band from the worst tilt over the band column
        {
            const double M = eng.params.bands();
            std::vector<std::map<int, double>> amp(eng.cover.cylinders.size());
            for (std::size_t a = 0; a < eng.cover.cylinders.size(); ++a) {
                const auto& cyl = eng.cover.cylinders[a];
                std::map<int, double> tilt_k;
                for (std::size_t f = 0; f < S.node_count(); ++f) {
                    if (!S.is_active(f) || field[f].frame.size() == 0) continue;
                    Vec pp = S.grid.param(f);
                    if (!cyl.contains(pp)) continue;
                    double xi = 0.5 * M * cyl.xhat(pp) - cyl.phase;
                    double ang = angle_to_pole(field[f], pole);
                    for (int k : {static_cast<int>(std::floor(xi)),
                                  static_cast<int>(std::ceil(xi))}) {
                        auto [it, fresh] = tilt_k.try_emplace(k, ang);
                        if (!fresh) it->second = std::max(it->second, ang);
                    }
                }
                for (auto& [k, tilt] : tilt_k) {
                    if (tilt <= 0.85 * p.eps)
                        amp[a][k] = 0.0;
                    else
                        amp[a][k] = std::clamp(need(tilt) / slope_need, 0.0, 1.0);
                }
            }
            double phase0 = eng.cover.cylinders.empty() ? 0.0 : eng.cover.cylinders[0].phase;
            std::vector<double> phases;
            for (const auto& c : eng.cover.cylinders) phases.push_back(c.phase);
            (void)phase0;
            eng.amp_profile = [amp, M, phases](int a, double xhat) {
                int k = static_cast<int>(std::lround(0.5 * M * xhat - phases[a]));
                auto it = amp[a].find(k);
                return it == amp[a].end() ? 0.0 : it->second;
            };
        }

        out = goffer_frame(eng);
        measure_frame(eng, out, pole);
        out.tuned = eng.params;
        out.pass = out.measures.horizontality_ok && out.measures.embedding_ok &&
                   out.measures.gauss_report.ok() && out.measures.boundary_drift == 0.0;
        if (out.pass) break;
        if (!out.measures.horizontality_ok) {
            if (p.N * 2 <= p.N_max)
                p.N *= 2;  // refine bands first
            else if (margin > 0.5)
                margin *= 0.85;  // then push the legs steeper
            else
                break;
        } else if (!out.measures.embedding_ok) {
            if (p.N * 2 > p.N_max) break;
            p.N *= 2;
        } else {
            break;
        }
    }
    return out;
}

struct FamilyFrame {
    double time = 0;
    GofferedOutput output;
    std::vector<std::string> events;
};

// Time-parametric version: S_t fixed at t=0 and near the boundary for all t.
// Wrinkles are born (embryos) at interior times as the needed amplitude
// crosses zero; with `doubled`, frames run over [0,2] equivariantly under the
// involution t -> 2-t.
inline std::vector<FamilyFrame> goffer_family(
    const std::function<GofferProblem(double)>& family, GofferParams params,
    bool doubled = false) {
    params.check();
    std::vector<FamilyFrame> frames(params.frames);
    double span = doubled ? 2.0 : 1.0;
    bool born = false;
    for (int j = 0; j < params.frames; ++j) {
        double s = span * j / (params.frames - 1);
        double s_eff = doubled ? std::min(s, 2.0 - s) : s;
        GofferProblem prob = family(s_eff);
        FamilyFrame fr;
        fr.time = s;
        if (s_eff == 0.0) {
            fr.output.we = WrinkledEmbedding::smooth(prob.chart);
            fr.output.core_mask.assign(prob.chart.node_count(), 0);
            fr.output.pass = true;
            fr.output.unchanged = true;
        } else {
            fr.output = goffer_hypersurface(prob, params);
        }
        bool has = !fr.output.we.wrinkles.empty();
        if (has && !born) {
            fr.events.push_back("embryo: wrinkles born");
            born = true;
        } else if (!has && born) {
            fr.events.push_back("embryo: wrinkles died");
            born = false;
        }
        frames[j] = std::move(fr);
    }
    return frames;
}

}  // namespace wrinkle

#endif
