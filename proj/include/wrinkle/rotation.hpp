#ifndef WRINKLE_ROTATION_HPP
#define WRINKLE_ROTATION_HPP

#include <cmath>
#include <string>
#include <vector>

#include "wrinkle/hypersurface.hpp"

namespace wrinkle {

// Time-sampled field of tangent n-planes over a chart, covering the constant
// isotopy: G_0 is the tangent field of the base chart.
struct TangentialRotationPath {
    std::vector<double> times;                     // increasing, from 0
    std::vector<std::vector<GrassPoint>> planes;   // [time][node]
    std::vector<uint8_t> fixed_set;                // nodes where the path is constant
    bool small_flag = false;
    bool simple_flag = false;

    void check(const SampledChart& base) const {
        if (times.empty() || planes.size() != times.size())
            throw std::invalid_argument("rotation path: time sampling mismatch");
        for (const auto& frame : planes)
            if (frame.size() != base.node_count())
                throw std::invalid_argument("rotation path: node count mismatch");
        std::vector<GrassPoint> g0;
        gauss_map(base, g0);
        for (std::size_t f = 0; f < base.node_count(); ++f) {
            if (!base.is_active(f) || g0[f].frame.size() == 0) continue;
            if (angle(planes[0][f], g0[f]) > 5e-2)
                throw std::invalid_argument(
                    "rotation path: G_0 must be the tangent field of the base");
        }
    }
};

// One simple rotation: within each node's (n+1)-subspace L_v, total angle
// below pi/4.
struct SimpleRotationStep {
    int t_begin = 0, t_end = 0;  // indices into the path times
    double max_angle = 0;
    std::vector<Mat> subspace;  // per node, m x (n+1) orthonormal frame for L_v
};

struct DecompositionReport {
    std::vector<SimpleRotationStep> steps;
    bool ok = true;
    std::string error;
};

// Split a tangential rotation into simple rotations: greedy in time, each
// step bounded by max_angle (< pi/4) at every node, with the rotation of each
// step confined to a fixed (n+1)-subspace per node.
inline DecompositionReport decompose_into_simple(const TangentialRotationPath& path,
                                                 const SampledChart& base,
                                                 double max_angle = M_PI / 4.0,
                                                 double jump_tol = 0.5) {
    DecompositionReport rep;
    path.check(base);
    const std::size_t T = path.times.size();
    const std::size_t N = base.node_count();

    // continuity: node-wise angular increments bounded
    for (std::size_t t = 0; t + 1 < T; ++t)
        for (std::size_t f = 0; f < N; ++f) {
            if (!base.is_active(f)) continue;
            if (path.planes[t][f].frame.size() == 0) continue;
            if (angle(path.planes[t][f], path.planes[t + 1][f]) > jump_tol) {
                rep.ok = false;
                rep.error = "path discontinuity at sampled resolution";
                return rep;
            }
        }

    const double budget = max_angle * 0.9;
    std::size_t start = 0;
    while (start + 1 < T) {
        std::size_t end = start;
        for (std::size_t t = start + 1; t < T; ++t) {
            double worst = 0;
            for (std::size_t f = 0; f < N; ++f) {
                if (!base.is_active(f) || path.planes[start][f].frame.size() == 0) continue;
                worst = std::max(worst, angle(path.planes[start][f], path.planes[t][f]));
            }
            if (worst <= budget)
                end = t;
            else
                break;
        }
        if (end == start) {
            rep.ok = false;
            rep.error = "cannot advance within the angle budget";
            return rep;
        }
        SimpleRotationStep step;
        step.t_begin = static_cast<int>(start);
        step.t_end = static_cast<int>(end);
        step.subspace.resize(N);
        for (std::size_t f = 0; f < N; ++f) {
            if (!base.is_active(f) || path.planes[start][f].frame.size() == 0) continue;
            double a = angle(path.planes[start][f], path.planes[end][f]);
            step.max_angle = std::max(step.max_angle, a);
            // L_v spans the step's endpoint planes
            const Mat& A = path.planes[start][f].frame;
            const Mat& B = path.planes[end][f].frame;
            Mat join(A.rows(), A.cols() + B.cols());
            join << A, B;
            Eigen::JacobiSVD<Mat> svd(join, Eigen::ComputeThinU);
            int rank = 0;
            for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > 1e-9 * svd.singularValues()(0)) ++rank;
            if (rank > A.cols() + 1) {
                rep.ok = false;
                rep.error = "step rotation leaves an (n+1)-subspace";
                return rep;
            }
            step.subspace[f] = svd.matrixU().leftCols(std::min<int>(rank, A.cols() + 1));
            // intermediate planes must stay inside L_v
            for (std::size_t t = start; t <= end; ++t) {
                const Mat& P = path.planes[t][f].frame;
                Mat res = P - step.subspace[f] * (step.subspace[f].transpose() * P);
                if (res.norm() > 1e-6) {
                    rep.ok = false;
                    rep.error = "intermediate plane leaves the step subspace";
                    return rep;
                }
            }
        }
        if (step.max_angle >= max_angle) {
            rep.ok = false;
            rep.error = "step exceeds the simple-rotation angle bound";
            return rep;
        }
        rep.steps.push_back(std::move(step));
        start = end;
    }
    return rep;
}

// Triangulation of the parameter domain for the piecewise-constant projection.
struct Triangulation {
    std::vector<std::vector<std::size_t>> simplices;  // node indices per simplex
    std::vector<Vec> barycenters;
};

inline Triangulation segment_triangulation(const Grid& g, int pieces) {
    Triangulation tri;
    int n = static_cast<int>(g.axes[0].size());
    for (int p = 0; p < pieces; ++p) {
        std::size_t a = static_cast<std::size_t>(p) * (n - 1) / pieces;
        std::size_t b = static_cast<std::size_t>(p + 1) * (n - 1) / pieces;
        tri.simplices.push_back({a, b});
        Vec c(1);
        c << 0.5 * (g.axes[0][a] + g.axes[0][b]);
        tri.barycenters.push_back(c);
    }
    return tri;
}

struct PiecewiseConstantField {
    std::vector<GrassPoint> values;  // per simplex, the plane at the barycenter
    double max_deviation = 0;        // max angle(G(v), G^Delta(v)) over nodes
    bool fine_enough = true;
    int offending_simplex = -1;
};

// G^Delta: on each simplex the constant plane taken at its barycenter;
// multivalued on the shared skeleton. Reports the deviation bound and flags
// simplices violating the fineness tolerance.
inline PiecewiseConstantField piecewise_constant_G(const Triangulation& tri,
                                                   const std::vector<GrassPoint>& field,
                                                   const Grid& grid, double tol) {
    PiecewiseConstantField out;
    for (std::size_t s = 0; s < tri.simplices.size(); ++s) {
        // nearest node to the barycenter carries the representative plane
        std::size_t best = tri.simplices[s][0];
        double bd = 1e300;
        for (std::size_t f : tri.simplices[s]) {
            double d = (grid.param(f) - tri.barycenters[s]).norm();
            if (d < bd) {
                bd = d;
                best = f;
            }
        }
        out.values.push_back(field[best]);
        for (std::size_t f : tri.simplices[s]) {
            if (field[f].frame.size() == 0) continue;
            double a = angle(field[f], field[best]);
            out.max_deviation = std::max(out.max_deviation, a);
            if (a > tol) {
                out.fine_enough = false;
                if (out.offending_simplex < 0) out.offending_simplex = static_cast<int>(s);
            }
        }
    }
    return out;
}

struct RotationFrame {
    double time = 0;
    GofferedOutput output;
    double max_angle_to_target = 0;  // over regular non-core nodes
    double q99_angle_to_target = 0;
    double c0 = 0;
    int depth = 0;
    std::vector<std::string> events;
};

struct RotationResult {
    std::vector<RotationFrame> frames;
    DecompositionReport decomposition;
    bool pass = false;
    double worst_q99 = 0;
    double worst_c0 = 0;
    int max_depth = 0;
    bool fixity_exact = true;
    GofferParams tuned;
};

// Rotation path for a straight segment: rotate the tangent by profile(p) *
// angle(t) within the plane of R^2.
inline TangentialRotationPath segment_rotation_path(
    const SampledChart& base, double total_angle,
    const std::function<double(double)>& profile, int frames) {
    TangentialRotationPath path;
    std::vector<GrassPoint> g0;
    gauss_map(base, g0);
    path.fixed_set.assign(base.node_count(), 0);
    for (std::size_t f = 0; f < base.node_count(); ++f)
        if (profile(base.grid.param(f)(0)) == 0.0) path.fixed_set[f] = 1;
    for (int j = 0; j < frames; ++j) {
        double t = static_cast<double>(j) / (frames - 1);
        path.times.push_back(t);
        std::vector<GrassPoint> frame(base.node_count());
        for (std::size_t f = 0; f < base.node_count(); ++f) {
            if (g0[f].frame.size() == 0) continue;
            double a = total_angle * t * profile(base.grid.param(f)(0));
            Mat R(2, 2);
            R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
            GrassPoint gp;
            gp.frame = R * g0[f].frame;
            frame[f] = gp;
        }
        path.planes.push_back(std::move(frame));
    }
    path.small_flag = true;
    return path;
}

// Integrable approximation of a tangential rotation of a segment chart in
// R^2 by a homotopy of wrinkled curves: f_0 is the inclusion, the homotopy is
// fixed on the declared fixed set, and at every frame the wrinkled Gauss
// field tracks G_t. Depth stays <= 1 <= the number of simple steps.
inline RotationResult approximate_rotation_curve(const SampledChart& base,
                                                 const std::function<Vec(const Vec&)>& base_at,
                                                 const std::function<Mat(const Vec&)>& base_jac,
                                                 const TangentialRotationPath& path,
                                                 double tol, GofferParams params,
                                                 double c0_budget = 0.05) {
    if (base.n() != 1 || base.m != 2)
        throw std::invalid_argument("approximate_rotation_curve: expects a curve in R^2");
    path.check(base);
    RotationResult result;
    result.decomposition = decompose_into_simple(path, base);

    const Grid& grid = base.grid;
    const std::size_t N = base.node_count();

    // per-node target angle profile theta(p, t) relative to the base tangent
    std::vector<GrassPoint> g0;
    gauss_map(base, g0);
    auto target_angle = [&](std::size_t t, std::size_t f) {
        if (g0[f].frame.size() == 0 || path.planes[t][f].frame.size() == 0) return 0.0;
        return angle(path.planes[t][f], g0[f]);
    };

    GofferParams p = params;
    double gamma_used = params.gamma;
    const double eps_construct = tol * 0.8;
    {
        // size the band count from the C0 budget: gamma + band shift ~ 27/M
        std::vector<GrassPoint> gg0;
        gauss_map(base, gg0);
        double worst = 0;
        for (std::size_t t = 0; t < path.times.size(); ++t)
            for (std::size_t f = 0; f < base.node_count(); ++f) {
                if (!base.is_active(f) || gg0[f].frame.size() == 0) continue;
                if (path.planes[t][f].frame.size() == 0) continue;
                worst = std::max(worst, angle(path.planes[t][f], gg0[f]));
            }
        double nd = std::cos(worst) + std::sin(worst) / std::tan(eps_construct);
        WFunction w1 = build_W(p.sigma, 1.0);
        double leg = std::max(0.2, w1.s_mag);
        int m_needed = static_cast<int>(std::ceil((2.0 * nd / leg + 1.0) / (0.75 * c0_budget)));
        p.N = std::max(p.N, (m_needed + 1) / 2);
    }
    bool done = false;
    for (int attempt = 0; attempt < 10 && !done; ++attempt) {
        result.frames.assign(path.times.size(), {});
        result.worst_q99 = 0;
        result.worst_c0 = 0;
        result.max_depth = 0;
        result.fixity_exact = true;
        bool had_wrinkles = false;

        for (std::size_t t = 0; t < path.times.size(); ++t) {
            RotationFrame fr;
            fr.time = path.times[t];

            // per-band amplitude from the local need at this frame
            Gofferer eng;
            eng.base = base;
            eng.params = p;
            const WFunction& w1 = eng.w_for(1.0);
            double leg = std::max(0.2, w1.s_mag);
            auto need = [&](double th) {
                return th <= 0 ? 0.0
                              : std::cos(th) + std::sin(th) / std::tan(eps_construct);
            };
            double need_max_frame = 0, need_max_total = 0;
            for (std::size_t tt = 0; tt < path.times.size(); ++tt)
                for (std::size_t f = 0; f < N; ++f)
                    if (base.is_active(f)) {
                        double nd = need(target_angle(tt, f));
                        if (tt == t) need_max_frame = std::max(need_max_frame, nd);
                        need_max_total = std::max(need_max_total, nd);
                    }
            eng.params.gamma = 2.0 * need_max_total / (leg * eng.params.bands());
            gamma_used = eng.params.gamma;
            eng.intensity = 1.0;

            // target direction field at this frame (sign-continuous)
            std::vector<Vec> vdir(N);
            {
                Vec prev = Vec::Zero(2);
                for (std::size_t f = 0; f < N; ++f) {
                    if (path.planes[t][f].frame.size() == 0) continue;
                    Vec d = path.planes[t][f].frame.col(0);
                    if (prev.size() && prev.norm() > 0 && prev.dot(d) < 0) d = -d;
                    vdir[f] = d;
                    prev = d;
                }
            }
            Grid gcopy = grid;
            std::vector<Vec> vcopy = vdir;
            auto v_at = [gcopy, vcopy](const Vec& pp) {
                const auto& ax = gcopy.axes[0];
                auto it = std::upper_bound(ax.begin(), ax.end(), pp(0));
                int hi = std::clamp<int>(static_cast<int>(it - ax.begin()), 1,
                                         static_cast<int>(ax.size()) - 1);
                double w = (pp(0) - ax[hi - 1]) / (ax[hi] - ax[hi - 1]);
                Vec d = (1.0 - w) * vcopy[hi - 1] + w * vcopy[hi];
                double nn = d.norm();
                return nn > 0 ? Vec(d / nn) : Vec(Vec::Zero(2));
            };
            auto pole_at = [v_at](const Vec& pp) {
                Vec d = v_at(pp);
                Vec n(2);
                n << -d(1), d(0);
                return n;
            };

            // amplitude profile: relative need per band center
            double theta_on = 0.3 * eps_construct;
            std::vector<double> thetas(N);
            for (std::size_t f = 0; f < N; ++f) thetas[f] = target_angle(t, f);
            double span_lo = grid.axes[0].front(), span_hi = grid.axes[0].back();
            auto theta_at = [&, thetas](double x) {
                double u = (x - span_lo) / (span_hi - span_lo) * (N - 1);
                int i = std::clamp<int>(static_cast<int>(std::lround(u)), 0,
                                        static_cast<int>(N) - 1);
                return thetas[i];
            };
            double band_half = 1.0 / p.bands() * (span_hi - span_lo);
            double need_full = std::max(1e-12, need_max_total);
            auto amp_profile = [=](int, double xhat) {
                double x = span_lo + (xhat + 1.0) * 0.5 * (span_hi - span_lo);
                double th = 0;
                for (double dx = -band_half; dx <= band_half; dx += band_half / 2)
                    th = std::max(th, theta_at(std::clamp(x + dx, span_lo, span_hi)));
                if (th <= theta_on) return 0.0;
                double nd = std::cos(th) + std::sin(th) / std::tan(eps_construct);
                return std::clamp(nd / need_full, 0.0, 1.0);
            };
            eng.amp_profile = amp_profile;
            eng.pole_at = pole_at;
            eng.v_at = v_at;
            eng.base_at = base_at;
            eng.base_jac = base_jac;
            CylinderChart cyl;
            cyl.lo = Vec::Constant(1, span_lo);
            cyl.hi = Vec::Constant(1, span_hi);
            cyl.special = true;
            eng.cover.cylinders = {cyl};

            fr.output = goffer_frame(eng);
            fr.c0 = c0_distance(fr.output.we.base, base);

            // measurements against the frame target
            auto rep = gauss_map(fr.output.we, [&](std::size_t f) -> std::optional<GrassPoint> {
                Mat span(2, 1);
                span.col(0) = v_at(grid.param(f));
                return plane_from_vectors(span);
            });
            (void)rep;
            std::vector<double> errs;
            for (std::size_t f = 0; f < N; ++f) {
                if (!base.is_active(f)) continue;
                if (fr.output.core_mask[f]) continue;
                if (fr.output.we.gauss[f].frame.size() == 0) continue;
                if (path.planes[t][f].frame.size() == 0) continue;
                errs.push_back(angle(fr.output.we.gauss[f], path.planes[t][f]));
            }
            fr.max_angle_to_target = errs.empty() ? 0 : *std::max_element(errs.begin(), errs.end());
            fr.q99_angle_to_target = detail::quantile(errs, 0.99);
            fr.depth = fr.output.we.wrinkles.empty() ? 0 : depth(fr.output.we);
            if (fr.depth > 0 && !had_wrinkles) {
                fr.events.push_back("embryo: wrinkles born");
                had_wrinkles = true;
            }

            // bit-exact fixity on the declared fixed set
            for (std::size_t f = 0; f < N; ++f)
                if (path.fixed_set.size() == N && path.fixed_set[f])
                    if (fr.output.we.base.values.row(f) != base.values.row(f))
                        result.fixity_exact = false;

            result.worst_q99 = std::max(result.worst_q99, fr.q99_angle_to_target);
            result.worst_c0 = std::max(result.worst_c0, fr.c0);
            result.max_depth = std::max(result.max_depth, fr.depth);
            result.frames[t] = std::move(fr);
        }

        // final-frame embedding check plus the fibered certificate: strictly
        // monotone height along the segment in every frame's pole field
        auto& last = result.frames.back();
        EmbedCheckParams ep;
        auto embed = check_topological_embedding(last.output.we.base, last.output.we.wrinkles,
                                                 ep, last.output.exclusion_zones);
        bool fibered = true;
        {
            // fibered certificate: per band, the image must advance along the
            // local pole direction; the allowance absorbs the pole-field
            // drift of the rotating frame across one band
            int stride = std::max<std::size_t>(1, N / p.bands());
            for (std::size_t t = 0; t < path.times.size() && fibered; ++t) {
                const auto& fr_out = result.frames[t].output;
                const auto& vals = fr_out.we.base.values;
                auto in_zone = [&](std::size_t f) {
                    Vec pp = grid.param(f);
                    for (const auto& z : fr_out.exclusion_zones)
                        if (z.domain_contains(pp)) return true;
                    return false;
                };
                for (std::size_t f = 0; f + stride < N; ++f) {
                    std::size_t f2 = f + stride;
                    if (!base.is_active(f) || !base.is_active(f2)) continue;
                    if (!in_zone(f) || !in_zone(f2)) continue;
                    if (path.planes[t][f].frame.size() == 0 ||
                        path.planes[t][f2].frame.size() == 0)
                        continue;
                    Vec d = (path.planes[t][f].frame.col(0) +
                             path.planes[t][f2].frame.col(0))
                                .normalized();
                    Vec pole(2);
                    pole << -d(1), d(0);
                    double dh = (vals.row(f2) - vals.row(f)).dot(pole.transpose());
                    Vec dpole = path.planes[t][f2].frame.col(0) -
                                path.planes[t][f].frame.col(0);
                    double allowance = 2.0 * gamma_used * dpole.norm() + 1e-12;
                    if (dh <= -allowance) {
                        fibered = false;
                        break;
                    }
                }
            }
        }
        bool angles_ok = result.worst_q99 <= tol && fibered;
        bool c0_ok = result.worst_c0 <= c0_budget;
        done = angles_ok && c0_ok && embed.pass && result.fixity_exact;
        result.pass = done;
        result.tuned = p;
        if (!done) {
            if (!c0_ok || !embed.pass) {
                if (p.N * 2 > p.N_max) break;
                p.N *= 2;
            } else if (!angles_ok) {
                if (p.N * 2 > p.N_max) break;
                p.N *= 2;
            } else {
                break;
            }
        }
    }
    return result;
}

}  // namespace wrinkle

#endif
