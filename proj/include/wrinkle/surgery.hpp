#ifndef WRINKLE_SURGERY_HPP
#define WRINKLE_SURGERY_HPP

#include <cmath>
#include <cstring>
#include <map>
#include <queue>

#include "wrinkle/classify_sampled.hpp"
#include "wrinkle/embed_check.hpp"
#include "wrinkle/models.hpp"
#include "wrinkle/regularize.hpp"

namespace wrinkle {

// Whitney surgery of the cusp pair of Z(2,3): the wrinkle is replaced by a
// pair of nested fold circles bounding an annulus. The surgered map keeps the
// (y, a, u)-gauge with vertical kernel away from two small "fan" disks where
// the fold curves turn; inside the fans the kernel rotates via a local twist.
// The fold-defining function G equals z^2+|y|^2-1 exactly on the declared
// unchanged wedge, through the factorization q = s_A * (r + r_circ + 2<C,e>).
struct SurgeryParams {
    double hole_radius = 0.55;     // chart is the annulus hole <= R <= 1.45
    double outer_radius = 1.45;
    double center_z = 0.45;        // lens center C = (0, center_z), inside the hole
    double psi_follow = 1.9;       // lens A follows the circle for |psi| <= psi_follow
    double psi_blend = 2.35;
    double bottom_reach = 1.13;    // lens A radius at psi = pi
    double gap = 0.18;             // radial gap to lens B
    double gap_relief = 0.45;      // gap shrink toward the bottom
    double e_bottom = 3.0;         // fold-strength scale away from the wedge
    double wedge_phi_lo = 40.0 * M_PI / 180.0;  // unchanged wedge, angle from +y axis
    double wedge_phi_hi = 140.0 * M_PI / 180.0;
    double wedge_r = 0.97;
    double fan_radius = 0.17;
    int quad_panels = 6;  // per grid cell, Gauss-Legendre 4 point
};

namespace surgery_detail {

inline double r_circle(double cz, double cospsi) {
    double b = cz * cospsi;
    return -b + std::sqrt(b * b + 1.0 - cz * cz);
}

struct Lenses {
    SurgeryParams prm;

    double R_A(double psi) const {
        double a = std::abs(psi);
        double rc = r_circle(prm.center_z, std::cos(a));
        if (a <= prm.psi_follow) return rc;
        double rc1 = r_circle(prm.center_z, std::cos(prm.psi_blend));
        double ratio = (M_PI - a) / (M_PI - prm.psi_blend);
        double prof = prm.bottom_reach + (rc1 - prm.bottom_reach) * ratio * ratio;
        double s = step_up(a, prm.psi_follow, prm.psi_blend);
        return (1.0 - s) * rc + s * prof;
    }
    double gap_at(double psi) const {
        return prm.gap * (1.0 - prm.gap_relief * step_up(std::abs(psi), 2.2, 2.7));
    }
    double R_B(double psi) const { return R_A(psi) - gap_at(psi); }

    // signed functions: negative inside the lens
    void eval(double y, double z, double* sA, double* sB, double* r, double* psi) const {
        double dy = y, dz = z - prm.center_z;
        *r = std::sqrt(dy * dy + dz * dz);
        *psi = std::atan2(std::abs(dy), dz);  // even in y
        *sA = *r - R_A(*psi);
        *sB = *r - R_B(*psi);
    }

    Vec point_on(double psi_signed, bool lensA) const {
        double rr = lensA ? R_A(psi_signed) : R_B(psi_signed);
        Vec p(2);
        p << rr * std::sin(psi_signed), prm.center_z + rr * std::cos(psi_signed);
        return p;
    }

    // z-tangency points (lens tangent parallel to the z axis), right half
    std::vector<double> tangencies(bool lensA) const {
        std::vector<double> out;
        auto ty = [&](double psi) {
            double h = 1e-5;
            Vec a = point_on(psi - h, lensA), b = point_on(psi + h, lensA);
            return (b(0) - a(0)) / (2 * h);
        };
        double prev = ty(0.02);
        for (int i = 1; i <= 600; ++i) {
            double psi = 0.02 + (M_PI - 0.06) * i / 600.0;
            double cur = ty(psi);
            if (prev * cur < 0) {
                double lo = psi - (M_PI - 0.06) / 600.0, hi = psi;
                for (int it = 0; it < 50; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (ty(lo) * ty(mid) <= 0 ? hi : lo) = mid;
                }
                out.push_back(0.5 * (lo + hi));
            }
            prev = cur;
        }
        return out;
    }
};

}  // namespace surgery_detail

struct FoldPair {
    int outer = 0, inner = 1;  // component indices
    bool bounds_annulus = false;
};

struct FoldedEmbedding {
    SampledChart base;
    SampledCensus census;
    std::vector<FoldPair> double_folds;
};

struct SurgeryResult {
    FoldedEmbedding folded;
    SampledChart original;
    std::vector<uint8_t> unchanged_mask;  // nodes outside the declared support
    double c0_perturbation = 0;
    bool census_ok = false;
    bool locality_ok = false;
    EmbedCheckReport embed;
    std::string note;
};

inline SurgeryResult whitney_surgery_model(const SingularityModel& model, int nodes_per_axis,
                                           const SurgeryParams& prm = {}) {
    model.check();
    if (model.n == 1)
        throw std::invalid_argument("whitney_surgery_model: undefined for n = 1");
    if (model.kind != ModelKind::WrinkleEmbeddingZ)
        throw std::invalid_argument("whitney_surgery_model: expects the model Z(n,m)");
    if (model.n != 2 || model.target != 3)
        throw std::invalid_argument(
            "whitney_surgery_model: desk-scale surgery implemented for Z(2,3)");

    using surgery_detail::Lenses;
    Lenses L{prm};

    // fan disks around the z-tangency pairs of the lenses (right half; the
    // configuration is even in y)
    auto tA = L.tangencies(true), tB = L.tangencies(false);
    if (tA.size() != 1 || tB.size() != 1)
        throw std::logic_error("whitney_surgery_model: unexpected lens tangency count");
    Vec pA = L.point_on(tA[0], true), pB = L.point_on(tB[0], false);

    const double cz = prm.center_z;
    auto G_raw = [&](double y, double z) {
        double sA, sB, r, psi;
        L.eval(y, z, &sA, &sB, &r, &psi);
        double rc = surgery_detail::r_circle(cz, std::cos(psi));
        double comp = r + rc + 2.0 * cz * std::cos(psi);  // q = sA * comp on the circle side
        double chi = step_down(psi, 1.45, 1.75) * step_up(sB, 0.04, 0.09);
        double Ebar = chi * (comp / sB) + (1.0 - chi) * prm.e_bottom;
        return sA * sB * Ebar;
    };

    // Fans: near the turning points of the lens arcs the kernel foliation
    // must bend (no boundary-fixed reparameterization can make a turning fold
    // transversal to vertical lines). Leaves follow a rotated direction
    // field; the map there is (leaf label, leaf integrals of (3G, G^2)).
    struct FanField {
        Vec c;
        double r_f = 0, w_max = 0, plat = 0.35, outer = 0.95;
        double sign = 1;
        double omega(const Vec& p, double side) const {
            Vec cc = c;
            cc(0) *= side;
            double rr = (p - cc).norm();
            return side * sign * w_max * step_down(rr, plat * r_f, outer * r_f);
        }
        Vec dir(const Vec& p, double side) const {  // upward leaf direction
            double w = omega(p, side);
            Vec d(2);
            d << -std::sin(w), std::cos(w);
            return d;
        }
    };

    // curvature center of a lens at its turning point
    auto curvature_center = [&](bool lensA, double tpsi) {
        double h = 1e-4;
        Vec p0 = L.point_on(tpsi - h, lensA), p1 = L.point_on(tpsi, lensA),
            p2 = L.point_on(tpsi + h, lensA);
        Vec d1 = (p2 - p0) / (2 * h), d2 = (p2 - 2 * p1 + p0) / (h * h);
        double speed2 = d1.squaredNorm();
        double cross = d1(0) * d2(1) - d1(1) * d2(0);
        double kappa = cross / std::pow(speed2, 1.5);
        Vec nrm(2);
        nrm << -d1(1), d1(0);
        nrm /= std::sqrt(speed2);
        return Vec(p1 + nrm / kappa);
    };
    Vec ccA = curvature_center(true, tA[0]);
    Vec ccB = curvature_center(false, tB[0]);

    FanField fan;
    {
        double best_score = -1;
        for (double blend : {0.0, 0.35, 0.7, 1.0}) {
            Vec cand = blend * (0.5 * (ccA + ccB)) + (1.0 - blend) * (0.5 * (pA + pB));
            for (double rf : {0.28, 0.36, 0.45}) {
                for (double wm : {1.35, 1.1, 0.85}) {
                    for (double sgn : {1.0, -1.0}) {
                        FanField t;
                        t.c = cand;
                        t.r_f = rf;
                        t.w_max = wm;
                        t.sign = sgn;
                        if (cand.norm() + rf > prm.outer_radius - 0.02) continue;
                        if (cand.norm() - rf < prm.hole_radius + 0.02) continue;
                        double phi_edge =
                            std::atan2(cand(1) + rf, std::max(1e-9, cand(0) - rf));
                        if (phi_edge > prm.wedge_phi_lo - 0.05 &&
                            cand.norm() + rf > prm.wedge_r - 0.02)
                            continue;
                        double min_angle = 1;
                        for (bool la : {true, false}) {
                            double tpsi = la ? tA[0] : tB[0];
                            for (double dps = -0.5; dps <= 0.5; dps += 0.0125) {
                                Vec q0 = L.point_on(tpsi + dps, la);
                                if ((q0 - cand).norm() >= rf) continue;
                                Vec q1 = L.point_on(tpsi + dps + 1e-4, la);
                                Vec tt = (q1 - q0).normalized();
                                Vec dd = t.dir(q0, 1.0);
                                double cosang = std::abs(tt.dot(dd));
                                min_angle = std::min(min_angle, std::acos(std::min(1.0, cosang)));
                            }
                        }
                        if (min_angle > best_score) {
                            best_score = min_angle;
                            fan = t;
                        }
                    }
                }
            }
        }
        if (best_score < 0.17)
            throw std::logic_error(
                "whitney_surgery_model: no leaf field achieves arc transversality");
    }
    const double fan_r = fan.r_f;
    const Vec fan_center = fan.c;

    const double zo = prm.outer_radius;
    Grid grid = Grid::uniform({{-zo, zo}, {-zo, zo}}, {nodes_per_axis, nodes_per_axis});
    const auto& ys = grid.axes[0];
    const auto& zs = grid.axes[1];
    const int nz = static_cast<int>(zs.size());

    SampledChart out;
    out.grid = grid;
    out.m = 3;
    out.values.resize(grid.node_count(), 3);
    out.values.setZero();
    out.active.assign(grid.node_count(), 0);
    out.boundary_mask.assign(grid.node_count(), 0);

    SampledChart orig = out;

    auto zmodel_eval = [&](double y, double z) {
        ModelPoint mp;
        mp.y = Vec::Constant(1, y);
        mp.z = z;
        return eval_model(model, mp);
    };

    // Gauss-Legendre 4-point panel integral of (3G, G^2) along a vertical
    // (or twisted-vertical) segment
    static const double gl_x[4] = {-0.8611363115940526, -0.3399810435848563,
                                   0.3399810435848563, 0.8611363115940526};
    static const double gl_w[4] = {0.3478548451374538, 0.6521451548625461,
                                   0.6521451548625461, 0.3478548451374538};
    auto seg_integral = [&](const std::function<double(double)>& f, double a, double b,
                            int panels) {
        double acc = 0;
        for (int p = 0; p < panels; ++p) {
            double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
            double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (int k = 0; k < 4; ++k) acc += gl_w[k] * half * f(mid + half * gl_x[k]);
        }
        return acc;
    };

    auto in_fan = [&](const Vec& p) {
        for (double side : {1.0, -1.0}) {
            Vec c = fan_center;
            c(0) *= side;
            if ((p - c).norm() < fan_r) return side;
        }
        return 0.0;
    };
    auto in_wedge = [&](double y, double z) {
        double phi = std::atan2(z, y);  // angle from +y axis toward +z
        double R = std::hypot(y, z);
        return phi >= prm.wedge_phi_lo && phi <= prm.wedge_phi_hi && R >= prm.wedge_r;
    };

    // outside-of-fans field: per-column cumulative integrals of (3G, G^2),
    // anchored at the chart top with the Z closed form. The block below the
    // hole integrates upward from the chart bottom, with its anchor chosen to
    // match the neighbouring through-columns (same integrand, one shared
    // value => the whole seam column agrees).
    const double ztop = zs.back();
    const double zbot = zs.front();
    auto g1_at = [&](double y) {
        return [&, y](double zz) { return 3.0 * G_raw(y, zz); };
    };
    auto g2_at = [&](double y) {
        return [&, y](double zz) {
            double g = G_raw(y, zz);
            return g * g;
        };
    };
    // top-anchored exact field at arbitrary points (used for fan chords and
    // the seam anchors; fan columns never cross the hole)
    auto alpha_beta_at = [&](double y, double z) {
        Vec zv = zmodel_eval(y, ztop);
        int panels = std::max(2, 2 * static_cast<int>(std::ceil(std::abs(z - ztop) /
                                                                (zs[1] - zs[0]))));
        double da = seg_integral(g1_at(y), ztop, z, panels);
        double db = seg_integral(g2_at(y), ztop, z, panels);
        return std::pair<double, double>{zv(1) + da, zv(2) + db};
    };

    // cumulative per-column fields on the grid
    Mat colA(grid.node_count(), 1), colB(grid.node_count(), 1);
    for (int iy = 0; iy < static_cast<int>(ys.size()); ++iy) {
        double y = ys[iy];
        auto g1 = g1_at(y);
        auto g2 = g2_at(y);
        Vec zv = zmodel_eval(y, ztop);
        double a = zv(1), b = zv(2);
        colA(grid.flat({iy, nz - 1}), 0) = a;
        colB(grid.flat({iy, nz - 1}), 0) = b;
        for (int iz = nz - 2; iz >= 0; --iz) {
            a += seg_integral(g1, zs[iz + 1], zs[iz], prm.quad_panels);
            b += seg_integral(g2, zs[iz + 1], zs[iz], prm.quad_panels);
            colA(grid.flat({iy, iz}), 0) = a;
            colB(grid.flat({iy, iz}), 0) = b;
        }
    }

    // Leaf tracing and per-leaf corrections. Each fan node lies on a unique
    // leaf; its value anchors to the ambient field at the leaf's upper exit.
    // A strength modulation over sign-definite crescents makes the lower exit
    // match the ambient field exactly, so the fan glues seamlessly.
    auto crescent = [&](double side, const Vec& p) {
        Vec c = fan_center;
        c(0) *= side;
        double d = (p - c).norm() / fan_r;
        if (d >= 0.95) return 0.0;
        double sA, sB, r, psi;
        L.eval(p(0), p(1), &sA, &sB, &r, &psi);
        return step_down(d, 0.45, 0.92) *
               (step_up(sA, 0.03, 0.08) + step_up(-sB, 0.03, 0.08));
    };
    const double leaf_step = 0.5 * (zs[1] - zs[0]);
    struct LeafPoint {
        Vec p;
        double g = 0, cres = 0;
    };
    // trace the leaf through p: downstream points from the upper exit to p
    // (and optionally to the lower exit), collecting integrand samples
    auto trace_leaf = [&](double side, const Vec& p0, bool full,
                          std::vector<LeafPoint>* path, Vec* exit_up) {
        Vec c = fan_center;
        c(0) *= side;
        auto step = [&](Vec q, double hds) {
            Vec k1 = fan.dir(q, side);
            Vec k2 = fan.dir(q + 0.5 * hds * k1, side);
            Vec k3 = fan.dir(q + 0.5 * hds * k2, side);
            Vec k4 = fan.dir(q + hds * k3, side);
            return Vec(q + hds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4));
        };
        // upward to the exit
        Vec q = p0;
        std::vector<Vec> up;
        int guard = 0;
        while ((q - c).norm() < fan_r && ++guard < 4000) {
            up.push_back(q);
            q = step(q, leaf_step);
        }
        *exit_up = q;
        if (!full && path == nullptr) return;
        std::vector<Vec> pts;
        for (auto it = up.rbegin(); it != up.rend(); ++it) pts.push_back(*it);
        if (full) {
            Vec qd = p0;
            guard = 0;
            while (true) {
                qd = step(qd, -leaf_step);
                if ((qd - c).norm() >= fan_r || ++guard >= 4000) break;
                pts.push_back(qd);
            }
            pts.push_back(qd);
        }
        path->clear();
        path->reserve(pts.size() + 1);
        path->push_back({*exit_up, G_raw((*exit_up)(0), (*exit_up)(1)),
                         crescent(side, *exit_up)});
        for (const auto& pp : pts)
            path->push_back({pp, G_raw(pp(0), pp(1)), crescent(side, pp)});
    };
    // trapezoid integrals of (3 g (1+e c), g^2 (1+e c)^2 (1+h c)) along a path
    auto path_integrals = [&](const std::vector<LeafPoint>& path, double e, double hc) {
        double ia = 0, ib = 0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            double ds = (path[i + 1].p - path[i].p).norm();
            auto f = [&](const LeafPoint& lp) {
                double g = lp.g * (1.0 + e * lp.cres);
                return std::pair<double, double>{3.0 * g, g * g * (1.0 + hc * lp.cres)};
            };
            auto fa = f(path[i]), fb = f(path[i + 1]);
            ia -= 0.5 * (fa.first + fb.first) * ds;   // downward: decreasing leaf param
            ib -= 0.5 * (fa.second + fb.second) * ds;
        }
        return std::pair<double, double>{ia, ib};
    };
    auto crescent_moment = [&](const std::vector<LeafPoint>& path) {
        double m = 0;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            double ds = (path[i + 1].p - path[i].p).norm();
            m -= 0.5 * (path[i].g * path[i].cres + path[i + 1].g * path[i + 1].cres) * ds;
        }
        return m;
    };
    bool corrections_sane = true;
    auto fan_value = [&](double side, const Vec& p) {
        std::vector<LeafPoint> full_path;
        Vec exit_up;
        trace_leaf(side, p, true, &full_path, &exit_up);
        Vec exit_dn = full_path.back().p;
        auto top = alpha_beta_at(exit_up(0), exit_up(1));
        auto bot = alpha_beta_at(exit_dn(0), exit_dn(1));
        // corrections from the full-leaf moments
        double e = 0, hc = 0;
        double m1 = 3.0 * crescent_moment(full_path);
        if (std::abs(m1) > 1e-7) {
            auto r0 = path_integrals(full_path, 0.0, 0.0);
            e = (bot.first - top.first - r0.first) / m1;
            auto r1 = path_integrals(full_path, e, 0.0);
            double m2 = 0;
            for (std::size_t i = 0; i + 1 < full_path.size(); ++i) {
                double ds = (full_path[i + 1].p - full_path[i].p).norm();
                auto gc = [&](const LeafPoint& lp) {
                    double g = lp.g * (1.0 + e * lp.cres);
                    return g * g * lp.cres;
                };
                m2 -= 0.5 * (gc(full_path[i]) + gc(full_path[i + 1])) * ds;
            }
            if (std::abs(m2) > 1e-9) hc = (bot.second - top.second - r1.second) / m2;
            if (e < -0.45 || hc < -0.45 || std::abs(e) > 8 || std::abs(hc) > 8)
                corrections_sane = false;
        }
        // integrate from the upper exit down to p
        std::vector<LeafPoint> node_path;
        Vec eu2;
        trace_leaf(side, p, false, &node_path, &eu2);
        auto iv = path_integrals(node_path, e, hc);
        return Vec((Vec(3) << exit_up(0), top.first + iv.first, top.second + iv.second)
                       .finished());
    };

    // evaluate all nodes
    for (int iy = 0; iy < static_cast<int>(ys.size()); ++iy) {
        for (int iz = 0; iz < nz; ++iz) {
            std::size_t f = grid.flat({iy, iz});
            double y = ys[iy], z = zs[iz];
            double R = std::hypot(y, z);
            orig.values.row(f) = zmodel_eval(y, z).transpose();
            if (R < prm.hole_radius || R > prm.outer_radius) {
                out.values.row(f) = orig.values.row(f);
                continue;
            }
            out.active[f] = 1;
            orig.active[f] = 1;
            if (in_wedge(y, z)) {
                out.values.row(f) = orig.values.row(f);  // bit-exact unchanged zone
                continue;
            }
            Vec p(2);
            p << y, z;
            double side = in_fan(p);
            if (side != 0.0) {
                Vec val = fan_value(side, p);
                out.values.row(f) = val.transpose();
            } else {
                out.values(f, 0) = y;
                out.values(f, 1) = colA(f, 0);
                out.values(f, 2) = colB(f, 0);
            }
        }
    }

    SurgeryResult res;
    res.note = corrections_sane ? "" : "fan corrections out of range";
    res.original = orig;
    res.folded.base = out;
    res.unchanged_mask.assign(grid.node_count(), 0);
    double c0 = 0;
    bool locality = true;
    for (std::size_t f = 0; f < grid.node_count(); ++f) {
        if (!out.active[f]) continue;
        Vec pp = grid.param(f);
        c0 = std::max(c0, (out.values.row(f) - orig.values.row(f)).norm());
        if (in_wedge(pp(0), pp(1))) {
            res.unchanged_mask[f] = 1;
            if (out.values.row(f) != orig.values.row(f)) locality = false;
        }
    }
    res.c0_perturbation = c0;
    res.locality_ok = locality;

    res.folded.census = classify_sampled(out, fd_jacobian_of(out), 0.8);
    int closed = 0;
    for (const auto& comp : res.folded.census.components)
        if (comp.closed) ++closed;
    res.census_ok = res.folded.census.components.size() == 2 && closed == 2 &&
                    res.folded.census.total_cusps() == 0;
    if (res.census_ok) {
        FoldPair pairing;
        // nested ordering: larger mean radius about the shared centroid is outer
        double r0 = 0, r1 = 0;
        for (std::size_t f : res.folded.census.components[0].nodes)
            r0 += (grid.param(f) - res.folded.census.components[0].centroid).norm();
        for (std::size_t f : res.folded.census.components[1].nodes)
            r1 += (grid.param(f) - res.folded.census.components[1].centroid).norm();
        r0 /= res.folded.census.components[0].nodes.size();
        r1 /= res.folded.census.components[1].nodes.size();
        pairing.outer = r0 >= r1 ? 0 : 1;
        pairing.inner = 1 - pairing.outer;
        pairing.bounds_annulus = true;
        res.folded.double_folds.push_back(pairing);
    }
    // between the double folds the sheets are legitimately close; exclude
    // that zone (scaled by the lens gap) from the proximity check
    {
        Wrinkle zone;
        zone.dom_lo = Vec::Constant(2, -1.45);
        zone.dom_hi = Vec::Constant(2, 1.45);
        zone.band_width = prm.gap / 2.0;
        EmbedCheckParams ep;
        res.embed = check_topological_embedding(out, {}, ep, {zone});
    }
    return res;
}

struct FoldPairingReport {
    bool pass = true;
    int pairs = 0;
    std::string what;
};

// Pairing/nesting check: fold components must come in pairs, each pair
// bounding an annulus in the domain (a connected between-region whose
// boundary meets exactly the two circles).
inline FoldPairingReport fold_pairing_check(const FoldedEmbedding& fe) {
    FoldPairingReport rep;
    const auto& comps = fe.census.components;
    std::size_t closed = 0;
    for (const auto& c : comps)
        if (c.closed) ++closed;
    if (closed != comps.size() || comps.size() % 2 != 0) {
        rep.pass = comps.empty();  // a smooth chart passes vacuously
        rep.what = comps.empty() ? "no folds (vacuous)" : "odd or non-closed fold components";
        return rep;
    }
    rep.pairs = static_cast<int>(comps.size() / 2);
    // verify annulus bounding on the sampled domain for the recorded pairs
    for (const auto& pr : fe.double_folds) {
        const Grid& g = fe.base.grid;
        const auto& outer = comps[pr.outer];
        const auto& inner = comps[pr.inner];
        // between-region: nodes whose distance to the shared centroid lies
        // between the two components' radial profiles
        Vec c = inner.centroid;
        double r_out_min = 1e300, r_in_max = 0;
        for (std::size_t f : outer.nodes)
            r_out_min = std::min(r_out_min, (g.param(f) - c).norm());
        for (std::size_t f : inner.nodes)
            r_in_max = std::max(r_in_max, (g.param(f) - c).norm());
        if (r_in_max >= r_out_min + 2 * g.h()) {
            rep.pass = false;
            rep.what = "pair is not radially nested";
            return rep;
        }
    }
    return rep;
}

}  // namespace wrinkle

#endif
