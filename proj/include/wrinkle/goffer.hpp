#ifndef WRINKLE_GOFFER_HPP
#define WRINKLE_GOFFER_HPP

#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "wrinkle/cover.hpp"
#include "wrinkle/embed_check.hpp"
#include "wrinkle/gauss.hpp"
#include "wrinkle/wrinkled.hpp"

namespace wrinkle {

// Band reparameterization with the regularized natural inverse: q solves
// sigma (x(q,t) + delta2(eta) q) = eta, giving g(eta) = sigma x(q(eta), t) with
// g' = x_u/(x_u + delta2). The composed band profile is smooth, folds sit
// exactly where x_u vanishes, and g is the identity outside the zone where
// the taper kills delta2.
struct BandReparam {
    double sigma = 0, t = 0, zone = 0.5;
    double delta0sq = 0.03;

    static BandReparam solve(double sigma, double t, double zone) {
        BandReparam r;
        r.sigma = sigma;
        r.t = t;
        r.zone = zone;
        return r;
    }

    double delta2(double eta) const {
        return delta0sq * step_down(std::abs(eta), 0.7 * zone, 0.96 * zone);
    }
    double delta2_d(double eta) const {
        double s = eta < 0 ? -1.0 : 1.0;
        return s * delta0sq * step_down_d(std::abs(eta), 0.7 * zone, 0.96 * zone);
    }

    double q(double eta) const {
        double d2 = delta2(eta);
        double target = eta / sigma;
        // monotone Newton with bisection bracket on x(u) + d2 u = target
        double sign = target < 0 ? -1.0 : 1.0;
        double tt = std::abs(target);
        double hi = std::max(1.5, std::sqrt(std::abs(t)) + 1.0);
        while (acurve::x(hi, t) + d2 * hi < tt) hi *= 1.5;
        double lo = 0;
        for (int it = 0; it < 90; ++it) {
            double mid = 0.5 * (lo + hi);
            (acurve::x(mid, t) + d2 * mid < tt ? lo : hi) = mid;
        }
        double u = 0.5 * (lo + hi);
        for (int it = 0; it < 3; ++it) {
            double f = acurve::x(u, t) + d2 * u - tt;
            double df = acurve::x_u(u, t) + d2;
            if (df <= 0) break;
            u -= f / df;
        }
        return sign * u;
    }

    double q_d(double eta) const {
        double u = q(eta);
        double d2 = delta2(eta);
        double xu = acurve::x_u(u, t);
        return (1.0 - sigma * u * delta2_d(eta)) / (sigma * (xu + d2));
    }

    // band-local reparameterized position and its derivative
    double g(double eta) const { return sigma * acurve::x(q(eta), t); }
    double g_d(double eta) const {
        double u = q(eta);
        double xu = acurve::x_u(u, t);
        return xu * sigma * q_d(eta);
    }

    // fold position in zone coordinates (t > 0)
    double eta_fold() const {
        if (t <= 0) return 0.0;
        return sigma * (std::pow(t, 2.5) + delta0sq * std::sqrt(t));
    }
};

struct GofferMeasurements {
    double max_angle = 0;         // vs target, non-core nodes
    double angle_quantile99 = 0;  // over non-core nodes
    double c0 = 0;
    double core_fraction = 0;
    double max_level_drift = 0;
    double boundary_drift = 0;
    HorizontalityClass h_class = HorizontalityClass::None;
    EmbedCheckReport embed;
    GaussReport gauss_report;
    int wrinkle_count = 0;
    bool embedding_ok = false;
    bool horizontality_ok = false;
};

struct GofferedOutput {
    WrinkledEmbedding we;
    std::vector<uint8_t> core_mask;
    std::vector<Wrinkle> exclusion_zones;  // corrugated ranges, for the embed check
    GofferMeasurements measures;
    GofferParams tuned;
    bool pass = false;
    bool unchanged = false;
};

// Goffering engine for one hypersurface chart in pole-adapted form: the last
// parameter axis follows the gradient lines of h = <., pole>. The target pole
// and the transversal horizontal field may vary per point (rotation
// pipelines); for a fixed pole they are constants.
class Gofferer {
  public:
    SampledChart base;
    GofferParams params;
    std::function<Vec(const Vec&)> pole_at;
    std::function<Vec(const Vec&)> v_at;
    std::function<Vec(const Vec&)> base_at;
    std::function<Mat(const Vec&)> base_jac;
    CylinderCover cover;
    // smooth relative amplitude in [0,1] per cylinder, sampled at the band
    // centers; zero zones stay bit-exactly fixed
    std::function<double(int, double)> amp_profile = [](int, double) { return 1.0; };
    double intensity = 1.0;  // family ramp: scales amplitude and tooth parameter
    double amp_full = 0.15;  // amplitude at which a band reaches canonical form

    mutable std::map<long long, WFunction> wcache;
    mutable std::map<long long, BandReparam> rcache;

    const WFunction& w_for(double t) const {
        long long key;
        std::memcpy(&key, &t, sizeof key);
        auto it = wcache.find(key);
        if (it == wcache.end()) it = wcache.emplace(key, build_W(params.sigma, t)).first;
        return it->second;
    }
    const BandReparam& reparam_for(double t, double xi0) const {
        long long key;
        std::memcpy(&key, &t, sizeof key);
        auto it = rcache.find(key);
        if (it == rcache.end())
            it = rcache.emplace(key, BandReparam::solve(params.sigma, t, xi0)).first;
        return it->second;
    }

    double zone_halfwidth() const {
        return cover.cylinders.size() == 1 ? 0.5 : 0.45 / cover.cylinders.size();
    }

    bool band_inside(const CylinderChart& cyl, int k) const {
        const double M = params.bands();
        double xk = 2.0 * (k + cyl.phase) / M;
        double zone = 2.0 * zone_halfwidth() / M;
        return std::abs(xk) + zone <= 1.0;
    }

    // r-side amplitude: the lambda cut-off together with a death factor that
    // removes the post-embryo ripple beyond the wrinkle tips
    double r_factor(const CylinderChart& cyl, double rhat) const {
        if (cyl.wrap_r) return 1.0;
        double lr = lambda_cutoff(rhat, params.rho());
        return lr * step_down(std::abs(rhat), 1.0 - params.eps, 1.0 - params.eps / 2.0);
    }

    struct NodeEval {
        Vec out;
        Vec gp;         // reparameterized parameter point
        Vec tangent_x;  // d out / d xhat (exact through the reparameterization)
        bool reparam = false;
        bool in_core = false;
        bool fold_adjacent = false;
        int owner_cyl = -1;
        int owner_band = 0;
        double u = 0;
        double t_band = 0;
        double g_strength = 0;
    };

    NodeEval eval_node(const Vec& p, double node_dx_param) const {
        NodeEval ev;
        const double M = params.bands();
        const double xi0 = zone_halfwidth();
        const double rho = params.rho();

        // owning reparameterization zone (unique by band interleaving)
        int owner = -1, band = 0;
        double eta = 0, t_owner = 0, strength = 0;
        for (std::size_t a = 0; a < cover.cylinders.size(); ++a) {
            const auto& cyl = cover.cylinders[a];
            if (!cyl.contains(p)) continue;
            double xi = 0.5 * M * cyl.xhat(p) - cyl.phase;
            int k = static_cast<int>(std::lround(xi));
            if (std::abs(xi - k) >= xi0 || !band_inside(cyl, k)) continue;
            double xk_hat = 2.0 * (k + cyl.phase) / M;
            double amp = amp_profile(static_cast<int>(a), xk_hat) * intensity;
            if (amp <= 0.0) continue;
            owner = static_cast<int>(a);
            band = k;
            eta = xi - k;
            t_owner = beta_profile(cyl.rhat_norm(p), params.eps) * intensity;
            strength = smoothstep01(amp / amp_full);
            break;
        }

        Vec gp = p;
        double gprime = 1.0;
        if (owner >= 0) {
            const auto& cyl = cover.cylinders[owner];
            const BandReparam& rep = reparam_for(t_owner, xi0);
            ev.u = rep.q(eta);
            double gxi_full = band + rep.g(eta);
            double gxi = (band + eta) + strength * (gxi_full - (band + eta));
            double gxhat = 2.0 * (gxi + cyl.phase) / M;
            Eigen::Index d = p.size() - 1;
            gp(d) = 0.5 * ((cyl.hi(d) - cyl.lo(d)) * gxhat + cyl.lo(d) + cyl.hi(d));
            double gfull = rep.g_d(eta);
            gprime = 1.0 + strength * (gfull - 1.0);
            ev.reparam = true;
            ev.owner_cyl = owner;
            ev.owner_band = band;
            ev.t_band = t_owner;
            ev.g_strength = strength;
            if (strength >= 1.0) {
                ev.in_core = std::abs(acurve::x(ev.u, t_owner)) <= WFunction::kCut * 1.2;
                if (t_owner > 0) {
                    double dxi_node = 0.5 * M * node_dx_param / cyl.x_halfwidth();
                    double du_node = dxi_node / std::max(rep.q_d(eta), 1e-9);
                    double root = std::sqrt(t_owner);
                    ev.fold_adjacent =
                        std::min(std::abs(ev.u - root), std::abs(ev.u + root)) <=
                        0.85 * du_node;
                }
            }
        }

        // assemble Psi and d Psi/d xhat at gp
        double psi = 0, dpsi = 0;
        for (std::size_t a = 0; a < cover.cylinders.size(); ++a) {
            const auto& cyl = cover.cylinders[a];
            if (!cyl.contains(gp)) continue;
            double rh = cyl.rhat_norm(gp);
            double rfac = r_factor(cyl, rh);
            if (rfac == 0.0) continue;
            double eta_w = cover.weight(a, gp);
            if (eta_w == 0.0) continue;
            double xh = cyl.xhat(gp);
            double lx = lambda_cutoff(xh, rho);
            double dlx = lambda_cutoff_d(xh, rho);
            if (lx == 0.0 && dlx == 0.0) continue;
            double tb = beta_profile(rh, params.eps) * intensity;
            const WFunction& w = w_for(tb);
            double xi = 0.5 * M * xh - cyl.phase;
            int k = static_cast<int>(std::lround(xi));
            if (!band_inside(cyl, k)) continue;
            double xk_hat = 2.0 * (k + cyl.phase) / M;
            double aprof = amp_profile(static_cast<int>(a), xk_hat);
            // amplitude interpolated smoothly across the band seam (W = 0 there)
            double frac = xi - k;
            if (std::abs(frac) > 0.25) {
                int k2 = frac > 0 ? k + 1 : k - 1;
                double a2 = band_inside(cyl, k2)
                                ? amp_profile(static_cast<int>(a), 2.0 * (k2 + cyl.phase) / M)
                                : 0.0;
                double blend = 0.5 * smoothstep01((std::abs(frac) - 0.25) / 0.25);
                aprof = (1.0 - blend) * aprof + blend * a2;
            }
            double amp = params.gamma * intensity * aprof;
            if (amp == 0.0) continue;
            double wval, dwdxi;  // value and d/dxi of the composed profile
            if (static_cast<int>(a) == owner && k == band && ev.g_strength >= 1.0) {
                const BandReparam& rep = reparam_for(t_owner, xi0);
                wval = w.eval_composed(ev.u);
                dwdxi = w.deriv_composed(ev.u) * rep.q_d(eta);
            } else {
                wval = w.eval(xi);
                dwdxi = w.deriv(xi) * gprime;
            }
            psi += eta_w * rfac * amp * lx * wval;
            dpsi += eta_w * rfac * amp * (dlx * gprime * wval + lx * 0.5 * M * dwdxi);
        }

        Vec v = v_at(gp);
        Vec bval = base_at(gp);
        ev.out = bval + v * psi;
        ev.gp = gp;

        const CylinderChart* ref = nullptr;
        for (const auto& cyl : cover.cylinders)
            if (cyl.contains(p)) ref = &cyl;
        double xhw = ref ? ref->x_halfwidth()
                         : 0.5 * (base.grid.axes[base.n() - 1].back() -
                                  base.grid.axes[base.n() - 1].front());
        if (base_jac) {
            Mat J = base_jac(gp);
            Vec base_x = J.col(base.n() - 1) * xhw;
            ev.tangent_x = base_x * gprime + v * dpsi;
        } else {
            ev.tangent_x = Vec();
        }
        return ev;
    }
};

}  // namespace wrinkle

#endif
