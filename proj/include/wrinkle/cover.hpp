#ifndef WRINKLE_COVER_HPP
#define WRINKLE_COVER_HPP

#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wrinkle/acurve.hpp"
#include "wrinkle/chart.hpp"
#include "wrinkle/gauss.hpp"
#include "wrinkle/smooth.hpp"

namespace wrinkle {

// Construction constants of the goffering engine.
struct GofferParams {
    double eps = 0.2;    // target horizontality (rad)
    int N = 16;          // wrinkles per cylinder axis; 2N+1 bands per unit
    double sigma = 0.1;  // band core parameter, in (0, 1/8)
    double gamma = 0.25; // displacement amplitude
    int K = 1;           // cylinder count
    int N_max = 512;     // tuning budget
    int frames = 33;     // family sampling
    bool auto_tune = true;

    int bands() const { return 2 * N + 1; }
    double rho() const { return std::min(1.0 / (2.0 * N), eps / 2.0); }

    void check() const {
        if (!(sigma > 0 && sigma < 0.125))
            throw std::invalid_argument("GofferParams: sigma must lie in (0, 1/8)");
        if (eps <= 0 || gamma <= 0 || N < 1 || K < 1 || frames < 2)
            throw std::invalid_argument("GofferParams: invalid constants");
    }
};

// Wrinkle-amplitude profile in the level directions: 1 on the cylinder core,
// a monotone quintic blend on (1-3eps, 1-2eps), then 1-r-eps (reaching -eps
// at the cylinder edge, where wrinkles are dead).
inline double beta_profile(double r_abs, double eps) {
    double r = std::abs(r_abs);
    if (r <= 1.0 - 3.0 * eps) return 1.0;
    if (r >= 1.0 - 2.0 * eps) return 1.0 - r - eps;
    // quintic Hermite from (1, slope 0) to (eps, slope -1)
    double tau = (r - (1.0 - 3.0 * eps)) / eps;
    double h00 = 1.0 + tau * tau * tau * (-10.0 + tau * (15.0 - 6.0 * tau));
    double h01 = tau * tau * tau * (10.0 + tau * (-15.0 + 6.0 * tau));
    double h11 = tau * tau * tau * (tau * (tau - 2.0) + 1.0) * 1.0;  // t^3(t-1)^2
    return h00 * 1.0 + h01 * eps + h11 * eps * (-1.0);
}

// Cut-off equal to 1 on [0, 1-rho] and 0 on [1-rho/2, 1].
inline double lambda_cutoff(double x_abs, double rho) {
    return step_down(std::abs(x_abs), 1.0 - rho, 1.0 - rho / 2.0);
}
inline double lambda_cutoff_d(double x_abs, double rho) {
    double s = x_abs < 0 ? -1.0 : 1.0;
    return s * step_down_d(std::abs(x_abs), 1.0 - rho, 1.0 - rho / 2.0);
}

// A cylindrical set: an axis-aligned parameter box whose last axis follows
// the gradient lines of the height function. phase staggers the wrinkle
// bands of overlapping cylinders so their cores stay pairwise disjoint.
struct CylinderChart {
    Vec lo, hi;
    double phase = 0;   // in band units
    bool special = false;
    bool wrap_r = false;  // closed level axis: no wrinkle death in r

    bool contains(const Vec& p) const {
        for (Eigen::Index d = 0; d < p.size(); ++d)
            if (p(d) < lo(d) || p(d) > hi(d)) return false;
        return true;
    }
    // normalized coordinates in [-1, 1]
    double xhat(const Vec& p) const {
        Eigen::Index d = p.size() - 1;
        return (2.0 * p(d) - lo(d) - hi(d)) / (hi(d) - lo(d));
    }
    double rhat_norm(const Vec& p) const {
        if (wrap_r) return 0.0;
        double s = 0;
        for (Eigen::Index d = 0; d + 1 < p.size(); ++d) {
            double r = (2.0 * p(d) - lo(d) - hi(d)) / (hi(d) - lo(d));
            s += r * r;
        }
        return std::sqrt(s);
    }
    double x_halfwidth() const {
        Eigen::Index d = lo.size() - 1;
        return 0.5 * (hi(d) - lo(d));
    }
};

struct CylinderCover {
    std::vector<CylinderChart> cylinders;
    double shrink = 0.8;  // plateau fraction of the partition bumps

    // partition weight of cylinder alpha at parameter point p (level axes only)
    double weight(std::size_t alpha, const Vec& p) const {
        double total = 0, mine = 0;
        for (std::size_t a = 0; a < cylinders.size(); ++a) {
            double b = bump(a, p);
            total += b;
            if (a == alpha) mine = b;
        }
        if (total <= 0) return 0;
        return mine / total;
    }

    double weight_sum(const Vec& p) const {
        double total = 0;
        for (std::size_t a = 0; a < cylinders.size(); ++a) total += bump(a, p);
        return total > 0 ? 1.0 : 0.0;
    }

    double bump(std::size_t alpha, const Vec& p) const {
        const auto& c = cylinders[alpha];
        if (!c.contains(p)) return 0;
        if (c.wrap_r) return 1.0;
        double v = 1.0;
        for (Eigen::Index d = 0; d + 1 < p.size(); ++d) {
            double r = std::abs((2.0 * p(d) - c.lo(d) - c.hi(d)) / (c.hi(d) - c.lo(d)));
            v *= step_down(r, shrink, 1.0);
        }
        return v;
    }
};

struct CoverReport {
    bool ok = true;
    std::string error;
    int min_k_estimate = 0;
    std::vector<std::size_t> critical_nodes;
};

// Covering of the active chart region by K overlapping special cylinders.
// Requires the height function h = <value, pole> to be free of critical
// points on the active region (neighbourhoods of the critical set must be
// cut beforehand) and increasing along the last parameter axis.
inline CylinderCover build_cylindrical_cover(const SampledChart& S, const Vec& pole,
                                             const GofferParams& params, CoverReport* report,
                                             double x_margin = 0.0, double r_margin = 0.0) {
    CoverReport rep;
    CylinderCover cover;
    const Grid& g = S.grid;
    const int n = S.n();

    // critical points of h on the chart: nodes where the tangent plane is
    // horizontal would make gradient lines degenerate
    std::vector<GrassPoint> field;
    auto gauss_rep = gauss_map(S, field);
    const double crit_tol = std::max(1e-9, 0.02 * g.h());
    for (std::size_t f = 0; f < S.node_count(); ++f) {
        if (!S.is_active(f) || S.is_boundary(f)) continue;
        if (field[f].frame.size() == 0) {
            rep.critical_nodes.push_back(f);  // degenerate parameterization
            continue;
        }
        Mat T = field[f].frame;
        Vec hgrad = T.transpose() * pole;  // gradient of h along the surface
        if (hgrad.norm() < crit_tol) rep.critical_nodes.push_back(f);
    }
    (void)gauss_rep;
    if (!rep.critical_nodes.empty()) {
        rep.ok = false;
        rep.error = "height function has critical points on the chart; cut their neighbourhoods";
        if (report) *report = rep;
        return cover;
    }

    // monotone alignment of the last axis with the gradient direction
    for (std::size_t f = 0; f < S.node_count(); ++f) {
        if (!S.is_active(f)) continue;
        auto idx = g.unflat(f);
        int d = n - 1;
        if (idx[d] + 1 >= static_cast<int>(g.axes[d].size())) continue;
        auto j = idx;
        j[d] += 1;
        std::size_t fj = g.flat(j);
        if (!S.is_active(fj)) continue;
        double dh = (S.value(fj) - S.value(f)).dot(pole);
        if (dh <= 0) {
            rep.ok = false;
            rep.error = "chart x-axis is not aligned with the gradient lines of h";
            if (report) *report = rep;
            return cover;
        }
    }

    const int K = params.K;
    double xlo = g.axes[n - 1].front() + x_margin;
    double xhi = g.axes[n - 1].back() - x_margin;
    if (n == 1) {
        for (int a = 0; a < K; ++a) {
            CylinderChart c;
            c.lo = Vec::Constant(1, xlo);
            c.hi = Vec::Constant(1, xhi);
            c.phase = static_cast<double>(a) / K;
            c.special = true;
            cover.cylinders.push_back(c);
        }
    } else if (g.is_periodic(0)) {
        // closed level circles: a single wrapped cylinder covers them
        for (int a = 0; a < K; ++a) {
            CylinderChart c;
            c.lo = Vec::Zero(n);
            c.hi = Vec::Zero(n);
            c.lo(0) = g.axes[0].front();
            c.hi(0) = g.axes[0].back() + (g.axes[0][1] - g.axes[0][0]);
            c.lo(n - 1) = xlo;
            c.hi(n - 1) = xhi;
            c.phase = static_cast<double>(a) / K;
            c.special = true;
            c.wrap_r = true;
            cover.cylinders.push_back(c);
        }
    } else {
        double rlo = g.axes[0].front() + r_margin;
        double rhi = g.axes[0].back() - r_margin;
        // overlapping slabs: width chosen so the shrunk cores still cover
        double span = rhi - rlo;
        double width = span / std::max(1.0, K - (K - 1) * (1.0 - cover.shrink) / 2.0);
        for (int a = 0; a < K; ++a) {
            CylinderChart c;
            c.lo = Vec::Zero(n);
            c.hi = Vec::Zero(n);
            double center = K == 1 ? 0.5 * (rlo + rhi)
                                   : rlo + width / 2 + (span - width) * a / (K - 1);
            c.lo(0) = center - width / 2;
            c.hi(0) = center + width / 2;
            c.lo(n - 1) = xlo;
            c.hi(n - 1) = xhi;
            c.phase = static_cast<double>(a) / K;
            c.special = true;
            cover.cylinders.push_back(c);
        }
        // shrunk cylinders must still cover the reachable slab range
        double edge = (1.0 - cover.shrink) * width / 2.0;
        for (double r = rlo + edge + 1e-9; r < rhi - edge; r += span / 512.0) {
            bool covered = false;
            for (int a = 0; a < K; ++a) {
                const auto& c = cover.cylinders[a];
                double rr = std::abs((2.0 * r - c.lo(0) - c.hi(0)) / (c.hi(0) - c.lo(0)));
                if (rr <= cover.shrink) covered = true;
            }
            if (!covered) {
                rep.ok = false;
                rep.error = "shrunk cylinders do not cover the surface";
                rep.min_k_estimate = K + 1;
                if (report) *report = rep;
                return cover;
            }
        }
    }
    if (report) *report = rep;
    return cover;
}

// The displacement-time field tau(r, x) of one cylinder, in normalized
// cylinder coordinates. Band centers sit at x_k = 2k/(2N+1) with cores of
// half-width 4 sigma/(2N+1); W is evaluated at (2N+1)x/2 - phase.
struct TauField {
    GofferParams params;
    double phase = 0;
    double t_scale = 1.0;      // time-family intensity
    double amp_scale = 1.0;
    mutable std::map<long long, WFunction> wcache;

    const WFunction& w_for(double t) const {
        long long key;
        static_assert(sizeof(double) == sizeof(long long));
        std::memcpy(&key, &t, sizeof key);
        auto it = wcache.find(key);
        if (it == wcache.end())
            it = wcache.emplace(key, build_W(params.sigma, t)).first;
        return it->second;
    }

    double t_at(double rhat) const { return beta_profile(rhat, params.eps) * t_scale; }

    double eval(double rhat, double xhat) const {
        double rho = params.rho();
        double lx = lambda_cutoff(xhat, rho);
        double lr = lambda_cutoff(rhat, rho);
        if (lx == 0.0 || lr == 0.0) return 0.0;
        const WFunction& w = w_for(t_at(rhat));
        double xi = 0.5 * params.bands() * xhat - phase;
        return params.gamma * amp_scale * lx * lr * w.eval(xi);
    }

    double deriv_x(double rhat, double xhat) const {
        double rho = params.rho();
        double lr = lambda_cutoff(rhat, rho);
        if (lr == 0.0) return 0.0;
        const WFunction& w = w_for(t_at(rhat));
        double xi = 0.5 * params.bands() * xhat - phase;
        double lx = lambda_cutoff(xhat, rho);
        double dlx = lambda_cutoff_d(xhat, rho);
        return params.gamma * amp_scale * lr *
               (dlx * w.eval(xi) + lx * 0.5 * params.bands() * w.deriv(xi));
    }
};

struct FlowResult {
    SampledChart out;
    double max_level_drift = 0;
    bool ok = true;
    std::size_t offending_node = 0;
};

// I^tau_S: transport each sample along the flow of v for time tau(node).
// v must be horizontal (tangent to the level sets of h); h is measured along
// the pole direction. RK4 with step <= h_grid/4.
inline FlowResult flow_transport(const SampledChart& S, const Vec& pole,
                                 const std::function<Vec(const Vec&)>& v,
                                 const std::vector<double>& tau, double tube_radius = 1e30) {
    FlowResult res;
    res.out = S;
    if (tau.size() != S.node_count())
        throw std::invalid_argument("flow_transport: tau size mismatch");
    const double step_cap = S.grid.h() / 4.0;
    for (std::size_t f = 0; f < S.node_count(); ++f) {
        double T = tau[f];
        if (std::abs(T) > 1.0) throw std::invalid_argument("flow_transport: |tau| must be <= 1");
        if (T == 0.0) continue;
        Vec p = S.value(f);
        double h0 = p.dot(pole);
        int steps = std::max(1, static_cast<int>(std::ceil(std::abs(T) / step_cap)));
        double dt = T / steps;
        for (int s = 0; s < steps; ++s) {
            Vec k1 = v(p);
            Vec k2 = v(p + 0.5 * dt * k1);
            Vec k3 = v(p + 0.5 * dt * k2);
            Vec k4 = v(p + dt * k3);
            p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if ((p - S.value(f)).norm() > tube_radius) {
            res.ok = false;
            res.offending_node = f;
            return res;
        }
        res.max_level_drift = std::max(res.max_level_drift, std::abs(p.dot(pole) - h0));
        res.out.values.row(f) = p.transpose();
    }
    return res;
}

}  // namespace wrinkle

#endif
