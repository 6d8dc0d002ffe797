#ifndef WRINKLE_REGULARIZE_HPP
#define WRINKLE_REGULARIZE_HPP

#include <cmath>
#include <limits>

#include "wrinkle/chart.hpp"
#include "wrinkle/models.hpp"
#include "wrinkle/smooth.hpp"

namespace wrinkle {

// Canonical wrinkle chart domain: box [-1.5,1.5]^n with the annulus
// 0.5 <= |p| <= 1.5 active.
inline SampledChart canonical_chart(const SingularityModel& model, int nodes_per_axis,
                                    bool annulus_mask = true) {
    model.check();
    const int n = model.n;
    Grid g = Grid::uniform(std::vector<std::pair<double, double>>(n, {-1.5, 1.5}),
                           std::vector<int>(n, nodes_per_axis));
    SampledChart c = SampledChart::sample(g, model.target, [&](const Vec& p) {
        ModelPoint mp;
        mp.y = p.head(n - 1);
        mp.z = p(n - 1);
        mp.x.resize(0);
        return eval_model(model, mp);
    });
    if (annulus_mask) {
        c.active.assign(c.node_count(), 0);
        for (std::size_t i = 0; i < c.node_count(); ++i) {
            double r = g.param(i).norm();
            if (r >= 0.5 && r <= 1.5) c.active[i] = 1;
        }
    }
    return c;
}

struct RegularizeResult {
    SampledChart output;
    bool feasible = false;
    double achieved_c1 = 0;       // max over nodes of value and first-difference deviation
    double min_dz_u = 0;          // min over active nodes of dz(u~)
    double min_rank_ratio = 0;    // min over active nodes of s_min/s_max of the differential
    double min_achievable_delta = 0;  // reported when infeasible
};

namespace detail {

struct RegularizePerturbation {
    bool preserve = false;
    double a_shear = 0;   // default mode: u~ = u + a_shear * z
    double a1 = 0;        // preserve mode: a1 * q * z
    double a2 = 0;        //                a2 * z * chi(z)
    double r0 = 0.1;

    double chi(double z) const { return even_cutoff(z, r0 / 2.0, r0); }
    double chi_d(double z) const { return even_cutoff_d(z, r0 / 2.0, r0); }

    double value(double q, double z) const {
        if (!preserve) return a_shear * z;
        return a1 * q * z + a2 * z * chi(z);
    }
    // partial in z at fixed y (dq/dz = 2z)
    double dz(double q, double z) const {
        if (!preserve) return a_shear;
        return a1 * (q + 2.0 * z * z) + a2 * (chi(z) + z * chi_d(z));
    }
    // partial in y_i (dq/dy_i = 2 y_i)
    double dyi(double yi, double z) const {
        if (!preserve) return 0.0;
        return a1 * 2.0 * yi * z;
    }
};

}  // namespace detail

// Regularize the wrinkle chart of Z(n,m) by replacing the unfolding function
// u with a C1-close u~ having dz(u~) > 0 across the chart. In preserve mode
// the perturbation vanishes on the fold sphere outside the r0-neighborhood
// of the cusp equator, so those corner points keep their images.
inline RegularizeResult regularize(const SingularityModel& model, const SampledChart& chart,
                                   double delta, bool preserve_twofold, double r0 = 0.1) {
    model.check();
    if (model.kind != ModelKind::WrinkleEmbeddingZ)
        throw std::invalid_argument("regularize: expects the wrinkled-embedding model Z(n,m)");
    const int n = model.n;
    const Grid& g = chart.grid;

    detail::RegularizePerturbation pert;
    pert.r0 = r0;
    if (preserve_twofold) {
        pert.preserve = true;
        // Positivity floors derived from the zone analysis:
        //   |z| <= r0/2      : floor = a2 - a1^2/4
        //   r0/2 < |z| < r0  : floor = a1 r0^2/2 - a1^2/4 - |z chi'| a2
        //   |z| >= r0        : floor = 2 a1 r0^2 - a1^2/4
        // Optimized at a1 = r0^2/3.9, a2 = a1 r0^2 / 7.8.
        pert.a1 = std::min(r0 * r0 / 3.9, delta / 20.0);
        pert.a2 = pert.a1 * r0 * r0 / 7.8;
    } else {
        double dz_min_unperturbed = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            if (!chart.is_active(i)) continue;
            Vec p = g.param(i);
            double q = p.squaredNorm() - 1.0;
            dz_min_unperturbed = std::min(dz_min_unperturbed, q * q);
        }
        if (std::isinf(delta))
            pert.a_shear = dz_min_unperturbed > 0 ? 0.0 : 0.5;
        else
            pert.a_shear = delta / 2.0;
    }

    RegularizeResult res;
    res.output = chart;
    const int ucomp = n;  // unfolding coordinate index in the image

    double dev_val = 0, dev_dz = 0, dev_dy = 0;
    res.min_dz_u = std::numeric_limits<double>::infinity();
    res.min_rank_ratio = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < g.node_count(); ++i) {
        Vec p = g.param(i);
        ModelPoint mp;
        mp.y = p.head(n - 1);
        mp.z = p(n - 1);
        mp.x.resize(0);
        double q = p.squaredNorm() - 1.0;
        double dv = pert.value(q, mp.z);
        res.output.values(i, ucomp) += dv;
        if (!chart.is_active(i)) continue;

        dev_val = std::max(dev_val, std::abs(dv));
        double ddz = pert.dz(q, mp.z);
        dev_dz = std::max(dev_dz, std::abs(ddz));
        double dzu = detail::unfolding_dz(mp.z, mp.y.squaredNorm() - 1.0) + ddz;
        res.min_dz_u = std::min(res.min_dz_u, dzu);

        Mat J = model_jacobian(model, mp);
        for (int k = 0; k < n - 1; ++k) {
            double dy = pert.dyi(mp.y(k), mp.z);
            dev_dy = std::max(dev_dy, std::abs(dy));
            J(ucomp, k) += dy;
        }
        J(ucomp, n - 1) += ddz;
        Eigen::JacobiSVD<Mat> svd(J);
        const auto& sv = svd.singularValues();
        res.min_rank_ratio = std::min(res.min_rank_ratio, sv(sv.size() - 1) / sv(0));
    }

    res.achieved_c1 = std::max({dev_val, dev_dz, dev_dy});
    bool rank_ok = res.min_rank_ratio > kRankTol && res.min_dz_u > 0;
    bool c1_ok = std::isinf(delta) || res.achieved_c1 <= delta;
    res.feasible = rank_ok && c1_ok;
    if (!res.feasible) res.min_achievable_delta = 2.0 * res.achieved_c1;
    return res;
}

}  // namespace wrinkle

#endif
