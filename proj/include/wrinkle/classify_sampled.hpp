#ifndef WRINKLE_CLASSIFY_SAMPLED_HPP
#define WRINKLE_CLASSIFY_SAMPLED_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "wrinkle/chart.hpp"
#include "wrinkle/gauss.hpp"
#include "wrinkle/grassmann.hpp"

namespace wrinkle {

// Census of the singular set of a sampled map: near-singular nodes are
// clustered into components; each component is traced for closedness and
// scanned for kernel/locus tangencies (cusp candidates).
struct SingularComponent {
    std::vector<std::size_t> nodes;
    bool closed = false;
    int cusp_candidates = 0;
    Vec centroid;
};

struct SampledCensus {
    std::vector<SingularComponent> components;
    std::vector<uint8_t> flagged;  // per node
    double rank_threshold = 0;

    int fold_circles() const {
        int c = 0;
        for (const auto& comp : components)
            if (comp.closed && comp.cusp_candidates == 0) ++c;
        return c;
    }
    int total_cusps() const {
        int c = 0;
        for (const auto& comp : components) c += comp.cusp_candidates;
        return c;
    }
};

// rank_factor: flag a node when s_min/s_max < rank_factor * h (cell-scaled;
// the exact zero set crosses within a cell of flagged nodes).
inline SampledCensus classify_sampled(const SampledChart& chart,
                                      const std::function<Mat(std::size_t)>& jac,
                                      double rank_factor = 1.5,
                                      double tangency_angle = 0.45) {
    SampledCensus census;
    const Grid& g = chart.grid;
    const double h = g.h();
    census.rank_threshold = rank_factor * h;
    const std::size_t nn = chart.node_count();
    census.flagged.assign(nn, 0);
    std::vector<Vec> kernels(nn);

    // orientation vector per node: the tangent for curves, the raw normal
    // (cross product of the tangents) for surface charts in R^3
    std::vector<Vec> orient(nn);
    for (std::size_t f = 0; f < nn; ++f) {
        if (!chart.is_active(f)) continue;
        Mat J = jac(f);
        if (J.size() == 0) continue;
        if (chart.n() == 1)
            orient[f] = J.col(0);
        else if (chart.n() == 2 && chart.m == 3)
            orient[f] = detail::oriented_normal_from_tangents(J);
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv(0) <= 0) continue;
        double ratio = sv(sv.size() - 1) / sv(0);
        if (orient[f].size() == 0 && ratio < census.rank_threshold) census.flagged[f] = 1;
        if (ratio < 0.35) kernels[f] = svd.matrixV().col(sv.size() - 1);
    }
    // folds reverse the orientation vector: flag the endpoints of every
    // grid edge across which it flips
    if (!orient.empty()) {
        for (std::size_t f = 0; f < nn; ++f) {
            if (orient[f].size() == 0) continue;
            auto idx = g.unflat(f);
            for (int d = 0; d < g.dim(); ++d) {
                auto j = idx;
                int count = static_cast<int>(g.axes[d].size());
                j[d] += 1;
                if (g.is_periodic(d))
                    j[d] %= count;
                else if (j[d] >= count)
                    continue;
                std::size_t fj = g.flat(j);
                if (orient[fj].size() == 0) continue;
                if (orient[f].dot(orient[fj]) < 0) {
                    // flag the endpoint with the weaker differential
                    double na = orient[f].norm(), nb = orient[fj].norm();
                    census.flagged[na <= nb ? f : fj] = 1;
                }
            }
        }
    }

    // cluster by grid adjacency (8-neighbourhood in 2d, 2 in 1d)
    std::vector<int> comp_of(nn, -1);
    auto neighbors = [&](std::size_t f) {
        std::vector<std::size_t> out;
        auto idx = g.unflat(f);
        int n = g.dim();
        std::vector<int> d(n, -1);
        while (true) {
            auto j = idx;
            bool ok = true, self = true;
            for (int k = 0; k < n; ++k) {
                j[k] += d[k];
                if (d[k] != 0) self = false;
                int count = static_cast<int>(g.axes[k].size());
                if (g.is_periodic(k))
                    j[k] = (j[k] + count) % count;
                else if (j[k] < 0 || j[k] >= count)
                    ok = false;
            }
            if (ok && !self) out.push_back(g.flat(j));
            int k = 0;
            while (k < n && d[k] == 1) d[k++] = -1;
            if (k == n) break;
            ++d[k];
        }
        return out;
    };

    for (std::size_t f = 0; f < nn; ++f) {
        if (!census.flagged[f] || comp_of[f] >= 0) continue;
        int id = static_cast<int>(census.components.size());
        census.components.emplace_back();
        std::queue<std::size_t> bfs;
        bfs.push(f);
        comp_of[f] = id;
        while (!bfs.empty()) {
            std::size_t cur = bfs.front();
            bfs.pop();
            census.components[id].nodes.push_back(cur);
            for (std::size_t nb : neighbors(cur)) {
                if (census.flagged[nb] && comp_of[nb] < 0) {
                    comp_of[nb] = id;
                    bfs.push(nb);
                }
            }
        }
    }

    // closedness by angular coverage around the component centroid, and cusp
    // candidates by kernel/locus-tangent alignment
    for (auto& comp : census.components) {
        Vec c = Vec::Zero(g.dim());
        for (std::size_t f : comp.nodes) c += g.param(f);
        c /= static_cast<double>(comp.nodes.size());
        comp.centroid = c;
        if (comp.nodes.size() >= 8 && g.dim() == 2) {
            const int sectors = 24;
            std::vector<int> cover(sectors, 0);
            for (std::size_t f : comp.nodes) {
                Vec p = g.param(f) - c;
                double a = std::atan2(p(1), p(0));
                int s = static_cast<int>((a + M_PI) / (2 * M_PI) * sectors) % sectors;
                cover[s] = 1;
            }
            comp.closed = std::count(cover.begin(), cover.end(), 1) == sectors;

            // locus tangent from nearby flagged nodes, kernel from the SVD
            int tangent_hits = 0;
            for (std::size_t f : comp.nodes) {
                Vec p = g.param(f);
                // principal direction of the flagged neighbourhood
                Mat pts(2, 0);
                std::vector<Vec> close;
                for (std::size_t f2 : comp.nodes) {
                    Vec q = g.param(f2);
                    if ((q - p).norm() <= 3.2 * h && f2 != f) close.push_back(q - p);
                }
                if (close.size() < 2) continue;
                Mat m(2, static_cast<Eigen::Index>(close.size()));
                for (std::size_t i = 0; i < close.size(); ++i) m.col(i) = close[i];
                Eigen::JacobiSVD<Mat> pca(m, Eigen::ComputeFullU);
                Vec tangent = pca.matrixU().col(0);
                if (kernels[f].size() == 2) {
                    double ca = std::abs(tangent.normalized().dot(kernels[f].normalized()));
                    if (std::acos(std::clamp(ca, 0.0, 1.0)) < tangency_angle) ++tangent_hits;
                }
            }
            // a genuine cusp shows a short run of tangency hits
            comp.cusp_candidates = tangent_hits >= 1 ? (tangent_hits + 3) / 4 : 0;
        }
    }
    return census;
}

// finite-difference Jacobian callback for charts without analytic data
inline std::function<Mat(std::size_t)> fd_jacobian_of(const SampledChart& chart) {
    SampledChart c = chart;
    return [c](std::size_t f) {
        const Grid& g = c.grid;
        auto idx = g.unflat(f);
        Mat J(c.m, c.n());
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
            if (!c.is_active(g.flat(lo)) || !c.is_active(g.flat(hi))) return Mat();
            J.col(d) = (c.values.row(g.flat(hi)) - c.values.row(g.flat(lo))).transpose() / dp;
        }
        return J;
    };
}

}  // namespace wrinkle

#endif
