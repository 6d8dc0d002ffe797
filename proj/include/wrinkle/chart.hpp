#ifndef WRINKLE_CHART_HPP
#define WRINKLE_CHART_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wrinkle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Rectilinear parameter grid: tensor product of per-axis ticks.
// Node indices are flattened row-major (last axis fastest). A periodic axis
// stores ticks over [lo, hi) and wraps; its period is (hi - lo).
struct Grid {
    std::vector<std::vector<double>> axes;  // ticks per axis, strictly increasing
    std::vector<uint8_t> periodic;          // optional per-axis periodicity

    int dim() const { return static_cast<int>(axes.size()); }

    bool is_periodic(int d) const {
        return !periodic.empty() && periodic[static_cast<std::size_t>(d)];
    }

    double period(int d) const {
        const auto& a = axes[d];
        return a.back() - a.front() + (a[1] - a[0]);
    }

    // parameter distance, respecting periodic axes
    double param_distance(const Vec& p, const Vec& q) const {
        double s = 0;
        for (int d = 0; d < dim(); ++d) {
            double diff = std::abs(p(d) - q(d));
            if (is_periodic(d)) {
                double P = period(d);
                diff = std::min(diff, P - diff);
            }
            s += diff * diff;
        }
        return std::sqrt(s);
    }

    std::size_t node_count() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.size();
        return n;
    }

    std::vector<int> shape() const {
        std::vector<int> s;
        for (const auto& a : axes) s.push_back(static_cast<int>(a.size()));
        return s;
    }

    // max tick spacing over all axes
    double h() const {
        double hmax = 0;
        for (const auto& a : axes)
            for (std::size_t i = 0; i + 1 < a.size(); ++i)
                hmax = std::max(hmax, a[i + 1] - a[i]);
        return hmax;
    }

    std::size_t flat(const std::vector<int>& idx) const {
        std::size_t f = 0;
        for (int d = 0; d < dim(); ++d) f = f * axes[d].size() + idx[d];
        return f;
    }

    std::vector<int> unflat(std::size_t f) const {
        std::vector<int> idx(dim());
        for (int d = dim() - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(f % axes[d].size());
            f /= axes[d].size();
        }
        return idx;
    }

    Vec param(std::size_t f) const {
        auto idx = unflat(f);
        Vec p(dim());
        for (int d = 0; d < dim(); ++d) p(d) = axes[d][idx[d]];
        return p;
    }

    static std::vector<double> ticks(double lo, double hi, int count) {
        std::vector<double> t(count);
        for (int i = 0; i < count; ++i)
            t[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
        return t;
    }

    static Grid uniform(const std::vector<std::pair<double, double>>& ranges,
                        const std::vector<int>& counts) {
        Grid g;
        for (std::size_t d = 0; d < ranges.size(); ++d)
            g.axes.push_back(ticks(ranges[d].first, ranges[d].second, counts[d]));
        return g;
    }

    // ticks over [lo, hi) for a periodic axis
    static std::vector<double> ticks_periodic(double lo, double hi, int count) {
        std::vector<double> t(count);
        for (int i = 0; i < count; ++i)
            t[i] = lo + (hi - lo) * static_cast<double>(i) / count;
        return t;
    }
};

// A discretized parametrized patch: curve segment (n=1) or surface patch (n=2)
// with embedding values in R^m.
struct SampledChart {
    Grid grid;
    int m = 0;                      // target dimension
    Mat values;                      // node_count x m, row per node
    int orientation = 1;             // +-1
    std::vector<uint8_t> boundary_mask;  // 1 = node within the boundary collar
    std::vector<uint8_t> active;         // optional; empty = all nodes active

    int n() const { return grid.dim(); }
    std::size_t node_count() const { return grid.node_count(); }

    bool is_active(std::size_t f) const { return active.empty() || active[f]; }
    bool is_boundary(std::size_t f) const {
        return !boundary_mask.empty() && boundary_mask[f];
    }

    Vec value(std::size_t f) const { return values.row(f).transpose(); }

    void check() const {
        if (static_cast<std::size_t>(values.rows()) != node_count() || values.cols() != m)
            throw std::invalid_argument("SampledChart: value array does not match grid");
        if (!values.allFinite())
            throw std::invalid_argument("SampledChart: non-finite values");
        if (n() >= m)
            throw std::invalid_argument("SampledChart: embedding chart requires n < m");
    }

    // Build by sampling f over a uniform grid.
    static SampledChart sample(const Grid& g, int m,
                               const std::function<Vec(const Vec&)>& f,
                               int collar_nodes = 0) {
        SampledChart c;
        c.grid = g;
        c.m = m;
        c.values.resize(g.node_count(), m);
        for (std::size_t i = 0; i < g.node_count(); ++i)
            c.values.row(i) = f(g.param(i)).transpose();
        c.boundary_mask.assign(g.node_count(), 0);
        if (collar_nodes > 0) {
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                auto idx = g.unflat(i);
                for (int d = 0; d < g.dim(); ++d) {
                    if (g.is_periodic(d)) continue;
                    int last = static_cast<int>(g.axes[d].size()) - 1;
                    if (idx[d] < collar_nodes || idx[d] > last - collar_nodes)
                        c.boundary_mask[i] = 1;
                }
            }
        }
        return c;
    }
};

// Max over nodes of image distance; grids must match node-for-node.
inline double c0_distance(const SampledChart& a, const SampledChart& b) {
    if (a.node_count() != b.node_count() || a.m != b.m)
        throw std::invalid_argument("c0_distance: grid mismatch");
    for (int d = 0; d < a.n(); ++d)
        if (a.grid.axes[d] != b.grid.axes[d])
            throw std::invalid_argument("c0_distance: grid mismatch");
    double dmax = 0;
    for (std::size_t i = 0; i < a.node_count(); ++i)
        dmax = std::max(dmax, (a.values.row(i) - b.values.row(i)).norm());
    return dmax;
}

}  // namespace wrinkle

#endif
