#ifndef WRINKLE_WRINKLED_HPP
#define WRINKLE_WRINKLED_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wrinkle/chart.hpp"
#include "wrinkle/grassmann.hpp"

namespace wrinkle {

// One wrinkle: an (n-1)-sphere of cuspidal corners bounding a disk in the
// parameter domain, recorded up to affine rescaling of the canonical chart.
struct Wrinkle {
    Vec dom_lo, dom_hi;   // bounding box of the bounded disk in parameter space
    Vec core_lo, core_hi; // singular-core zone (normal-form neighbourhood)
    int depth = 1;

    // canonical-chart data (z is always the last parameter axis)
    Vec chart_center;
    Vec chart_scale;
    double t_param = 1.0;          // amplitude parameter; embryo at t = 0
    std::vector<Vec> equator;      // threefold-corner sublocus (empty for n = 1)
    std::vector<Vec> fold_samples; // sampled fold locus in parameter space

    // local parameter scale of the singular chart (band width for goffered
    // outputs); drives locality exclusions in the embedding check
    double band_width = 0.0;

    bool domain_contains(const Vec& p) const {
        for (Eigen::Index d = 0; d < p.size(); ++d)
            if (p(d) < dom_lo(d) || p(d) > dom_hi(d)) return false;
        return true;
    }
    bool core_contains(const Vec& p) const {
        if (core_lo.size() == 0) return false;
        for (Eigen::Index d = 0; d < p.size(); ++d)
            if (p(d) < core_lo(d) || p(d) > core_hi(d)) return false;
        return true;
    }
};

// Background sampled map plus its tree of wrinkles.
struct WrinkledEmbedding {
    SampledChart base;
    std::vector<Wrinkle> wrinkles;
    std::vector<int> parent;  // index into wrinkles, -1 at top level

    // optional exact differential supplied by a construction
    std::function<Mat(std::size_t)> analytic_jacobian;
    // nodes inside singular cores (filled by constructions or classifiers)
    std::vector<uint8_t> singular_mask;
    // stored Gauss field (filled by gauss_map)
    std::vector<GrassPoint> gauss;
    // wrinkled-bundle fiber orientation per node; constructions fill it by
    // continuation across their folds, otherwise enclosure parity is used
    std::vector<int8_t> fiber_sign;

    static WrinkledEmbedding smooth(SampledChart chart) {
        WrinkledEmbedding we;
        we.base = std::move(chart);
        return we;
    }

    int enclosure_count(const Vec& p) const {
        int c = 0;
        for (const auto& w : wrinkles)
            if (w.domain_contains(p)) ++c;
        return c;
    }

    void validate_nesting() const {
        if (parent.size() != wrinkles.size())
            throw std::invalid_argument("WrinkledEmbedding: parent table size mismatch");
        auto inside = [](const Wrinkle& a, const Wrinkle& b) {
            for (Eigen::Index d = 0; d < a.dom_lo.size(); ++d)
                if (a.dom_lo(d) < b.dom_lo(d) || a.dom_hi(d) > b.dom_hi(d)) return false;
            return true;
        };
        auto disjoint = [](const Wrinkle& a, const Wrinkle& b) {
            for (Eigen::Index d = 0; d < a.dom_lo.size(); ++d)
                if (a.dom_hi(d) < b.dom_lo(d) || b.dom_hi(d) < a.dom_lo(d)) return true;
            return false;
        };
        for (std::size_t i = 0; i < wrinkles.size(); ++i) {
            int pi = parent[i];
            if (pi >= 0) {
                if (!inside(wrinkles[i], wrinkles[pi]))
                    throw std::invalid_argument("wrinkle not contained in its parent disk");
                if (wrinkles[i].depth != wrinkles[pi].depth + 1)
                    throw std::invalid_argument("wrinkle depth inconsistent with nesting");
            } else if (wrinkles[i].depth < 1) {
                throw std::invalid_argument("top-level wrinkle must have depth >= 1");
            }
            for (std::size_t j = i + 1; j < wrinkles.size(); ++j) {
                const auto& a = wrinkles[i];
                const auto& b = wrinkles[j];
                if (!disjoint(a, b) && !inside(a, b) && !inside(b, a))
                    throw std::invalid_argument("wrinkle spheres neither disjoint nor nested");
            }
        }
    }
};

// Maximal nesting depth; smooth embeddings have depth 0.
inline int depth(const WrinkledEmbedding& we) {
    we.validate_nesting();
    int d = 0;
    for (const auto& w : we.wrinkles) d = std::max(d, w.depth);
    return d;
}

}  // namespace wrinkle

#endif
