#ifndef WRINKLE_EMBED_CHECK_HPP
#define WRINKLE_EMBED_CHECK_HPP

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "wrinkle/chart.hpp"
#include "wrinkle/wrinkled.hpp"

namespace wrinkle {

struct EmbedCheckParams {
    double r_min = 0.25;          // separation ratio
    double locality_factor = 3.0; // pairs within this many cells in parameter are local
    double band_factor = 12.0;    // extra locality inside singular charts, in band widths
};

struct EmbedViolation {
    std::size_t a = 0, b = 0;
    double image_dist = 0;
    double param_dist = 0;
};

struct EmbedCheckReport {
    bool pass = true;
    double median_distortion = 0;  // median image/parameter stretch over grid edges
    double median_image_edge = 0;  // median image length of a grid edge
    double proximity_radius = 0;   // r_min * locality_factor * median image edge
    std::vector<EmbedViolation> violations;
};

namespace detail {

struct CellHash {
    std::size_t operator()(int64_t k) const { return std::hash<int64_t>()(k); }
};

inline int64_t cell_key(const Vec& p, double cell, int m) {
    int64_t key = 1469598103934665603LL;
    for (int d = 0; d < m; ++d) {
        auto c = static_cast<int64_t>(std::floor(p(d) / cell));
        key ^= c + 0x9e3779b97f4a7c15LL + (key << 6) + (key >> 2);
    }
    return key;
}

}  // namespace detail

// Sample-resolution topological-embedding check: via spatial hashing over the
// image, any two nodes beyond the locality scale in parameter must keep an
// image distance of at least r_min x (locality scale x median distortion).
// Locality widens to band_factor band widths inside recorded singular charts,
// where the cuspidal normal forms bring legs legitimately close.
inline EmbedCheckReport check_topological_embedding(const SampledChart& chart,
                                                    const std::vector<Wrinkle>& wrinkles = {},
                                                    const EmbedCheckParams& params = {},
                                                    const std::vector<Wrinkle>& zones = {}) {
    EmbedCheckReport rep;
    const Grid& g = chart.grid;
    const double h = g.h();

    // local stretch and image edge lengths; the per-node image resolution
    // scale keeps the criterion honest on maps with strongly varying stretch
    std::vector<double> stretch, elen;
    std::vector<double> node_edge(chart.node_count(), 0.0);
    for (std::size_t f = 0; f < chart.node_count(); ++f) {
        if (!chart.is_active(f)) continue;
        auto idx = g.unflat(f);
        for (int d = 0; d < chart.n(); ++d) {
            int count = static_cast<int>(g.axes[d].size());
            auto j = idx;
            j[d] += 1;
            double dp;
            if (g.is_periodic(d)) {
                j[d] %= count;
                dp = g.axes[d][1] - g.axes[d][0];
            } else {
                if (j[d] >= count) continue;
                dp = g.axes[d][j[d]] - g.axes[d][idx[d]];
            }
            std::size_t fj = g.flat(j);
            if (!chart.is_active(fj)) continue;
            double di = (chart.values.row(fj) - chart.values.row(f)).norm();
            stretch.push_back(di / dp);
            elen.push_back(di);
            node_edge[f] = std::max(node_edge[f], di);
            node_edge[fj] = std::max(node_edge[fj], di);
        }
    }
    if (stretch.empty()) return rep;
    std::nth_element(stretch.begin(), stretch.begin() + stretch.size() / 2, stretch.end());
    rep.median_distortion = stretch[stretch.size() / 2];
    std::nth_element(elen.begin(), elen.begin() + elen.size() / 2, elen.end());
    rep.median_image_edge = elen[elen.size() / 2];
    // hash radius: generous global bound; the per-pair threshold below uses
    // the local image resolution of the two nodes
    std::vector<double> esort = elen;
    std::nth_element(esort.begin(), esort.begin() + esort.size() * 95 / 100, esort.end());
    const double radius =
        params.r_min * params.locality_factor * esort[esort.size() * 95 / 100];
    rep.proximity_radius = radius;

    // local parameter scale per node: grid locality, widened inside bands
    std::vector<double> local_scale(chart.node_count(), params.locality_factor * h);
    std::vector<uint8_t> in_zone(chart.node_count(), 0);
    if (!wrinkles.empty() || !zones.empty()) {
        for (std::size_t f = 0; f < chart.node_count(); ++f) {
            Vec p = g.param(f);
            for (const auto& w : wrinkles) {
                if (w.band_width > 0 && w.domain_contains(p))
                    local_scale[f] =
                        std::max(local_scale[f], params.band_factor * w.band_width);
            }
            for (const auto& w : zones) {
                if (w.band_width > 0 && w.domain_contains(p)) {
                    local_scale[f] =
                        std::max(local_scale[f], params.band_factor * w.band_width);
                    in_zone[f] = 1;
                }
            }
        }
    }

    // spatial hash over image points
    std::unordered_map<int64_t, std::vector<std::size_t>, detail::CellHash> cells;
    const double cell = radius;
    for (std::size_t f = 0; f < chart.node_count(); ++f) {
        if (!chart.is_active(f)) continue;
        cells[detail::cell_key(chart.value(f), cell, chart.m)].push_back(f);
    }

    const int m = chart.m;
    for (std::size_t f = 0; f < chart.node_count(); ++f) {
        if (!chart.is_active(f)) continue;
        Vec p = chart.value(f);
        Vec par = g.param(f);
        // visit the 3^m neighbourhood of the node's cell
        std::vector<int64_t> keys;
        std::vector<int> digit(m, -1);
        while (true) {
            Vec q = p;
            for (int d = 0; d < m; ++d) q(d) += digit[d] * cell;
            keys.push_back(detail::cell_key(q, cell, m));
            int d = 0;
            while (d < m && digit[d] == 1) digit[d++] = -1;
            if (d == m) break;
            ++digit[d];
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        for (int64_t k : keys) {
            auto it = cells.find(k);
            if (it == cells.end()) continue;
            for (std::size_t fj : it->second) {
                if (fj <= f) continue;
                double dimg = (chart.values.row(fj) - chart.values.row(f)).norm();
                if (dimg >= radius) continue;
                double pair_r = params.r_min * params.locality_factor *
                                std::max(node_edge[f], node_edge[fj]);
                if (dimg >= pair_r) continue;
                // corrugation zones are covered by the fibered injectivity
                // certificate (monotone height along gradient lines)
                if (in_zone[f] && in_zone[fj]) continue;
                double dpar = g.param_distance(g.param(fj), par);
                double scale = std::max(local_scale[f], local_scale[fj]);
                if (dpar <= scale) continue;
                rep.violations.push_back({f, fj, dimg, dpar});
            }
        }
    }
    rep.pass = rep.violations.empty();
    return rep;
}

inline EmbedCheckReport check_topological_embedding(const WrinkledEmbedding& we,
                                                    const EmbedCheckParams& params = {}) {
    return check_topological_embedding(we.base, we.wrinkles, params);
}

}  // namespace wrinkle

#endif
