#ifndef WRINKLE_MODEL_CHART_HPP
#define WRINKLE_MODEL_CHART_HPP

#include <cmath>

#include "wrinkle/gauss.hpp"
#include "wrinkle/models.hpp"
#include "wrinkle/regularize.hpp"
#include "wrinkle/wrinkled.hpp"

namespace wrinkle {

// Nearest point of the model's singular locus (embedding kinds).
inline ModelPoint project_to_locus(const SingularityModel& model, const ModelPoint& p) {
    ModelPoint q = p;
    switch (model.kind) {
        case ModelKind::WrinkleEmbeddingZ: {
            Vec full(model.n);
            full.head(model.n - 1) = p.y;
            full(model.n - 1) = p.z;
            double r = full.norm();
            if (r == 0) {
                q.y.setZero();
                q.z = 1.0;
            } else {
                full /= r;
                q.y = full.head(model.n - 1);
                q.z = full(model.n - 1);
            }
            return q;
        }
        case ModelKind::FoldEmbedding:
        case ModelKind::FoldedEmbeddingModel:
        case ModelKind::DoubleFoldEmbryo:
            q.z = 0;
            return q;
        case ModelKind::CuspEmbedding:
            q.y(0) = p.z * p.z;  // land on z^2 = y1
            return q;
        case ModelKind::EmbryoEmbedding:
            q.y.setZero();
            q.z = 0;
            return q;
        default:
            throw std::invalid_argument("project_to_locus: embedding models only");
    }
}

// Grid-resolution locus extraction: flags nodes whose cell is crossed by the
// analytic locus (|defining value| below the cell-scaled gradient bound).
inline std::vector<uint8_t> grid_locus_mask(const SingularityModel& model, const Grid& grid,
                                            double band_cells = 1.0) {
    std::vector<uint8_t> mask(grid.node_count(), 0);
    const double h = grid.h();
    const int n = grid.dim();
    for (std::size_t f = 0; f < grid.node_count(); ++f) {
        Vec p = grid.param(f);
        ModelPoint mp;
        mp.y = p.head(n - 1);
        mp.z = p(n - 1);
        mp.x.resize(0);
        double v = locus_value(model, mp);
        // gradient of the defining function, computed per kind
        double grad = 1.0;
        switch (model.kind) {
            case ModelKind::WrinkleEmbeddingZ:
            case ModelKind::EquidimWrinkleW:
                grad = 2.0 * p.norm();
                break;
            case ModelKind::CuspEmbedding:
                grad = std::sqrt(4.0 * mp.z * mp.z + 1.0);
                break;
            case ModelKind::EmbryoEmbedding:
                grad = 2.0 * p.norm();
                break;
            default:
                grad = 1.0;
                break;
        }
        if (std::abs(v) <= band_cells * h * std::max(grad, 1e-6)) mask[f] = 1;
    }
    return mask;
}

// Sample a canonical embedding model over its chart and package it as a
// wrinkled embedding with the exact differential, the cell-resolution
// singular mask, and closed-form limits at masked nodes.
struct ModelChart {
    SingularityModel model;
    WrinkledEmbedding we;

    std::optional<GrassPoint> singular_limit(std::size_t f) const {
        Vec p = we.base.grid.param(f);
        ModelPoint mp;
        mp.y = p.head(model.n - 1);
        mp.z = p(model.n - 1);
        mp.x.resize(0);
        return gauss_limit(model, project_to_locus(model, mp));
    }
};

inline ModelChart wrinkled_from_model(const SingularityModel& model, int nodes_per_axis,
                                      bool annulus_mask = false, double locus_band_cells = 1.0) {
    model.check();
    ModelChart mc;
    mc.model = model;
    mc.we.base = canonical_chart(model, nodes_per_axis, annulus_mask);
    mc.we.singular_mask = grid_locus_mask(model, mc.we.base.grid, locus_band_cells);
    SingularityModel m = model;
    Grid gcopy = mc.we.base.grid;  // captured by value: the chart may be moved later
    mc.we.analytic_jacobian = [m, gcopy](std::size_t f) {
        Vec p = gcopy.param(f);
        ModelPoint mp;
        mp.y = p.head(m.n - 1);
        mp.z = p(m.n - 1);
        mp.x.resize(0);
        return model_jacobian(m, mp);
    };
    if (model.kind == ModelKind::WrinkleEmbeddingZ) {
        Wrinkle w;
        w.dom_lo = Vec::Constant(model.n, -1.0);
        w.dom_hi = Vec::Constant(model.n, 1.0);
        w.chart_center = Vec::Zero(model.n);
        w.chart_scale = Vec::Ones(model.n);
        w.depth = 1;
        if (model.n >= 2) {
            Vec e1 = Vec::Zero(model.n), e2 = Vec::Zero(model.n);
            e1(0) = 1.0;
            e2(0) = -1.0;
            w.equator = {e1, e2};
        }
        const int samples = 64;
        for (int k = 0; k < samples; ++k) {
            double phi = 2 * M_PI * k / samples;
            Vec fp(model.n);
            if (model.n == 1)
                fp(0) = k % 2 == 0 ? 1.0 : -1.0;
            else {
                fp(0) = std::cos(phi);
                fp(1) = std::sin(phi);
            }
            w.fold_samples.push_back(fp);
        }
        mc.we.wrinkles.push_back(std::move(w));
        mc.we.parent.assign(1, -1);
    }
    return mc;
}

}  // namespace wrinkle

#endif
