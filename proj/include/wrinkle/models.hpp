#ifndef WRINKLE_MODELS_HPP
#define WRINKLE_MODELS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "wrinkle/chart.hpp"
#include "wrinkle/grassmann.hpp"

namespace wrinkle {

// Relative singular-value threshold below which a differential counts as
// rank-deficient. The models are polynomial, so exact zeros occur only on
// the singular locus.
inline constexpr double kRankTol = 1e-8;

enum class ModelKind {
    WrinkleEmbeddingZ,    // (y,z) -> (y, z^3+3(|y|^2-1)z, int_0^z (t^2+|y|^2-1)^2 dt, 0..)
    FoldEmbedding,        // (y,z) -> (y, z^2, z^3, 0..)
    CuspEmbedding,        // (y,z) -> (y, z^3-3y1 z, int_0^z (t^2-y1)^2 dt, 0..)
    EmbryoEmbedding,      // (y,z) -> (y, z^3+3|y|^2 z, int_0^z (t^2+|y|^2)^2 dt, 0..)
    FoldMap,              // (y,z,x) -> (y, -sum_1^s + sum_{s+1})   over (z,x)
    CuspMap,              // (y,z,x) -> (y, z^3+3y1 z - sum + sum)
    EmbryoMap,            // (y,z,x) -> (y, z^3+3|y|^2 z - sum + sum)
    EquidimWrinkleW,      // (y,z,x) -> (y, z^3+3(|y|^2-1)z - sum + sum)
    FoldedEmbeddingModel, // (y,z) -> (y, z^2, z^3, 0..)
    DoubleFoldEmbryo      // (y,z) -> (y, z^3, z^5, 0..)
};

inline bool is_embedding_kind(ModelKind k) {
    switch (k) {
        case ModelKind::WrinkleEmbeddingZ:
        case ModelKind::FoldEmbedding:
        case ModelKind::CuspEmbedding:
        case ModelKind::EmbryoEmbedding:
        case ModelKind::FoldedEmbeddingModel:
        case ModelKind::DoubleFoldEmbryo:
            return true;
        default:
            return false;
    }
}

// Chart point for the local models. Embedding kinds use (y, z) with
// y in R^{n-1}; map kinds use (y, z, x) with y in R^{q-1}, x in R^{n-q}.
struct ModelPoint {
    Vec y;
    double z = 0;
    Vec x;  // empty when n == q

    static ModelPoint yz(std::initializer_list<double> ys, double z) {
        ModelPoint p;
        p.y.resize(static_cast<Eigen::Index>(ys.size()));
        Eigen::Index i = 0;
        for (double v : ys) p.y(i++) = v;
        p.z = z;
        p.x.resize(0);
        return p;
    }
};

struct SingularityModel {
    ModelKind kind;
    int n = 0;       // source dimension
    int target = 0;  // m for embedding kinds, q for map kinds
    int s = 0;       // fold index (map kinds only)

    void check() const {
        if (is_embedding_kind(kind)) {
            if (n >= target) throw std::invalid_argument("embedding model requires n < m");
            if (target < n + 1) throw std::invalid_argument("embedding model requires m >= n+1");
            if (kind == ModelKind::WrinkleEmbeddingZ || kind == ModelKind::CuspEmbedding ||
                kind == ModelKind::EmbryoEmbedding || kind == ModelKind::FoldEmbedding ||
                kind == ModelKind::FoldedEmbeddingModel || kind == ModelKind::DoubleFoldEmbryo) {
                if (target < n + 1) throw std::invalid_argument("model needs m >= n+1");
            }
        } else {
            if (n < target) throw std::invalid_argument("map model requires n >= q");
            int nq = n - target;
            if (kind == ModelKind::FoldMap) {
                if (s < 0 || s > nq + 1) throw std::invalid_argument("fold index out of range");
            } else {
                if (s < 0 || s > nq) throw std::invalid_argument("index out of range");
            }
            if (kind == ModelKind::CuspMap && target < 2)
                throw std::invalid_argument("cusp map requires q > 1");
        }
    }

    void check_point(const ModelPoint& p) const {
        int ydim = is_embedding_kind(kind) ? n - 1 : target - 1;
        int xdim = is_embedding_kind(kind) ? 0 : n - target;
        if (p.y.size() != ydim || p.x.size() != xdim)
            throw std::invalid_argument("ModelPoint dimensions inconsistent with model");
        if (!p.y.allFinite() || !std::isfinite(p.z) || !p.x.allFinite())
            throw std::invalid_argument("ModelPoint has non-finite coordinates");
    }
};

namespace detail {

// int_0^z (t^2 + w)^2 dt evaluated by its degree-5 antiderivative.
inline double unfolding(double z, double w) {
    return z * z * z * z * z / 5.0 + 2.0 * w * z * z * z / 3.0 + w * w * z;
}
inline double unfolding_dz(double z, double w) {
    double q = z * z + w;
    return q * q;
}
inline double unfolding_dw(double z, double w) {
    return 2.0 * z * z * z / 3.0 + 2.0 * w * z;
}

// z^3 + 3 w z and its partials; shared by Z, W, cusp and embryo forms.
inline double cubic_term(double z, double w) { return z * z * z + 3.0 * w * z; }
inline double cubic_dz(double z, double w) { return 3.0 * (z * z + w); }
inline double cubic_dw(double z, double /*w*/) { return 3.0 * z; }

// Signed quadratic sum -x_1^2-..-x_s^2 + x_{s+1}^2+..  over a vector t.
inline double signed_square_sum(const Vec& t, int s) {
    double v = 0;
    for (Eigen::Index i = 0; i < t.size(); ++i)
        v += (i < s ? -1.0 : 1.0) * t(i) * t(i);
    return v;
}

}  // namespace detail

// Exact closed-form image of a local model.
inline Vec eval_model(const SingularityModel& model, const ModelPoint& p) {
    model.check();
    model.check_point(p);
    const double z = p.z;
    if (is_embedding_kind(model.kind)) {
        Vec out = Vec::Zero(model.target);
        out.head(p.y.size()) = p.y;
        const int a = model.n - 1;  // first nontrivial component
        switch (model.kind) {
            case ModelKind::WrinkleEmbeddingZ: {
                double w = p.y.squaredNorm() - 1.0;
                out(a) = detail::cubic_term(z, w);
                out(a + 1) = detail::unfolding(z, w);
                break;
            }
            case ModelKind::FoldEmbedding:
            case ModelKind::FoldedEmbeddingModel:
                out(a) = z * z;
                out(a + 1) = z * z * z;
                break;
            case ModelKind::CuspEmbedding: {
                double w = -p.y(0);
                out(a) = detail::cubic_term(z, w);
                out(a + 1) = detail::unfolding(z, w);
                break;
            }
            case ModelKind::EmbryoEmbedding: {
                double w = p.y.squaredNorm();
                out(a) = detail::cubic_term(z, w);
                out(a + 1) = detail::unfolding(z, w);
                break;
            }
            case ModelKind::DoubleFoldEmbryo:
                out(a) = z * z * z;
                out(a + 1) = z * z * z * z * z;
                break;
            default:
                break;
        }
        return out;
    }
    // map kinds
    Vec out = Vec::Zero(model.target);
    out.head(p.y.size()) = p.y;
    switch (model.kind) {
        case ModelKind::FoldMap: {
            Vec t(p.x.size() + 1);
            t(0) = z;
            t.tail(p.x.size()) = p.x;
            out(model.target - 1) = detail::signed_square_sum(t, model.s);
            break;
        }
        case ModelKind::CuspMap:
            out(model.target - 1) =
                detail::cubic_term(z, p.y(0)) + detail::signed_square_sum(p.x, model.s);
            break;
        case ModelKind::EmbryoMap:
            out(model.target - 1) =
                detail::cubic_term(z, p.y.squaredNorm()) + detail::signed_square_sum(p.x, model.s);
            break;
        case ModelKind::EquidimWrinkleW:
            out(model.target - 1) = detail::cubic_term(z, p.y.squaredNorm() - 1.0) +
                                    detail::signed_square_sum(p.x, model.s);
            break;
        default:
            break;
    }
    return out;
}

// Exact differential, target x n, columns ordered (y_1..,z,x_1..).
inline Mat model_jacobian(const SingularityModel& model, const ModelPoint& p) {
    model.check();
    model.check_point(p);
    const double z = p.z;
    Mat J = Mat::Zero(model.target, model.n);
    const int ny = static_cast<int>(p.y.size());
    if (is_embedding_kind(model.kind)) {
        J.topLeftCorner(ny, ny).setIdentity();
        const int a = model.n - 1;
        const int zc = ny;  // z column
        switch (model.kind) {
            case ModelKind::WrinkleEmbeddingZ:
            case ModelKind::EmbryoEmbedding: {
                double w = p.y.squaredNorm() - (model.kind == ModelKind::WrinkleEmbeddingZ ? 1.0 : 0.0);
                for (int i = 0; i < ny; ++i) {
                    J(a, i) = detail::cubic_dw(z, w) * 2.0 * p.y(i);
                    J(a + 1, i) = detail::unfolding_dw(z, w) * 2.0 * p.y(i);
                }
                J(a, zc) = detail::cubic_dz(z, w);
                J(a + 1, zc) = detail::unfolding_dz(z, w);
                break;
            }
            case ModelKind::FoldEmbedding:
            case ModelKind::FoldedEmbeddingModel:
                J(a, zc) = 2.0 * z;
                J(a + 1, zc) = 3.0 * z * z;
                break;
            case ModelKind::CuspEmbedding: {
                double w = -p.y(0);
                J(a, 0) = -detail::cubic_dw(z, w);
                J(a + 1, 0) = -detail::unfolding_dw(z, w);
                J(a, zc) = detail::cubic_dz(z, w);
                J(a + 1, zc) = detail::unfolding_dz(z, w);
                break;
            }
            case ModelKind::DoubleFoldEmbryo:
                J(a, zc) = 3.0 * z * z;
                J(a + 1, zc) = 5.0 * z * z * z * z;
                break;
            default:
                break;
        }
        return J;
    }
    J.topLeftCorner(ny, ny).setIdentity();
    const int g = model.target - 1;  // last component row
    const int zc = ny;
    switch (model.kind) {
        case ModelKind::FoldMap: {
            J(g, zc) = 2.0 * (model.s >= 1 ? -1.0 : 1.0) * z;
            for (Eigen::Index i = 0; i < p.x.size(); ++i)
                J(g, zc + 1 + i) = 2.0 * (i + 1 < model.s ? -1.0 : 1.0) * p.x(i);
            break;
        }
        case ModelKind::CuspMap: {
            J(g, 0) += detail::cubic_dw(z, p.y(0));
            J(g, zc) = detail::cubic_dz(z, p.y(0));
            for (Eigen::Index i = 0; i < p.x.size(); ++i)
                J(g, zc + 1 + i) = 2.0 * (i < model.s ? -1.0 : 1.0) * p.x(i);
            break;
        }
        case ModelKind::EmbryoMap:
        case ModelKind::EquidimWrinkleW: {
            double w = p.y.squaredNorm() - (model.kind == ModelKind::EquidimWrinkleW ? 1.0 : 0.0);
            for (int i = 0; i < ny; ++i) J(g, i) += detail::cubic_dw(z, w) * 2.0 * p.y(i);
            J(g, zc) = detail::cubic_dz(z, w);
            for (Eigen::Index i = 0; i < p.x.size(); ++i)
                J(g, zc + 1 + i) = 2.0 * (i < model.s ? -1.0 : 1.0) * p.x(i);
            break;
        }
        default:
            break;
    }
    return J;
}

inline int svd_rank(const Mat& J, double rel_tol = kRankTol) {
    Eigen::JacobiSVD<Mat> svd(J);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) >= rel_tol * s(0)) ++r;
    return r;
}

enum class SingularClassKind { Regular, Fold, Cusp, Embryo, TwofoldCorner, ThreefoldCorner };

struct SingularClass {
    SingularClassKind kind = SingularClassKind::Regular;
    // Folds carry an integer index; cusps and embryos carry index s + 1/2,
    // stored here as the integer part s.
    int index = 0;
    ModelPoint location;

    bool is_singular() const { return kind != SingularClassKind::Regular; }
};

inline std::string to_string(SingularClassKind k) {
    switch (k) {
        case SingularClassKind::Regular: return "regular";
        case SingularClassKind::Fold: return "fold";
        case SingularClassKind::Cusp: return "cusp";
        case SingularClassKind::Embryo: return "embryo";
        case SingularClassKind::TwofoldCorner: return "twofold-corner";
        case SingularClassKind::ThreefoldCorner: return "threefold-corner";
    }
    return "?";
}

// Signed defining function of the singular locus: zero exactly on the locus
// (transversal x-part is reported separately for map kinds).
inline double locus_value(const SingularityModel& model, const ModelPoint& p) {
    switch (model.kind) {
        case ModelKind::WrinkleEmbeddingZ:
        case ModelKind::EquidimWrinkleW:
            return p.z * p.z + p.y.squaredNorm() - 1.0;
        case ModelKind::FoldEmbedding:
        case ModelKind::FoldedEmbeddingModel:
        case ModelKind::DoubleFoldEmbryo:
            return p.z;
        case ModelKind::CuspEmbedding:
        case ModelKind::CuspMap:
            return p.z * p.z - (model.kind == ModelKind::CuspEmbedding ? p.y(0) : -p.y(0));
        case ModelKind::EmbryoEmbedding:
        case ModelKind::EmbryoMap:
            return p.z * p.z + p.y.squaredNorm();
        case ModelKind::FoldMap: {
            double v = p.z * p.z + p.x.squaredNorm();
            return v;
        }
    }
    return 0;
}

struct LocusDescriptor {
    std::string description;
    int dim = 0;  // dimension of the singular set in the source
};

inline LocusDescriptor singular_locus(const SingularityModel& model) {
    model.check();
    switch (model.kind) {
        case ModelKind::WrinkleEmbeddingZ:
            return {"sphere z^2+|y|^2=1 (cusp equator at z=0)", model.n - 1};
        case ModelKind::EquidimWrinkleW:
            return {"sphere z^2+|y|^2=1, x=0 (cusp equator at z=0)", model.target - 1};
        case ModelKind::FoldEmbedding:
        case ModelKind::FoldedEmbeddingModel:
            return {"hyperplane z=0", model.n - 1};
        case ModelKind::CuspEmbedding:
            return {"parabola z^2=y1 (cusp at origin)", model.n - 1};
        case ModelKind::CuspMap:
            return {"parabola z^2=-y1, x=0 (cusp at origin)", model.target - 1};
        case ModelKind::EmbryoEmbedding:
        case ModelKind::EmbryoMap:
            return {"isolated point y=0, z=0 (x=0)", 0};
        case ModelKind::FoldMap:
            return {"plane z=0, x=0", model.target - 1};
        case ModelKind::DoubleFoldEmbryo:
            return {"degenerate hyperplane z=0", model.n - 1};
    }
    return {};
}

// Classify a chart point against the analytic locus. zero_tol is an absolute
// tolerance on the locus-defining values; the default treats only exact
// (closed-form) inputs as singular.
inline SingularClass classify(const SingularityModel& model, const ModelPoint& p,
                              double zero_tol = 1e-12) {
    model.check();
    model.check_point(p);
    SingularClass c;
    c.location = p;
    auto near0 = [&](double v) { return std::abs(v) <= zero_tol; };
    switch (model.kind) {
        case ModelKind::WrinkleEmbeddingZ: {
            if (!near0(p.z * p.z + p.y.squaredNorm() - 1.0)) return c;
            c.kind = near0(p.z) ? SingularClassKind::ThreefoldCorner
                                : SingularClassKind::TwofoldCorner;
            return c;
        }
        case ModelKind::FoldEmbedding:
        case ModelKind::FoldedEmbeddingModel: {
            if (!near0(p.z)) return c;
            c.kind = SingularClassKind::TwofoldCorner;
            return c;
        }
        case ModelKind::CuspEmbedding: {
            if (!near0(p.z * p.z - p.y(0))) return c;
            c.kind = near0(p.z) ? SingularClassKind::ThreefoldCorner
                                : SingularClassKind::TwofoldCorner;
            return c;
        }
        case ModelKind::EmbryoEmbedding: {
            if (!near0(p.z * p.z + p.y.squaredNorm())) return c;
            c.kind = SingularClassKind::Embryo;
            return c;
        }
        case ModelKind::DoubleFoldEmbryo: {
            if (!near0(p.z)) return c;
            c.kind = SingularClassKind::Embryo;
            return c;
        }
        case ModelKind::FoldMap: {
            if (!near0(p.z * p.z + p.x.squaredNorm())) return c;
            c.kind = SingularClassKind::Fold;
            c.index = model.s;
            return c;
        }
        case ModelKind::CuspMap: {
            if (!near0(p.z * p.z + p.y(0)) || !near0(p.x.squaredNorm())) return c;
            if (near0(p.z)) {
                c.kind = SingularClassKind::Cusp;
                c.index = model.s;
            } else {
                c.kind = SingularClassKind::Fold;
                c.index = p.z > 0 ? model.s : model.s + 1;
            }
            return c;
        }
        case ModelKind::EmbryoMap: {
            if (!near0(p.z * p.z + p.y.squaredNorm()) || !near0(p.x.squaredNorm())) return c;
            c.kind = SingularClassKind::Embryo;
            c.index = model.s;
            return c;
        }
        case ModelKind::EquidimWrinkleW: {
            if (!near0(p.z * p.z + p.y.squaredNorm() - 1.0) || !near0(p.x.squaredNorm()))
                return c;
            if (near0(p.z)) {
                c.kind = SingularClassKind::Cusp;
                c.index = model.s;
            } else {
                // upper hemisphere folds of index s, lower of index s+1
                c.kind = SingularClassKind::Fold;
                c.index = p.z > 0 ? model.s : model.s + 1;
            }
            return c;
        }
    }
    return c;
}

// Limiting tangent n-plane of an embedding model at a singular chart point,
// approached through regular points. The y-columns of the differential stay
// full-rank; the normalized z-column tends to the axis of the image
// coordinate carrying the cubic/fold term, independent of the approach side.
inline GrassPoint gauss_limit(const SingularityModel& model, const ModelPoint& p,
                              const std::optional<Vec>& side = std::nullopt) {
    model.check();
    model.check_point(p);
    if (!is_embedding_kind(model.kind))
        throw std::invalid_argument("gauss_limit: embedding models only");
    SingularClass c = classify(model, p, 1e-9);
    Mat J = model_jacobian(model, p);
    if (!c.is_singular()) {
        if (svd_rank(J) < model.n)
            throw std::invalid_argument("gauss_limit: degenerate point off the locus");
        return plane_from_vectors(J);
    }
    if (side && side->size() != model.n)
        throw std::invalid_argument("gauss_limit: side direction has wrong dimension");
    Mat span(model.target, model.n);
    span.leftCols(model.n - 1) = J.leftCols(model.n - 1);
    Vec axis = Vec::Zero(model.target);
    axis(model.n - 1) = 1.0;
    span.col(model.n - 1) = axis;
    return plane_from_vectors(span);
}

// Pointwise witness that the first n image coordinates of Z(n,m) equal the
// equidimensional wrinkled map (y, z^3+3(|y|^2-1)z).
inline bool projection_consistency(int n, int m, int grid_per_axis = 11,
                                   double box = 1.5, double* max_err = nullptr) {
    if (n >= m) throw std::invalid_argument("projection_consistency: requires n < m");
    SingularityModel zmod{ModelKind::WrinkleEmbeddingZ, n, m, 0};
    SingularityModel wmod{ModelKind::EquidimWrinkleW, n, n, 0};
    double worst = 0;
    std::vector<int> idx(n, 0);
    const std::size_t total = [&] {
        std::size_t t = 1;
        for (int i = 0; i < n; ++i) t *= grid_per_axis;
        return t;
    }();
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t r = f;
        ModelPoint p;
        p.y.resize(n - 1);
        p.x.resize(0);
        for (int d = 0; d < n; ++d) {
            int i = static_cast<int>(r % grid_per_axis);
            r /= grid_per_axis;
            double coord = -box + 2.0 * box * i / (grid_per_axis - 1);
            if (d < n - 1)
                p.y(d) = coord;
            else
                p.z = coord;
        }
        Vec zi = eval_model(zmod, p);
        Vec wi = eval_model(wmod, p);
        for (int d = 0; d < n; ++d) worst = std::max(worst, std::abs(zi(d) - wi(d)));
        // trailing coordinates of Z beyond the unfolding must be identically 0
        for (int d = n + 1; d < m; ++d) worst = std::max(worst, std::abs(zi(d)));
    }
    if (max_err) *max_err = worst;
    return worst == 0.0;
}

}  // namespace wrinkle

#endif
