#include <gtest/gtest.h>

#include <random>

#include "wrinkle/models.hpp"
#include "wrinkle/regularize.hpp"

using namespace wrinkle;

namespace {

ModelPoint pt(std::initializer_list<double> y, double z, std::initializer_list<double> x = {}) {
    ModelPoint p;
    p.y.resize(static_cast<Eigen::Index>(y.size()));
    Eigen::Index i = 0;
    for (double v : y) p.y(i++) = v;
    p.z = z;
    p.x.resize(static_cast<Eigen::Index>(x.size()));
    i = 0;
    for (double v : x) p.x(i++) = v;
    return p;
}

// Independent finite-difference Jacobian of eval_model.
Mat fd_jacobian(const SingularityModel& m, const ModelPoint& p, double h = 1e-6) {
    Mat J(m.target, m.n);
    auto shift = [&](int col, double d) {
        ModelPoint q = p;
        int ny = static_cast<int>(p.y.size());
        if (col < ny)
            q.y(col) += d;
        else if (col == ny)
            q.z += d;
        else
            q.x(col - ny - 1) += d;
        return q;
    };
    for (int c = 0; c < m.n; ++c) {
        Vec fp = eval_model(m, shift(c, h));
        Vec fm = eval_model(m, shift(c, -h));
        J.col(c) = (fp - fm) / (2 * h);
    }
    return J;
}

}  // namespace

TEST(EvalModel, WrinkleEquatorPoint) {
    SingularityModel m{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    Vec v = eval_model(m, pt({1.0}, 0.0));
    EXPECT_DOUBLE_EQ(v(0), 1.0);
    EXPECT_DOUBLE_EQ(v(1), 0.0);
    EXPECT_DOUBLE_EQ(v(2), 0.0);
}

TEST(EvalModel, FoldDirectSubstitution) {
    SingularityModel m{ModelKind::FoldEmbedding, 2, 3, 0};
    Vec v = eval_model(m, pt({0.5}, 0.2));
    EXPECT_DOUBLE_EQ(v(0), 0.5);
    EXPECT_DOUBLE_EQ(v(1), 0.04);
    EXPECT_NEAR(v(2), 0.008, 1e-15);
}

TEST(EvalModel, EquidimWrinklePolynomialOracle) {
    SingularityModel m{ModelKind::EquidimWrinkleW, 2, 2, 0};
    Vec v = eval_model(m, pt({0.6}, 0.8));
    // oracle: direct polynomial evaluation of z^3 + 3(y^2-1)z
    double z = 0.8, w = 0.36 - 1.0;
    double expect = z * z * z + 3.0 * w * z;
    EXPECT_DOUBLE_EQ(v(1), expect);
    EXPECT_DOUBLE_EQ(v(1), -1.024);
}

TEST(EvalModel, UnfoldingMatchesQuadratureOracle) {
    // int_0^z (t^2+w)^2 dt by midpoint quadrature vs the closed form
    SingularityModel m{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    double y = 0.7, z = 1.1, w = y * y - 1.0;
    const int N = 400000;
    double acc = 0;
    for (int i = 0; i < N; ++i) {
        double t = z * (i + 0.5) / N;
        double q = t * t + w;
        acc += q * q;
    }
    acc *= z / N;
    Vec v = eval_model(m, pt({y}, z));
    EXPECT_NEAR(v(2), acc, 1e-9);
}

TEST(EvalModel, DimensionMismatchRejected) {
    SingularityModel m{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    EXPECT_THROW(eval_model(m, pt({1.0, 2.0}, 0.0)), std::invalid_argument);
    SingularityModel bad{ModelKind::WrinkleEmbeddingZ, 3, 3, 0};
    EXPECT_THROW(eval_model(bad, pt({1.0, 0.0}, 0.0)), std::invalid_argument);
}

TEST(EvalModel, DoubleFoldEmbryoForm) {
    SingularityModel m{ModelKind::DoubleFoldEmbryo, 2, 3, 0};
    Vec v = eval_model(m, pt({0.3}, 0.5));
    EXPECT_DOUBLE_EQ(v(0), 0.3);
    EXPECT_DOUBLE_EQ(v(1), 0.125);
    EXPECT_DOUBLE_EQ(v(2), 0.03125);
}

TEST(Jacobian, MatchesFiniteDifferences) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    std::vector<SingularityModel> models = {
        {ModelKind::WrinkleEmbeddingZ, 2, 3, 0}, {ModelKind::WrinkleEmbeddingZ, 1, 2, 0},
        {ModelKind::WrinkleEmbeddingZ, 2, 5, 0}, {ModelKind::FoldEmbedding, 2, 3, 0},
        {ModelKind::CuspEmbedding, 2, 3, 0},     {ModelKind::EmbryoEmbedding, 2, 3, 0},
        {ModelKind::DoubleFoldEmbryo, 2, 4, 0},  {ModelKind::EquidimWrinkleW, 2, 2, 0},
        {ModelKind::EquidimWrinkleW, 3, 2, 1},   {ModelKind::CuspMap, 3, 2, 1},
        {ModelKind::EmbryoMap, 3, 2, 0},         {ModelKind::FoldMap, 3, 2, 1},
    };
    for (const auto& m : models) {
        for (int trial = 0; trial < 20; ++trial) {
            ModelPoint p;
            int ny = is_embedding_kind(m.kind) ? m.n - 1 : m.target - 1;
            int nx = is_embedding_kind(m.kind) ? 0 : m.n - m.target;
            p.y.resize(ny);
            p.x.resize(nx);
            for (int i = 0; i < ny; ++i) p.y(i) = U(rng);
            for (int i = 0; i < nx; ++i) p.x(i) = U(rng);
            p.z = U(rng);
            Mat J = model_jacobian(m, p);
            Mat Jfd = fd_jacobian(m, p);
            EXPECT_LT((J - Jfd).cwiseAbs().maxCoeff(), 5e-8)
                << "model kind " << static_cast<int>(m.kind);
        }
    }
}

TEST(Classify, HemisphereIndexSplit) {
    SingularityModel w220{ModelKind::EquidimWrinkleW, 2, 2, 0};
    auto c = classify(w220, pt({0.6}, 0.8));
    EXPECT_EQ(c.kind, SingularClassKind::Fold);
    EXPECT_EQ(c.index, 0);  // upper hemisphere: index s
    c = classify(w220, pt({0.6}, -0.8));
    EXPECT_EQ(c.kind, SingularClassKind::Fold);
    EXPECT_EQ(c.index, 1);  // lower hemisphere: index s+1
    c = classify(w220, pt({1.0}, 0.0));
    EXPECT_EQ(c.kind, SingularClassKind::Cusp);
    EXPECT_EQ(c.index, 0);  // cusp of index s + 1/2
}

TEST(Classify, WrinkleEmbeddingCorners) {
    SingularityModel z23{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    EXPECT_EQ(classify(z23, pt({1.0}, 0.0)).kind, SingularClassKind::ThreefoldCorner);
    EXPECT_EQ(classify(z23, pt({0.0}, 0.0)).kind, SingularClassKind::Regular);
    EXPECT_EQ(classify(z23, pt({0.6}, 0.8)).kind, SingularClassKind::TwofoldCorner);
    // n=1 wrinkle: two twofold cuspidal points, no threefold corners
    SingularityModel z12{ModelKind::WrinkleEmbeddingZ, 1, 2, 0};
    EXPECT_EQ(classify(z12, pt({}, 1.0)).kind, SingularClassKind::TwofoldCorner);
    EXPECT_EQ(classify(z12, pt({}, -1.0)).kind, SingularClassKind::TwofoldCorner);
    EXPECT_EQ(classify(z12, pt({}, 0.2)).kind, SingularClassKind::Regular);
}

TEST(Classify, RankDropAgreesWithAnalyticLocus) {
    // classifier agreement with svd rank of the exact differential
    std::vector<SingularityModel> models = {
        {ModelKind::WrinkleEmbeddingZ, 2, 3, 0},
        {ModelKind::EquidimWrinkleW, 2, 2, 0},
        {ModelKind::CuspEmbedding, 2, 3, 0},
        {ModelKind::FoldEmbedding, 2, 4, 0},
    };
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.4, 1.4);
    for (const auto& m : models) {
        int expected_rank = is_embedding_kind(m.kind) ? m.n : m.target;
        for (int trial = 0; trial < 200; ++trial) {
            ModelPoint p = pt({U(rng)}, U(rng));
            auto c = classify(m, p, 1e-9);
            int r = svd_rank(model_jacobian(m, p));
            if (c.is_singular())
                EXPECT_LT(r, expected_rank);
            else
                EXPECT_EQ(r, expected_rank);
        }
        // exact locus points drop rank
        if (m.kind == ModelKind::WrinkleEmbeddingZ || m.kind == ModelKind::EquidimWrinkleW) {
            EXPECT_LT(svd_rank(model_jacobian(m, pt({0.6}, 0.8))), expected_rank);
            EXPECT_LT(svd_rank(model_jacobian(m, pt({0.0}, 1.0))), expected_rank);
        }
    }
}

TEST(Classify, EmbryoBirthAcrossFamily) {
    // time family: cubic coefficient w = t swept through 0 turns an isolated
    // embryo point into a sphere locus (wrinkle birth)
    SingularityModel embryo{ModelKind::EmbryoEmbedding, 2, 3, 0};
    auto c = classify(embryo, pt({0.0}, 0.0));
    EXPECT_EQ(c.kind, SingularClassKind::Embryo);
    EXPECT_EQ(classify(embryo, pt({0.2}, 0.0)).kind, SingularClassKind::Regular);
    EXPECT_EQ(classify(embryo, pt({0.0}, 0.2)).kind, SingularClassKind::Regular);

    // after birth (the Z model), the locus is the full sphere
    SingularityModel z{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    int count = 0;
    for (int k = 0; k < 16; ++k) {
        double phi = 2 * M_PI * k / 16;
        if (classify(z, pt({std::cos(phi)}, std::sin(phi)), 1e-9).is_singular()) ++count;
    }
    EXPECT_EQ(count, 16);
}

TEST(GaussLimit, FoldModelLimitPlane) {
    SingularityModel m{ModelKind::FoldEmbedding, 2, 3, 0};
    GrassPoint g = gauss_limit(m, pt({0.5}, 0.0));
    Mat expect(3, 2);
    expect << 1, 0, 0, 1, 0, 0;
    GrassPoint e{expect, std::nullopt};
    EXPECT_LT(angle(g, e), 1e-12);
}

TEST(GaussLimit, WrinkleEquatorLimitPlane) {
    SingularityModel m{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    GrassPoint g = gauss_limit(m, pt({1.0}, 0.0));
    Mat expect(3, 2);
    expect << 1, 0, 0, 1, 0, 0;
    EXPECT_LT(angle(g, GrassPoint{expect, std::nullopt}), 1e-12);
}

TEST(GaussLimit, RegularPointIsTangentPlane) {
    SingularityModel m{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    ModelPoint p = pt({0.3}, 0.4);
    GrassPoint g = gauss_limit(m, p);
    GrassPoint tangent = plane_from_vectors(model_jacobian(m, p));
    EXPECT_LT(angle(g, tangent), 1e-12);
}

TEST(GaussLimit, ApproachIndependence) {
    // limits along >= 8 rays into each sampled locus point agree with the
    // stored closed-form limit within 1e-6 rad
    std::vector<SingularityModel> models = {{ModelKind::WrinkleEmbeddingZ, 2, 3, 0},
                                            {ModelKind::FoldEmbedding, 2, 3, 0},
                                            {ModelKind::CuspEmbedding, 2, 3, 0}};
    for (const auto& m : models) {
        std::vector<ModelPoint> locus;
        if (m.kind == ModelKind::WrinkleEmbeddingZ) {
            for (int k = 0; k < 6; ++k) {
                double phi = 2 * M_PI * k / 6;
                locus.push_back(pt({std::cos(phi)}, std::sin(phi)));
            }
        } else if (m.kind == ModelKind::FoldEmbedding) {
            locus.push_back(pt({0.5}, 0.0));
            locus.push_back(pt({-0.2}, 0.0));
        } else {
            locus.push_back(pt({0.49}, 0.7));   // z^2 = y1 fold branch
            locus.push_back(pt({0.49}, -0.7));
        }
        for (const auto& p : locus) {
            GrassPoint lim = gauss_limit(m, p);
            for (int k = 0; k < 8; ++k) {
                double phi = 2 * M_PI * k / 8 + 0.1;
                double t = 1e-7;
                ModelPoint q = p;
                q.y(0) += t * std::cos(phi);
                q.z += t * std::sin(phi);
                if (classify(m, q, 1e-12).is_singular()) continue;
                GrassPoint nearby = plane_from_vectors(model_jacobian(m, q));
                EXPECT_LT(angle(lim, nearby), 1e-6);
            }
        }
    }
}

TEST(ProjectionConsistency, SharedClosedForm) {
    double err = 1;
    EXPECT_TRUE(projection_consistency(1, 2, 1000, 1.5, &err));
    EXPECT_EQ(err, 0.0);
    EXPECT_TRUE(projection_consistency(2, 3, 61, 1.5, &err));
    EXPECT_EQ(err, 0.0);
    EXPECT_TRUE(projection_consistency(2, 5, 61, 1.5, &err));
    EXPECT_EQ(err, 0.0);
}

TEST(Regularize, FullRankAndPositiveSlope) {
    SingularityModel z12{ModelKind::WrinkleEmbeddingZ, 1, 2, 0};
    SampledChart chart = canonical_chart(z12, 601);
    auto res = regularize(z12, chart, 0.1, false);
    EXPECT_TRUE(res.feasible);
    EXPECT_GT(res.min_dz_u, 0.0);
    EXPECT_GE(res.min_dz_u, 0.05 - 1e-12);
    EXPECT_GT(res.min_rank_ratio, kRankTol);
    EXPECT_LE(res.achieved_c1, 0.1);
}

TEST(Regularize, PreserveTwofoldKeepsFoldPoints) {
    SingularityModel z23{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    SampledChart chart = canonical_chart(z23, 121);  // ticks at multiples of 0.025
    auto res = regularize(z23, chart, 0.1, true);
    EXPECT_TRUE(res.feasible);
    EXPECT_GT(res.min_dz_u, 0.0);
    EXPECT_LE(res.achieved_c1, 0.1);
    // nodes exactly on the fold sphere with |z| > r0 keep their image bit-exactly
    int checked = 0;
    for (std::size_t i = 0; i < chart.node_count(); ++i) {
        Vec p = chart.grid.param(i);
        double q = p.squaredNorm() - 1.0;
        if (q == 0.0 && std::abs(p(1)) > 0.1) {
            EXPECT_EQ(res.output.values(i, 2), chart.values(i, 2));
            ++checked;
        }
    }
    EXPECT_GE(checked, 2);  // the poles (0, +-1) lie on the grid
}

TEST(Regularize, InfiniteDeltaIdentityOnRegularChart) {
    SingularityModel z23{ModelKind::WrinkleEmbeddingZ, 2, 3, 0};
    Grid g = Grid::uniform({{1.1, 1.4}, {1.1, 1.4}}, {21, 21});
    SampledChart chart = SampledChart::sample(g, 3, [&](const Vec& p) {
        ModelPoint mp;
        mp.y = p.head(1);
        mp.z = p(1);
        return eval_model(z23, mp);
    });
    auto res = regularize(z23, chart, std::numeric_limits<double>::infinity(), false);
    EXPECT_TRUE(res.feasible);
    EXPECT_EQ(c0_distance(res.output, chart), 0.0);
}

TEST(SingularLocusDescriptor, Shapes) {
    EXPECT_EQ(singular_locus({ModelKind::EquidimWrinkleW, 2, 2, 0}).dim, 1);
    EXPECT_EQ(singular_locus({ModelKind::WrinkleEmbeddingZ, 2, 3, 0}).dim, 1);
    EXPECT_EQ(singular_locus({ModelKind::EmbryoEmbedding, 2, 3, 0}).dim, 0);
}
