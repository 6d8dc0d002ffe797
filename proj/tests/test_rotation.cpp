#include <gtest/gtest.h>

#include <cmath>

#include "wrinkle/rotation.hpp"

using namespace wrinkle;

namespace {

SampledChart unit_segment(int nodes, int collar = 3) {
    Grid g = Grid::uniform({{0.0, 1.0}}, {nodes});
    return SampledChart::sample(g, 2, [](const Vec& p) {
        Vec v(2);
        v << p(0), 0.0;
        return v;
    }, collar);
}

Vec segment_at(const Vec& p) {
    Vec v(2);
    v << p(0), 0.0;
    return v;
}
Mat segment_jac(const Vec&) {
    Mat J(2, 1);
    J << 1.0, 0.0;
    return J;
}

double plateau_profile(double x) {
    return bump_plateau(x, 0.08, 0.42, 0.58, 0.92);
}

}  // namespace

TEST(Decompose, QuarterTurnInThreeSteps) {
    SampledChart base = unit_segment(257);
    auto path = segment_rotation_path(base, M_PI / 2, [](double) { return 1.0; }, 25);
    auto rep = decompose_into_simple(path, base);
    ASSERT_TRUE(rep.ok) << rep.error;
    EXPECT_EQ(rep.steps.size(), 3u);  // ceil((pi/2) / (0.9 pi/4))
    for (const auto& st : rep.steps) EXPECT_LT(st.max_angle, M_PI / 4);
}

TEST(Decompose, ConstantPathIsEmpty) {
    SampledChart base = unit_segment(65);
    auto path = segment_rotation_path(base, 0.0, [](double) { return 1.0; }, 9);
    auto rep = decompose_into_simple(path, base);
    ASSERT_TRUE(rep.ok);
    EXPECT_EQ(rep.steps.size(), 1u);  // one trivial step covers the whole path
    EXPECT_LT(rep.steps[0].max_angle, 1e-12);
}

TEST(Decompose, SmallRotationSingleStep) {
    SampledChart base = unit_segment(65);
    auto path = segment_rotation_path(base, 0.6, [](double) { return 1.0; }, 13);
    auto rep = decompose_into_simple(path, base);
    ASSERT_TRUE(rep.ok);
    EXPECT_EQ(rep.steps.size(), 1u);
    EXPECT_LT(rep.steps[0].max_angle, M_PI / 4);
}

TEST(PiecewiseConstant, DeviationAndSubdivision) {
    SampledChart base = unit_segment(129);
    // curved tangent field: rotate by an x-dependent angle
    auto path = segment_rotation_path(base, 0.8, [](double x) { return x; }, 2);
    const auto& field = path.planes.back();
    Triangulation t2 = segment_triangulation(base.grid, 2);
    auto pc2 = piecewise_constant_G(t2, field, base.grid, 1.0);
    EXPECT_TRUE(pc2.fine_enough);
    EXPECT_GT(pc2.max_deviation, 0.0);
    Triangulation t4 = segment_triangulation(base.grid, 4);
    auto pc4 = piecewise_constant_G(t4, field, base.grid, 1.0);
    EXPECT_LT(pc4.max_deviation, pc2.max_deviation);  // subdivision shrinks the bound

    auto strict = piecewise_constant_G(t2, field, base.grid, 0.05);
    EXPECT_FALSE(strict.fine_enough);
    EXPECT_GE(strict.offending_simplex, 0);
}

TEST(RotateCurve, ZeroRotationIsConstant) {
    SampledChart base = unit_segment(129);
    auto path = segment_rotation_path(base, 0.0, plateau_profile, 5);
    GofferParams params;
    params.N = 8;
    params.sigma = 0.05;
    auto res = approximate_rotation_curve(base, segment_at, segment_jac, path, 0.1, params);
    ASSERT_EQ(res.frames.size(), 5u);
    for (const auto& fr : res.frames) {
        EXPECT_EQ(c0_distance(fr.output.we.base, base), 0.0);
        EXPECT_EQ(fr.depth, 0);
    }
}

TEST(RotateCurve, MiddleThirdRotation) {
    SampledChart base = unit_segment(513);
    auto path = segment_rotation_path(base, M_PI / 3, plateau_profile, 9);
    GofferParams params;
    params.N = 48;
    params.sigma = 0.02;
    params.N_max = 512;
    auto res = approximate_rotation_curve(base, segment_at, segment_jac, path, 0.15, params, 0.12);
    EXPECT_TRUE(res.pass) << "q99 " << res.worst_q99 << " c0 " << res.worst_c0 << " depth "
                          << res.max_depth << " fix " << res.fixity_exact;
    EXPECT_LE(res.max_depth, 1);
    EXPECT_TRUE(res.fixity_exact);
    // wrinkling concentrates in the middle: endpoints stay put across frames
    for (const auto& fr : res.frames)
        for (std::size_t f = 0; f < base.node_count(); ++f)
            if (path.fixed_set[f])
                EXPECT_EQ(fr.output.we.base.values.row(f), base.values.row(f));
}
