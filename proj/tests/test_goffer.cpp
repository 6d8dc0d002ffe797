#include <gtest/gtest.h>

#include <cmath>

#include "wrinkle/hypersurface.hpp"

using namespace wrinkle;

namespace {

// closed-form integral of bump_plateau (smoothstep ramps + plateau)
double ss_int(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return t - 0.5;
    double t4 = t * t * t * t;
    return t4 * (2.5 - 3.0 * t + t * t);
}

// Rotationally symmetric band: meridian slope s0 near the ends, tan(tilt) in
// the core; theta-periodic level circles, gradient lines along x.
struct Funnel {
    double tilt = M_PI / 3;
    double s0 = 0.004;      // residual slope at the ends
    double R0 = 1.2;        // radius at x = -1
    double a1 = -0.7, b1 = -0.35, c1 = 0.35, d1 = 0.7;  // slope plateau bump

    double slope(double x) const {
        return s0 + (std::tan(tilt) - s0) * bump_plateau(x, a1, b1, c1, d1);
    }
    double slope_int(double x) const {  // int_{-1}^x of the plateau bump
        double acc = 0;
        if (x > a1) {
            double t = std::min((x - a1) / (b1 - a1), 1.0);
            acc += (b1 - a1) * ss_int(t);
        }
        if (x > b1) acc += std::min(x - b1, c1 - b1);
        if (x > c1) {
            double t = std::min((x - c1) / (d1 - c1), 1.0);
            acc += (d1 - c1) * (t - ss_int(t));
        }
        return acc;
    }
    double height(double x) const {
        return s0 * (x + 1.0) + (std::tan(tilt) - s0) * slope_int(x);
    }
    double rho(double x) const { return R0 + (x + 1.0); }

    Vec value(const Vec& p) const {  // p = (theta, x)
        Vec v(3);
        v << rho(p(1)) * std::cos(p(0)), rho(p(1)) * std::sin(p(0)), height(p(1));
        return v;
    }
    Mat jacobian(const Vec& p) const {
        Mat J(3, 2);
        double r = rho(p(1));
        J << -r * std::sin(p(0)), std::cos(p(0)),
              r * std::cos(p(0)), std::sin(p(0)),
              0.0, slope(p(1));
        return J;
    }
    SampledChart chart(int res_theta, int res_x, int collar) const {
        Grid g;
        g.axes.push_back(Grid::ticks_periodic(0.0, 2 * M_PI, res_theta));
        g.axes.push_back(Grid::ticks(-1.0, 1.0, res_x));
        g.periodic = {1, 0};
        SampledChart c =
            SampledChart::sample(g, 3, [&](const Vec& p) { return value(p); }, collar);
        c.orientation = -1;  // (theta, x) order gives a downward raw normal
        return c;
    }
};

}  // namespace

TEST(BetaLambda, ProfileShapes) {
    double eps = 0.2;
    EXPECT_EQ(beta_profile(0.0, eps), 1.0);
    EXPECT_EQ(beta_profile(1.0 - 3 * eps, eps), 1.0);
    EXPECT_NEAR(beta_profile(1.0 - 2 * eps, eps), eps, 1e-12);
    EXPECT_NEAR(beta_profile(1.0, eps), -eps, 1e-12);
    // monotone non-increasing
    double prev = 2;
    for (int i = 0; i <= 100; ++i) {
        double b = beta_profile(i / 100.0, eps);
        EXPECT_LE(b, prev + 1e-12);
        prev = b;
    }
    double rho = 0.05;
    EXPECT_EQ(lambda_cutoff(0.3, rho), 1.0);
    EXPECT_EQ(lambda_cutoff(1.0 - rho, rho), 1.0);
    EXPECT_EQ(lambda_cutoff(1.0 - rho / 2, rho), 0.0);
    EXPECT_EQ(lambda_cutoff(1.0, rho), 0.0);
}

TEST(Tau, OddnessCutoffAndPeakSlope) {
    GofferParams params;
    params.N = 8;
    params.sigma = 0.05;
    params.gamma = 0.3;
    params.eps = 0.2;
    TauField tau{params, 0.0, 1.0, 1.0, {}};
    // tau vanishes for |x| near 1 and at the band centers
    EXPECT_EQ(tau.eval(0.0, 1.0 - params.rho() / 2), 0.0);
    EXPECT_EQ(tau.eval(0.0, 0.0), 0.0);  // W odd
    // derivative at a band center: gamma * (2N+1)/2 * W'(0) >= 3 gamma (2N+1)/2
    double d = tau.deriv_x(0.0, 0.0);
    EXPECT_GE(d, 3.0 * params.gamma * params.bands() / 2.0);
    // chain-rule oracle: finite difference of eval
    double h = 1e-7;
    double fd = (tau.eval(0.0, h) - tau.eval(0.0, -h)) / (2 * h);
    EXPECT_NEAR(fd, d, 1e-3 * std::abs(d));
}

TEST(Cover, SingleCylinderAndPartition) {
    Funnel f;
    SampledChart S = f.chart(48, 41, 2);
    Vec pole(3);
    pole << 0, 0, 1;
    GofferParams params;
    CoverReport rep;
    auto cover = build_cylindrical_cover(S, pole, params, &rep);
    ASSERT_TRUE(rep.ok) << rep.error;
    ASSERT_EQ(cover.cylinders.size(), 1u);
    EXPECT_TRUE(cover.cylinders[0].wrap_r);
    Vec p0(2);
    p0 << 0.3, 0.0;
    EXPECT_NEAR(cover.weight(0, p0), 1.0, 1e-12);
}

TEST(Cover, PartitionOfUnityOnAnnularStrip) {
    // annular strip: periodic level axis, height along the second axis
    Grid g;
    g.axes.push_back(Grid::ticks_periodic(0.0, 2 * M_PI, 96));
    g.axes.push_back(Grid::ticks(0.0, 1.0, 33));
    g.periodic = {1, 0};
    SampledChart S = SampledChart::sample(g, 3, [](const Vec& p) {
        Vec v(3);
        v << std::cos(p(0)), std::sin(p(0)), p(1);
        return v;
    });
    Vec pole(3);
    pole << 0, 0, 1;
    GofferParams params;
    params.K = 4;
    CoverReport rep;
    auto cover = build_cylindrical_cover(S, pole, params, &rep);
    ASSERT_TRUE(rep.ok) << rep.error;
    ASSERT_EQ(cover.cylinders.size(), 4u);
    // weights sum to 1 on the covered strip
    for (int i = 0; i < 500; ++i) {
        Vec p(2);
        p << 0.3 + (5.5 / 500.0) * i, 0.5;
        double sum = 0;
        bool covered = false;
        for (std::size_t a = 0; a < cover.cylinders.size(); ++a) {
            if (cover.bump(a, p) > 0) covered = true;
            sum += cover.weight(a, p);
        }
        if (covered) EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Cover, SphereWithPolarCapsRejected) {
    // full sphere: the height function has critical points at the poles
    Grid g = Grid::uniform({{0.0, 2 * M_PI}, {-M_PI / 2, M_PI / 2}}, {33, 33});
    SampledChart S = SampledChart::sample(g, 3, [](const Vec& p) {
        Vec v(3);
        v << std::cos(p(1)) * std::cos(p(0)), std::cos(p(1)) * std::sin(p(0)), std::sin(p(1));
        return v;
    });
    Vec pole(3);
    pole << 0, 0, 1;
    GofferParams params;
    CoverReport rep;
    build_cylindrical_cover(S, pole, params, &rep);
    EXPECT_FALSE(rep.ok);
    EXPECT_FALSE(rep.critical_nodes.empty());

    // cutting the caps leaves a clean cylindrical band
    Grid g2 = Grid::uniform({{0.0, 2 * M_PI}, {-0.9, 0.9}}, {33, 33});
    SampledChart S2 = SampledChart::sample(g2, 3, [](const Vec& p) {
        Vec v(3);
        v << std::cos(p(1)) * std::cos(p(0)), std::cos(p(1)) * std::sin(p(0)), std::sin(p(1));
        return v;
    });
    CoverReport rep2;
    build_cylindrical_cover(S2, pole, params, &rep2);
    EXPECT_TRUE(rep2.ok) << rep2.error;
}

TEST(FlowTransport, IdentityTranslationAndLevels) {
    Grid g = Grid::uniform({{0.0, 1.0}, {0.0, 1.0}}, {17, 17});
    SampledChart S = SampledChart::sample(g, 3, [](const Vec& p) {
        Vec v(3);
        v << p(0), p(1), 0.3 * p(1);
        return v;
    });
    Vec pole(3);
    pole << 0, 0, 1;
    Vec e1(3);
    e1 << 1, 0, 0;
    std::vector<double> tau(S.node_count(), 0.0);
    auto res = flow_transport(S, pole, [&](const Vec&) { return e1; }, tau);
    EXPECT_EQ(c0_distance(res.out, S), 0.0);  // tau == 0: identity

    std::fill(tau.begin(), tau.end(), 0.25);
    res = flow_transport(S, pole, [&](const Vec&) { return e1; }, tau);
    for (std::size_t f = 0; f < S.node_count(); ++f)
        EXPECT_NEAR((res.out.value(f) - S.value(f) - 0.25 * e1).norm(), 0.0, 1e-13);

    // curved horizontal field: levels preserved to integrator tolerance
    auto vf = [&](const Vec& p) {
        Vec v(3);
        v << -p(1), p(0) + 1.0, 0.0;
        return v.normalized();
    };
    for (std::size_t f = 0; f < S.node_count(); ++f) tau[f] = 0.5 * std::sin(3.0 * f);
    res = flow_transport(S, pole, vf, tau);
    EXPECT_LE(res.max_level_drift, 1e-9);
}

TEST(Goffer, FunnelBecomesEpsHorizontal) {
    Funnel f;
    SampledChart S = f.chart(128, 129, 3);
    GofferProblem prob;
    prob.chart = S;
    prob.pole = Vec::Zero(3);
    prob.pole(2) = 1.0;
    prob.base_at = [&](const Vec& p) { return f.value(p); };
    prob.base_jac = [&](const Vec& p) { return f.jacobian(p); };
    GofferParams params;
    params.eps = 0.2;
    params.N = 16;
    params.sigma = 0.1;
    auto out = goffer_hypersurface(prob, params);
    EXPECT_TRUE(out.pass) << "q99 " << out.measures.angle_quantile99 << " max "
                          << out.measures.max_angle << " class "
                          << to_string(out.measures.h_class) << " embed "
                          << out.measures.embedding_ok << " anomalies "
                          << out.measures.gauss_report.anomalies.size() << " bdrift "
                          << out.measures.boundary_drift;
    EXPECT_EQ(out.measures.h_class, HorizontalityClass::EpsHorizontal);
    EXPECT_EQ(depth(out.we), 1);
    EXPECT_EQ(out.measures.boundary_drift, 0.0);
    EXPECT_GT(out.measures.wrinkle_count, 0);
    EXPECT_LE(out.measures.max_level_drift, 1e-12);
    EXPECT_TRUE(out.measures.embedding_ok);
}

TEST(Goffer, AlreadyHorizontalReturnsUnchanged) {
    Grid g = Grid::uniform({{-1.0, 1.0}, {-1.0, 1.0}}, {33, 33});
    SampledChart S = SampledChart::sample(g, 3, [](const Vec& p) {
        Vec v(3);
        v << p(0), p(1), 0.01 * p(1);
        return v;
    }, 2);
    GofferProblem prob;
    prob.chart = S;
    prob.pole = Vec::Zero(3);
    prob.pole(2) = 1.0;
    auto out = goffer_hypersurface(prob, GofferParams{});
    EXPECT_TRUE(out.pass);
    EXPECT_TRUE(out.unchanged);
    EXPECT_EQ(out.measures.wrinkle_count, 0);
    EXPECT_EQ(depth(out.we), 0);
}
