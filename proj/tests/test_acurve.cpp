#include <gtest/gtest.h>

#include <cmath>

#include "wrinkle/acurve.hpp"

using namespace wrinkle;

TEST(ACurve, EndpointNormalization) {
    auto [x1, y1] = eval_a_curve(1.0, 1.0);
    EXPECT_NEAR(x1, 1.0, 1e-15);  // a_1(+-1) = +-1
    EXPECT_NEAR(y1, 1.0, 1e-15);
    auto [x0, y0] = eval_a_curve(0.0, 0.7);
    EXPECT_EQ(x0, 0.0);
    EXPECT_EQ(y0, 0.0);
}

TEST(ACurve, CuspAgainstQuadratureOracle) {
    // oracle: int_0^{sqrt(t)} (u^2-t)^2 du by Simpson vs (8/15) t^{5/2}
    for (double t : {0.25, 0.5, 1.0}) {
        double up = std::sqrt(t);
        const int N = 20000;
        double acc = 0;
        for (int i = 0; i < N; ++i) {
            double a = up * i / N, b = up * (i + 1) / N, mid = 0.5 * (a + b);
            auto f = [&](double u) {
                double q = u * u - t;
                return q * q;
            };
            acc += (b - a) / 6.0 * (f(a) + 4.0 * f(mid) + f(b));
        }
        EXPECT_NEAR(acc, (8.0 / 15.0) * std::pow(t, 2.5), 1e-13);
        auto [xc, yc] = eval_a_curve(up, t);
        EXPECT_NEAR(xc, std::pow(t, 2.5), 1e-13);
        EXPECT_NEAR(yc, std::pow(t, 1.5), 1e-13);
    }
}

TEST(ACurve, InversionReproducesCuspPoint) {
    for (double t : {0.25, 0.5, 1.0}) {
        double x_cusp = std::pow(t, 2.5);
        EXPECT_NEAR(a_function(x_cusp, t), std::pow(t, 1.5), 1e-8);
        EXPECT_EQ(a_function(0.0, t), 0.0);
    }
    EXPECT_NEAR(a_function(1.0, 1.0), 1.0, 1e-9);
    EXPECT_NEAR(a_function(0.03125, 0.25), 0.125, 1e-10);
}

TEST(ACurve, InversionRoundTrip) {
    for (double t : {-0.5, 0.0, 0.3, 1.0}) {
        for (int i = 0; i <= 40; ++i) {
            double x = -2.0 + 4.0 * i / 40;
            double u = acurve::u_from_x(x, t);
            EXPECT_NEAR(acurve::x(u, t), x, 1e-11);
        }
    }
}

TEST(WFunction, OddAndPeriodic) {
    WFunction w = build_W(0.1, 1.0);
    for (int i = 0; i <= 200; ++i) {
        double x = -1.0 + 2.0 * i / 200;
        EXPECT_NEAR(w.eval(-x), -w.eval(x), 1e-12);
        EXPECT_NEAR(w.eval(x + 1.0), w.eval(x), 1e-12);
    }
    EXPECT_EQ(w.eval(0.0), 0.0);
    EXPECT_NEAR(w.eval(0.5), 0.0, 1e-13);
}

TEST(WFunction, MatchesACurveOnCore) {
    for (double t : {1.0, 0.6, -0.3}) {
        WFunction w = build_W(0.06, t);
        for (int i = 1; i < 40; ++i) {
            double x = -0.06 + 0.12 * i / 40;
            EXPECT_NEAR(w.eval(x), a_function(x / 0.06, t), 1e-9);
        }
    }
}

TEST(WFunction, DerivativeBoundsAtTOne) {
    for (double sigma : {0.02, 0.0625, 0.1}) {
        WFunction w = build_W(sigma, 1.0);
        auto deriv_in = [&](double x, double lo, double hi) {
            double d = w.deriv(x);
            EXPECT_GE(d, lo - 0.01 * std::abs(lo)) << "sigma=" << sigma << " x=" << x;
            EXPECT_LE(d, hi + 0.01 * std::abs(hi) + 1e-9) << "sigma=" << sigma << " x=" << x;
        };
        for (int i = 1; i < 50; ++i)
            deriv_in(-sigma + 2 * sigma * i / 50.0, 3.0, 1e301);  // steep rise
        for (int i = 1; i < 50; ++i)
            deriv_in(sigma + sigma * i / 50.0, -1e301, -2.0);  // plunge
        for (int i = 1; i < 50; ++i)
            deriv_in(2 * sigma + (0.5 - 4 * sigma) * i / 50.0, -2.0, -1e-6);  // corridor
        // forward-difference cross-check with 1% slack, away from the cusp
        for (double x : {2.5 * sigma, 0.5 * (2 * sigma + 0.5 - 2 * sigma)}) {
            double h = 1e-8;
            double fd = (w.eval(x + h) - w.eval(x)) / h;
            EXPECT_NEAR(fd, w.deriv(x), 0.01 * std::abs(w.deriv(x)) + 1e-5);
        }
    }
}

TEST(WFunction, PeakAtCusp) {
    for (double t : {0.25, 1.0}) {
        WFunction w = build_W(0.05, t);
        EXPECT_NEAR(w.eval(0.05 * std::pow(t, 2.5)), std::pow(t, 1.5), 1e-10);
    }
}

TEST(WFunction, ComposedProfileIsSmooth) {
    // u -> W(sigma x(u,t)) equals y(u,t) on the core and has bounded second
    // differences across the cut (the composition resolves the a_t cusp)
    for (double t : {1.0, 0.5}) {
        WFunction w = build_W(0.1, t);
        double umax = acurve::u_from_x(0.45 / 0.1, t);
        auto max_dd = [&](double du) {
            double prev2 = w.eval_composed(-umax), prev1 = w.eval_composed(-umax + du);
            double worst = 0;
            for (int i = 2; i * du <= 2.0 * umax; ++i) {
                double u = -umax + i * du;
                double cur = w.eval_composed(u);
                worst = std::max(worst, std::abs(cur - 2 * prev1 + prev2) / (du * du));
                prev2 = prev1;
                prev1 = cur;
            }
            return worst;
        };
        // bounded curvature: the second differences stabilize under refinement
        // (a derivative corner would grow like 1/du)
        double dd1 = max_dd(1e-3), dd2 = max_dd(5e-4);
        EXPECT_LT(dd2, 1.5 * dd1 + 1.0);
        for (double u = -0.9; u <= 0.9; u += 0.1)
            if (std::abs(acurve::x(u, t)) < 1.0)
                EXPECT_EQ(w.eval_composed(u), acurve::y(u, t));
    }
}

TEST(WFunction, SigmaRangeEnforced) {
    EXPECT_THROW(build_W(0.125, 1.0), std::invalid_argument);
    EXPECT_THROW(build_W(0.0, 1.0), std::invalid_argument);
    EXPECT_NO_THROW(build_W(0.124, 1.0));
}

TEST(WFunction, LegSlopeWithinCorridorAcrossSigma) {
    for (double sigma : {0.01, 0.02, 0.05, 0.1, 0.12}) {
        WFunction w = build_W(sigma, 1.0);
        EXPECT_GT(w.s_mag, 0.0) << sigma;
        EXPECT_LE(w.s_mag, 2.0) << sigma;
    }
}
