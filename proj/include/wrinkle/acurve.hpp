#ifndef WRINKLE_ACURVE_HPP
#define WRINKLE_ACURVE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "wrinkle/smooth.hpp"

namespace wrinkle {

// The curve family A_t given by
//   x(u,t) = (15/8) * int_0^u (s^2-t)^2 ds,   y(u,t) = -(1/2)(u^3 - 3tu).
// A_t is the graph of a continuous function a_t, smooth for t < 0 and smooth
// away from the cusp x = +-t^{5/2} for t >= 0.
namespace acurve {

inline double x(double u, double t) {
    return (15.0 / 8.0) * (u * u * u * u * u / 5.0 - 2.0 * t * u * u * u / 3.0 + t * t * u);
}
inline double x_u(double u, double t) {
    double q = u * u - t;
    return (15.0 / 8.0) * q * q;
}
inline double x_uu(double u, double t) { return (15.0 / 2.0) * (u * u - t) * u; }

inline double y(double u, double t) { return -0.5 * (u * u * u - 3.0 * t * u); }
inline double y_u(double u, double t) { return -1.5 * (u * u - t); }
inline double y_uu(double u, double /*t*/) { return -3.0 * u; }

// Monotone inversion of u -> x(u,t). Bisection with Newton polish; x(.,t) is
// strictly increasing for t<0 and weakly increasing (isolated flats) for t>=0.
inline double u_from_x(double xv, double t, double tol = 1e-15) {
    if (xv == 0.0) return 0.0;
    double hi = std::max(2.0, std::sqrt(std::abs(t)) + 1.0);
    while (x(hi, t) < std::abs(xv)) hi *= 1.5;
    double lo = 0.0;
    double sign = xv < 0 ? -1.0 : 1.0;
    double target = std::abs(xv);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (x(mid, t) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < tol * std::max(1.0, hi)) break;
    }
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        double d = x_u(u, t);
        if (d < 1e-12) break;
        double step = (x(u, t) - target) / d;
        double un = u - step;
        if (un < lo || un > hi) break;
        u = un;
    }
    return sign * u;
}

}  // namespace acurve

// (x, y) point of A_t at parameter u.
inline std::pair<double, double> eval_a_curve(double u, double t) {
    return {acurve::x(u, t), acurve::y(u, t)};
}

// a_t(x): invert the parametrization, then evaluate y.
inline double a_function(double xv, double t) {
    return acurve::y(acurve::u_from_x(xv, t), t);
}

// Odd 1-periodic corrugation profile W_{sigma,t}.
//
// On [0, 1/2]:
//   [0, x_c]        a_t(x/sigma) evaluated through the parametrization
//                   (x_c = sigma * X_CUT with X_CUT = 1.05, covering Op[-sigma,sigma])
//   [x_c, 2 sigma]  slope relaxes from the incoming a_t slope to -2 along
//                   s(x) = -2 + (s_c+2)(1-xi)^khat, matching value, slope and
//                   curvature at the cut
//   [2 sigma, x_f]  the leg: slope eases from -2 to -s_mag and holds
//                   (x_f = 1/2 - 2 sigma)
//   [x_f, 1/2]      constant slope reaching W(1/2) = 0 exactly
// Extended by oddness and 1-periodicity. For t = 1 this realizes the stated
// derivative bounds; the family is continuous in t in (-1, 1].
struct WFunction {
    double sigma = 0;
    double t = 0;

    double x_cut = 0;    // end of the a_t core
    double u_cut = 0;
    double w_cut = 0;    // W value at the cut
    double s_cut = 0;    // slope at the cut
    double khat = 2;     // relaxation exponent
    double v2 = 0;       // value at 2 sigma
    double w_ease = 0;   // slope-ease width at the leg start
    double s_mag = 0;    // leg slope magnitude, clamped to the [-2,0) corridor
    double x_flat = 0;   // = 1/2 - 2 sigma
    double tail_a = 0;   // extra tail steepness when the corridor cannot close W
    double tail_w = 0;   // tail ease width

    static constexpr double kCut = 1.05;  // cut position in a_t units

    static WFunction build(double sigma, double t) {
        if (!(sigma > 0.0 && sigma < 0.125))
            throw std::invalid_argument("WFunction: sigma must lie in (0, 1/8)");
        WFunction w;
        w.sigma = sigma;
        w.t = t;
        w.u_cut = acurve::u_from_x(kCut, t);
        w.x_cut = sigma * kCut;
        w.w_cut = acurve::y(w.u_cut, t);
        double q = w.u_cut * w.u_cut - t;  // > 0 at the cut for t <= 1
        w.s_cut = -(4.0 / (5.0 * sigma)) / q;
        // curvature of a_t(x/sigma) at the cut
        double k_c = (64.0 * w.u_cut) / (75.0 * sigma * sigma * q * q * q * q);
        double width = 2.0 * sigma - w.x_cut;
        w.khat = std::max(2.0, k_c * width / std::max(1e-12, std::abs(w.s_cut + 2.0)));
        w.v2 = w.w_cut - 2.0 * width + (w.s_cut + 2.0) * width / (w.khat + 1.0);
        w.x_flat = 0.5 - 2.0 * sigma;
        double span = w.x_flat - 2.0 * sigma;
        w.w_ease = std::min(2.0 * sigma, span / 4.0);
        // s_mag solves W(1/2) = 0 with constant tail slope -s_mag on [x_f, 1/2]
        w.s_mag = (w.v2 - w.w_ease) / (2.0 * sigma + span - w.w_ease / 2.0);
        if (w.s_mag > 2.0) {
            // corridor saturated: run the leg at -2 and close W in the free
            // tail zone [x_f, 1/2] with an extra C^1 plunge
            w.s_mag = 2.0;
            double w_xf = w.v2 - 2.0 * span;
            w.tail_w = sigma;
            w.tail_a = (w_xf - 2.0 * (2.0 * sigma)) / (1.5 * sigma);
        }
        return w;
    }

    // integral of step_up from 2 sigma to x (quintic smoothstep antiderivative)
    double ease_integral(double xv) const {
        double tau = (xv - 2.0 * sigma) / w_ease;
        if (tau <= 0) return 0.0;
        if (tau >= 1) return w_ease * 0.5 + (xv - 2.0 * sigma - w_ease);
        double t4 = tau * tau * tau * tau;
        return w_ease * t4 * (2.5 - 3.0 * tau + tau * tau);
    }

    // value/derivative on the half period [0, 1/2]
    double eval_half(double xv) const {
        if (xv <= x_cut) {
            double u = acurve::u_from_x(xv / sigma, t);
            return acurve::y(u, t);
        }
        if (xv <= 2.0 * sigma) {
            double width = 2.0 * sigma - x_cut;
            double xi = (xv - x_cut) / width;
            double pow_term = std::pow(1.0 - xi, khat + 1.0);
            return w_cut - 2.0 * (xv - x_cut) +
                   (s_cut + 2.0) * width * (1.0 - pow_term) / (khat + 1.0);
        }
        if (xv <= x_flat)
            return v2 - 2.0 * (xv - 2.0 * sigma) + (2.0 - s_mag) * ease_integral(xv);
        double w_flat = v2 - 2.0 * (x_flat - 2.0 * sigma) + (2.0 - s_mag) * ease_integral(x_flat);
        double w_tail = w_flat - s_mag * (xv - x_flat);
        if (tail_a != 0.0) {
            double tau = (xv - x_flat) / tail_w;
            double ramp = tau <= 0 ? 0.0
                          : tau >= 1
                              ? tail_w * 0.5 + (xv - x_flat - tail_w)
                              : tail_w * tau * tau * tau * tau * (2.5 - 3.0 * tau + tau * tau);
            w_tail -= tail_a * ramp;
        }
        return w_tail;
    }

    double deriv_half(double xv) const {
        if (xv <= x_cut) {
            double u = acurve::u_from_x(xv / sigma, t);
            double xu = acurve::x_u(u, t);
            if (xu < 1e-300) return 1e300;  // the a_t cusp
            return acurve::y_u(u, t) / (sigma * xu);
        }
        if (xv <= 2.0 * sigma) {
            double width = 2.0 * sigma - x_cut;
            double xi = (xv - x_cut) / width;
            return -2.0 + (s_cut + 2.0) * std::pow(1.0 - xi, khat);
        }
        if (xv <= x_flat) return -2.0 + (2.0 - s_mag) * step_up(xv, 2.0 * sigma, 2.0 * sigma + w_ease);
        return -s_mag - tail_a * step_up(xv, x_flat, x_flat + tail_w);
    }

    // reduce to [-1/2, 1/2] and apply oddness
    static double reduce(double xv, double* sign) {
        double r = xv - std::round(xv);
        *sign = r < 0 ? -1.0 : 1.0;
        return std::abs(r);
    }

    double eval(double xv) const {
        double s;
        double r = reduce(xv, &s);
        return s * eval_half(r);
    }

    double deriv(double xv) const {
        double s;
        double r = reduce(xv, &s);
        (void)s;
        return deriv_half(r);  // odd function: derivative is even
    }

    // W value of the composed band profile at curve parameter u
    // (W(sigma x(u,t)) = a_t(x(u,t)) = y(u,t) while inside the core).
    double eval_composed(double u) const {
        double xa = acurve::x(u, t);
        if (std::abs(xa) <= kCut) return acurve::y(u, t);
        return eval(sigma * xa);
    }

    // d/du of the composed profile; finite at the fold u = sqrt(t).
    double deriv_composed(double u) const {
        double xa = acurve::x(u, t);
        if (std::abs(xa) <= kCut) return acurve::y_u(u, t);
        return deriv(sigma * xa) * sigma * acurve::x_u(u, t);
    }
};

inline WFunction build_W(double sigma, double t) { return WFunction::build(sigma, t); }

}  // namespace wrinkle

#endif
