#ifndef WRINKLE_SMOOTH_HPP
#define WRINKLE_SMOOTH_HPP

#include <algorithm>
#include <cmath>

namespace wrinkle {

// C^2 quintic ramp on [0,1]; exact 0/1 outside.
inline double smoothstep01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline double smoothstep01_d(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return t * t * (30.0 + t * (-60.0 + 30.0 * t));
}

// 0 at x<=x0, 1 at x>=x1.
inline double step_up(double x, double x0, double x1) {
    return smoothstep01((x - x0) / (x1 - x0));
}
inline double step_up_d(double x, double x0, double x1) {
    return smoothstep01_d((x - x0) / (x1 - x0)) / (x1 - x0);
}

// 1 at x<=x0, 0 at x>=x1.
inline double step_down(double x, double x0, double x1) {
    return 1.0 - step_up(x, x0, x1);
}
inline double step_down_d(double x, double x0, double x1) {
    return -step_up_d(x, x0, x1);
}

// Plateau bump: 0 outside [a,d], ramps on [a,b] and [c,d], 1 on [b,c].
inline double bump_plateau(double x, double a, double b, double c, double d) {
    if (x <= a || x >= d) return 0.0;
    if (x < b) return step_up(x, a, b);
    if (x <= c) return 1.0;
    return step_down(x, c, d);
}
inline double bump_plateau_d(double x, double a, double b, double c, double d) {
    if (x <= a || x >= d) return 0.0;
    if (x < b) return step_up_d(x, a, b);
    if (x <= c) return 0.0;
    return step_down_d(x, c, d);
}

// Even bump in x: 1 on |x|<=x0, 0 at |x|>=x1.
inline double even_cutoff(double x, double x0, double x1) {
    return step_down(std::abs(x), x0, x1);
}
inline double even_cutoff_d(double x, double x0, double x1) {
    double s = x < 0 ? -1.0 : 1.0;
    return s * step_down_d(std::abs(x), x0, x1);
}

}  // namespace wrinkle

#endif
