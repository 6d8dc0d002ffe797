#ifndef WRINKLE_GRASSMANN_HPP
#define WRINKLE_GRASSMANN_HPP

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>

#include "wrinkle/chart.hpp"

namespace wrinkle {

// An n-plane in R^m held as an orthonormal frame (columns). Hypersurface
// charts additionally carry an oriented unit normal.
struct GrassPoint {
    Mat frame;                        // m x n, orthonormal columns
    std::optional<Vec> oriented_normal;  // unit vector in R^m, perpendicular to frame

    int n() const { return static_cast<int>(frame.cols()); }
    int m() const { return static_cast<int>(frame.rows()); }

    void check(double tol = 1e-12) const {
        Mat gram = frame.transpose() * frame;
        if ((gram - Mat::Identity(n(), n())).cwiseAbs().maxCoeff() > tol * 10)
            throw std::invalid_argument("GrassPoint: frame not orthonormal");
        if (oriented_normal) {
            if ((frame.transpose() * *oriented_normal).cwiseAbs().maxCoeff() > 1e-9)
                throw std::invalid_argument("GrassPoint: normal not perpendicular to frame");
        }
    }
};

// Orthonormalize the columns of a full-rank m x n matrix.
inline Mat orthonormalize(const Mat& a, double rank_tol = 1e-12) {
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ() * Mat::Identity(a.rows(), a.cols());
    Mat r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    for (int i = 0; i < a.cols(); ++i) {
        if (std::abs(r(i, i)) < rank_tol)
            throw std::invalid_argument("orthonormalize: rank-deficient input");
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    }
    return q;
}

inline GrassPoint plane_from_vectors(const Mat& spanning) {
    GrassPoint g;
    g.frame = orthonormalize(spanning);
    return g;
}

// smallest/largest singular value ratio of a rectangular matrix
inline double svd_rank_ratio(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0.0;
    return s(s.size() - 1) / s(0);
}

// Largest principal angle between two n-planes (same ambient dimension).
// Uses the sine form for accuracy at small angles; arguments are ordered
// canonically first, so the result is exactly symmetric in (a, b).
inline double angle(const GrassPoint& a_in, const GrassPoint& b_in) {
    if (a_in.n() != b_in.n() || a_in.m() != b_in.m())
        throw std::invalid_argument("angle: dimension mismatch");
    auto lex_less = [](const Mat& x, const Mat& y) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x.data()[i] < y.data()[i]) return true;
            if (x.data()[i] > y.data()[i]) return false;
        }
        return false;
    };
    const bool swap = lex_less(b_in.frame, a_in.frame);
    const GrassPoint& a = swap ? b_in : a_in;
    const GrassPoint& b = swap ? a_in : b_in;
    Mat cosmat = a.frame.transpose() * b.frame;
    Eigen::JacobiSVD<Mat> svdc(cosmat);
    double c = std::clamp(svdc.singularValues().minCoeff(), -1.0, 1.0);
    Mat res_ab = b.frame - a.frame * cosmat;
    Mat res_ba = a.frame - b.frame * cosmat.transpose();
    Eigen::JacobiSVD<Mat> svd_ab(res_ab);
    Eigen::JacobiSVD<Mat> svd_ba(res_ba);
    double s = std::min(1.0, std::max(svd_ab.singularValues().maxCoeff(),
                                      svd_ba.singularValues().maxCoeff()));
    return std::atan2(s, c);
}

// Spherical angle between oriented normals.
inline double oriented_angle(const GrassPoint& a, const GrassPoint& b) {
    if (!a.oriented_normal || !b.oriented_normal)
        throw std::invalid_argument("oriented_angle: missing orientation");
    double c = a.oriented_normal->dot(*b.oriented_normal);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

inline double angle_to_pole(const GrassPoint& g, const Vec& pole) {
    if (!g.oriented_normal)
        throw std::invalid_argument("angle_to_pole: missing orientation");
    double c = g.oriented_normal->dot(pole);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace wrinkle

#endif
