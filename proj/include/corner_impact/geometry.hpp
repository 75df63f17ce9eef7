#pragma once

// Corner geometry and the three velocity representations used by the
// impact rules: cartesian (vx, vy), wall-aligned (xi_dot, eta_dot) and
// polar (speed, phi).  All types are immutable values; all operations
// are pure functions.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace corner_impact {

/// Wedge geometry. The walls form an angle 2*alpha and are described by
/// k*x - y = 0 (wall 1) and k*x + y = 0 (wall 2) with k = tan(alpha).
/// beta = (1 - k^2)/(1 + k^2) shows up throughout the two-step analysis.
/// Build through make_corner(); treat the fields as read-only.
struct Corner {
    double alpha{};  ///< half-angle of the wedge, radians, in (0, pi/2)
    double k{};      ///< wall slope, tan(alpha) > 0
    double beta{};   ///< (1 - k^2)/(1 + k^2), in (-1, 1)
};

/// Disk linear velocity in cartesian components plus optional spin.
/// Impact operations never touch the spin; it rides along unchanged.
struct VelocityXY {
    double vx{};
    double vy{};
    double spin{0.0};
};

/// Velocity projected onto the wall directions:
/// xi_dot = k*vx + vy, eta_dot = k*vx - vy.
/// eta_dot > 0 means approach toward wall 1, xi_dot > 0 toward wall 2.
struct VelocityXiEta {
    double xi_dot{};
    double eta_dot{};
};

/// Velocity in polar form (speed > 0, phi in (-pi, pi]).
struct VelocityAngular {
    double speed{};
    double phi{};
};

/// Disk mass/inertia pair defining the kinetic-energy scalar product
/// diag(m, m, A) on (vx, vy, spin). The impact rules fix m = 1; the
/// general form exists for the constitutive-law oracle.
struct VerticalMetric {
    double m{1.0};
    double A{1.0};
};

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Build a Corner from the half-angle. Requires alpha in (0, pi/2), open
/// on both sides.
inline Corner make_corner(double alpha) {
    if (!(alpha > 0.0 && alpha < std::numbers::pi / 2)) {
        throw std::domain_error("make_corner: alpha must lie in (0, pi/2)");
    }
    const double k = std::tan(alpha);
    return Corner{alpha, k, (1.0 - k * k) / (1.0 + k * k)};
}

inline VelocityXiEta xy_to_xieta(const VelocityXY& v, const Corner& c) {
    return {c.k * v.vx + v.vy, c.k * v.vx - v.vy};
}

/// Inverse of xy_to_xieta. Spin is not representable in (xi, eta); pass
/// it explicitly when it matters.
inline VelocityXY xieta_to_xy(const VelocityXiEta& v, const Corner& c,
                              double spin = 0.0) {
    return {(v.xi_dot + v.eta_dot) / (2.0 * c.k), (v.xi_dot - v.eta_dot) / 2.0,
            spin};
}

/// Euclidean norm of the linear part; spin excluded.
inline double norm2_xy(const VelocityXY& v) {
    return std::sqrt(v.vx * v.vx + v.vy * v.vy);
}

/// Same norm evaluated directly in wall coordinates:
/// |v|^2 = (1+k^2)/(4k^2) (xi^2 + eta^2) + (1-k^2)/(2k^2) xi*eta.
inline double norm2_xieta(const VelocityXiEta& v, const Corner& c) {
    const double k2 = c.k * c.k;
    const double sq = v.xi_dot * v.xi_dot + v.eta_dot * v.eta_dot;
    const double cross = v.xi_dot * v.eta_dot;
    return std::sqrt((1.0 + k2) / (4.0 * k2) * sq +
                     (1.0 - k2) / (2.0 * k2) * cross);
}

/// Normalize an angle to (-pi, pi].
inline double wrap_angle(double phi) {
    double w = std::remainder(phi, 2.0 * std::numbers::pi);
    if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
    return w;
}

inline VelocityXY angular_to_xy(const VelocityAngular& v, double spin = 0.0) {
    return {v.speed * std::cos(v.phi), v.speed * std::sin(v.phi), spin};
}

inline VelocityAngular xy_to_angular(const VelocityXY& v) {
    return {norm2_xy(v), wrap_angle(std::atan2(v.vy, v.vx))};
}

/// Matrix of the vertical metric in (xi_dot, eta_dot, spin) coordinates.
/// The off-diagonal block makes the wall coordinates non-orthogonal
/// unless k = 1.
inline Mat3 gamma_matrix(const VerticalMetric& g, const Corner& c) {
    const double k2 = c.k * c.k;
    const double d = g.m * (1.0 + k2) / (4.0 * k2);
    const double o = g.m * (1.0 - k2) / (4.0 * k2);
    return {{{d, o, 0.0}, {o, d, 0.0}, {0.0, 0.0, g.A}}};
}

/// Quadratic form w^T M w.
inline double quad_form(const Mat3& m, const Vec3& w) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) acc += w[i] * m[i][j] * w[j];
    return acc;
}

}  // namespace corner_impact
