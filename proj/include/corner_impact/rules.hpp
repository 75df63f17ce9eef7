#pragma once

// Single-step impact maps v_n -> v_{n+1}.
//
// One unified kernel covers both restitution regimes: the ideal
// (energy-conserving) step is the Newtonian step at eps = 1. Per-zone
// branch functions are exposed individually because the thresholded
// solver selects branches itself; the dispatchers classify exactly and
// then delegate.
//
// oracle_step() rebuilds the same maps from first principles (orthogonal
// projections under the vertical metric and the lambda-scaled multiple
// impulse) and exists so tests can validate the closed forms against an
// independent route.

#include <cmath>
#include <stdexcept>

#include "corner_impact/geometry.hpp"
#include "corner_impact/zones.hpp"

namespace corner_impact {

/// Restitution regime: Ideal, or Newtonian with eps in [0, 1).
/// Ideal behaves exactly like Newtonian at eps = 1; the unified step
/// formulas take the numeric eps() value.
class RestitutionMode {
  public:
    constexpr RestitutionMode() = default;  // ideal

    static constexpr RestitutionMode ideal() { return RestitutionMode{}; }

    static RestitutionMode newtonian(double eps) {
        if (!(eps >= 0.0 && eps < 1.0)) {
            throw std::domain_error(
                "RestitutionMode::newtonian: eps must lie in [0, 1); use "
                "ideal() for eps = 1");
        }
        return RestitutionMode{eps, false};
    }

    /// Either of the two, from the numeric coefficient in [0, 1].
    static RestitutionMode from_eps(double eps) {
        return eps == 1.0 ? ideal() : newtonian(eps);
    }

    constexpr double eps() const { return eps_; }
    constexpr bool is_ideal() const { return ideal_; }

  private:
    constexpr RestitutionMode(double eps, bool ideal)
        : eps_(eps), ideal_(ideal) {}

    double eps_{1.0};
    bool ideal_{true};
};

/// Reactive impulse on the linear velocity (unit mass): v_new = v_old + I.
struct Impulse {
    double ix{};
    double iy{};
};

inline VelocityXY apply_impulse(const VelocityXY& v, const Impulse& imp) {
    return {v.vx + imp.ix, v.vy + imp.iy, v.spin};
}

namespace detail {
inline void check_eps_unified(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::domain_error("impact step: eps must lie in [0, 1]");
    }
}
}  // namespace detail

// ---------------------------------------------------------------------
// Per-zone branches, cartesian components. eps in [0, 1]; eps = 1 ideal.
// ---------------------------------------------------------------------

/// Reflection off wall 1 (k*x - y = 0).
inline VelocityXY step_z1_xy(const VelocityXY& v, const Corner& c,
                             double eps) {
    detail::check_eps_unified(eps);
    const double k = c.k;
    const double k2 = k * k;
    const double d = 1.0 + k2;
    return {(1.0 - eps * k2) / d * v.vx + (1.0 + eps) * k / d * v.vy,
            (1.0 + eps) * k / d * v.vx - (eps - k2) / d * v.vy, v.spin};
}

/// Reflection off wall 2 (k*x + y = 0).
inline VelocityXY step_z2_xy(const VelocityXY& v, const Corner& c,
                             double eps) {
    detail::check_eps_unified(eps);
    const double k = c.k;
    const double k2 = k * k;
    const double d = 1.0 + k2;
    return {(1.0 - eps * k2) / d * v.vx - (1.0 + eps) * k / d * v.vy,
            -(1.0 + eps) * k / d * v.vx - (eps - k2) / d * v.vy, v.spin};
}

/// Multiple impact: nonlinear in the components. Undefined at v = 0.
inline VelocityXY step_z12_xy(const VelocityXY& v, const Corner& c,
                              double eps) {
    detail::check_eps_unified(eps);
    const double k2 = c.k * c.k;
    const double k4 = k2 * k2;
    const double x2 = v.vx * v.vx;
    const double y2 = v.vy * v.vy;
    const double den = k4 * x2 + y2;
    if (den == 0.0) {
        throw std::domain_error("step_z12_xy: zero velocity is degenerate");
    }
    return {(-eps * k4 * x2 + (1.0 - (1.0 + eps) * k2) * y2) / den * v.vx,
            (k2 * (k2 - (1.0 + eps)) * x2 - eps * y2) / den * v.vy, v.spin};
}

// ---------------------------------------------------------------------
// Per-zone branches, wall coordinates.
// ---------------------------------------------------------------------

inline VelocityXiEta step_z1_xieta(const VelocityXiEta& v, const Corner& c,
                                   double eps) {
    detail::check_eps_unified(eps);
    return {v.xi_dot + (1.0 + eps) * c.beta * v.eta_dot, -eps * v.eta_dot};
}

inline VelocityXiEta step_z2_xieta(const VelocityXiEta& v, const Corner& c,
                                   double eps) {
    detail::check_eps_unified(eps);
    return {-eps * v.xi_dot, v.eta_dot + (1.0 + eps) * c.beta * v.xi_dot};
}

inline VelocityXiEta step_z12_xieta(const VelocityXiEta& v, const Corner& c,
                                    double eps) {
    detail::check_eps_unified(eps);
    const double k2 = c.k * c.k;
    const double sq = v.xi_dot * v.xi_dot + v.eta_dot * v.eta_dot;
    const double cross = v.xi_dot * v.eta_dot;
    const double den = (1.0 + k2) * sq - 2.0 * (1.0 - k2) * cross;
    if (den == 0.0) {
        throw std::domain_error("step_z12_xieta: zero velocity is degenerate");
    }
    const double diag = eps * (1.0 + k2) * sq + 2.0 * (1.0 - k2) * cross;
    const double off = (1.0 + eps) * (1.0 - k2) * sq;
    return {(-diag * v.xi_dot + off * v.eta_dot) / den,
            (off * v.xi_dot - diag * v.eta_dot) / den};
}

// ---------------------------------------------------------------------
// Dispatchers: classify exactly, then apply the matching branch.
// ---------------------------------------------------------------------

inline VelocityXY step_newtonian_xy(const VelocityXY& v, const Corner& c,
                                    double eps) {
    switch (classify_exact(xy_to_xieta(v, c))) {
        case Zone::Z0: return v;
        case Zone::Z1: return step_z1_xy(v, c, eps);
        case Zone::Z2: return step_z2_xy(v, c, eps);
        case Zone::Z12: return step_z12_xy(v, c, eps);
    }
    throw std::logic_error("unreachable");
}

inline VelocityXiEta step_newtonian_xieta(const VelocityXiEta& v,
                                          const Corner& c, double eps) {
    switch (classify_exact(v)) {
        case Zone::Z0: return v;
        case Zone::Z1: return step_z1_xieta(v, c, eps);
        case Zone::Z2: return step_z2_xieta(v, c, eps);
        case Zone::Z12: return step_z12_xieta(v, c, eps);
    }
    throw std::logic_error("unreachable");
}

inline VelocityXY step_ideal_xy(const VelocityXY& v, const Corner& c) {
    return step_newtonian_xy(v, c, 1.0);
}

inline VelocityXiEta step_ideal_xieta(const VelocityXiEta& v,
                                      const Corner& c) {
    return step_newtonian_xieta(v, c, 1.0);
}

/// Ideal step in polar form: the speed is conserved, only the direction
/// moves. Z1/Z2 are the reflections phi -> -phi +- 2*alpha; the multiple
/// impact updates (cos, sin) through the same rational map as the
/// cartesian branch. Zone membership is decided in wall coordinates.
inline VelocityAngular step_ideal_angular(const VelocityAngular& v,
                                          const Corner& c) {
    if (!(v.speed > 0.0)) {
        throw std::domain_error("step_ideal_angular: speed must be positive");
    }
    const double cs = std::cos(v.phi);
    const double sn = std::sin(v.phi);
    switch (classify_exact({c.k * cs + sn, c.k * cs - sn})) {
        case Zone::Z0: return v;
        case Zone::Z1: return {v.speed, wrap_angle(-v.phi + 2.0 * c.alpha)};
        case Zone::Z2: return {v.speed, wrap_angle(-v.phi - 2.0 * c.alpha)};
        case Zone::Z12: {
            const double k2 = c.k * c.k;
            const double k4 = k2 * k2;
            const double c2 = cs * cs;
            const double s2 = sn * sn;
            const double den = k4 * c2 + s2;
            const double cs_next =
                -((k4 * c2 - s2) / den + 2.0 * k2 * s2 / den) * cs;
            const double sn_next =
                ((k4 * c2 - s2) / den - 2.0 * k2 * c2 / den) * sn;
            return {v.speed, std::atan2(sn_next, cs_next)};
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------
// Constitutive-law oracle.
// ---------------------------------------------------------------------

namespace detail {

struct Vertical {
    double x{};
    double y{};
};

/// Component of v orthogonal to wall 1 under the vertical metric.
inline Vertical orth_wall1(const VelocityXY& v, const Corner& c) {
    const double s = (c.k * v.vx - v.vy) / (1.0 + c.k * c.k);
    return {c.k * s, -s};
}

/// Component of v orthogonal to wall 2.
inline Vertical orth_wall2(const VelocityXY& v, const Corner& c) {
    const double s = (c.k * v.vx + v.vy) / (1.0 + c.k * c.k);
    return {c.k * s, s};
}

/// Scalar product of two verticals under diag(m, m, A); the spin
/// components of impact verticals are identically zero.
inline double scal(const Vertical& a, const Vertical& b,
                   const VerticalMetric& g) {
    return g.m * (a.x * b.x + a.y * b.y);
}

}  // namespace detail

/// Impulse assigned by the constitutive law:
///   no impact       -> 0
///   single impact i -> -(1 + eps) * orth_i(v)      (eps = 1 when ideal)
///   multiple impact -> lambda * (orth_1(v) + orth_2(v)),
///     lambda = -(1 + eps) * Phi(v, w) / Phi(w, w), w = orth_1 + orth_2.
/// The metric mass cancels from lambda; it is threaded through so tests
/// can confirm that.
inline Impulse oracle_impulse(const VelocityXY& v, const Corner& c,
                              const RestitutionMode& mode,
                              const VerticalMetric& metric = {}) {
    const double coef = 1.0 + mode.eps();
    const bool hits_wall1 = c.k * v.vx - v.vy > 0.0;
    const bool hits_wall2 = c.k * v.vx + v.vy > 0.0;
    if (!hits_wall1 && !hits_wall2) return {0.0, 0.0};
    if (hits_wall1 != hits_wall2) {
        const detail::Vertical p = hits_wall1 ? detail::orth_wall1(v, c)
                                              : detail::orth_wall2(v, c);
        return {-coef * p.x, -coef * p.y};
    }
    const detail::Vertical p1 = detail::orth_wall1(v, c);
    const detail::Vertical p2 = detail::orth_wall2(v, c);
    const detail::Vertical w{p1.x + p2.x, p1.y + p2.y};
    const double ww = detail::scal(w, w, metric);
    if (ww == 0.0) {
        throw std::domain_error("oracle_impulse: degenerate multiple impact");
    }
    const double lambda =
        -coef * detail::scal({v.vx, v.vy}, w, metric) / ww;
    return {lambda * w.x, lambda * w.y};
}

inline VelocityXY oracle_step(const VelocityXY& v, const Corner& c,
                              const RestitutionMode& mode,
                              const VerticalMetric& metric = {}) {
    return apply_impulse(v, oracle_impulse(v, c, mode, metric));
}

}  // namespace corner_impact
