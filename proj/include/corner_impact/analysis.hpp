#pragma once

// Convergence machinery for the non-ideal iteration.
//
// Once the multiple-impact transient is over, a run alternates between
// single reflections off the two walls; the composition of two
// consecutive reflections is linear in (xi_dot, eta_dot). H1 is that
// two-step matrix when the phase starts on wall 1, H2 when it starts on
// wall 2; K1, K2 are the same operators in cartesian components,
// conjugate by the coordinate-change matrix B. Their common spectral
// radius lies in [eps, 1) for eps in (0,1) and k in (0,1), certifying
// geometric decay of the velocity, and its value is the decay rate per
// two steps.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "corner_impact/geometry.hpp"

namespace corner_impact {

struct Mat2 {
    double a11{}, a12{}, a21{}, a22{};

    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }

    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }

    std::array<double, 2> apply(const std::array<double, 2>& v) const {
        return {a11 * v[0] + a12 * v[1], a21 * v[0] + a22 * v[1]};
    }
};

inline Mat2 inverse(const Mat2& m) {
    const double d = m.det();
    if (d == 0.0) throw std::domain_error("inverse: singular matrix");
    return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

namespace detail {
inline void check_eps_beta(double eps, double beta) {
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw std::domain_error("iteration matrix: eps must lie in [0, 1)");
    }
    if (!(beta > -1.0 && beta < 1.0)) {
        throw std::domain_error("iteration matrix: beta must lie in (-1, 1)");
    }
}
}  // namespace detail

/// Two-step matrix for the wall-1-first phase, wall coordinates.
inline Mat2 build_h1(double eps, double beta) {
    detail::check_eps_beta(eps, beta);
    const double b = beta * (1.0 + eps);
    return {-eps, -eps * b, b, b * b - eps};
}

/// Two-step matrix for the wall-2-first phase; same spectrum as H1.
inline Mat2 build_h2(double eps, double beta) {
    detail::check_eps_beta(eps, beta);
    const double b = beta * (1.0 + eps);
    return {b * b - eps, b, -eps * b, -eps};
}

/// Coordinate change (x, y) -> (xi, eta) as a matrix.
inline Mat2 build_b(double k) {
    if (!(k > 0.0)) throw std::domain_error("build_b: k must be positive");
    return {k, 1.0, k, -1.0};
}

/// Cartesian counterpart of H1: K1 = B^-1 H1 B, written in closed form.
inline Mat2 build_k1(double eps, double k) {
    if (!(k > 0.0)) throw std::domain_error("build_k1: k must be positive");
    const double k2 = k * k;
    const double d2 = (1.0 + k2) * (1.0 + k2);
    const double c2 = (1.0 + eps) * (1.0 + eps);
    const double off = k * (1.0 - k2) * c2 / d2;
    return {((1.0 - eps * k2) * (1.0 - eps * k2) - k2 * c2) / d2, off, -off,
            ((eps - k2) * (eps - k2) - k2 * c2) / d2};
}

inline Mat2 build_k2(double eps, double k) {
    Mat2 m = build_k1(eps, k);
    return {m.a11, -m.a12, -m.a21, m.a22};
}

enum class EigenBranch { Complex, Repeated, Real };

struct SpectrumInfo {
    double rho{};
    EigenBranch branch{};
    std::complex<double> lambda1;
    std::complex<double> lambda2;
};

/// Eigenvalues of a 2x2 matrix in closed form. Discriminants within
/// 1e-14 of zero count as the repeated root tr/2.
inline SpectrumInfo spectrum(const Mat2& m) {
    const double tr = m.trace();
    const double det = m.det();
    const double disc = tr * tr - 4.0 * det;
    SpectrumInfo s;
    if (std::abs(disc) <= 1e-14) {
        s.branch = EigenBranch::Repeated;
        s.lambda1 = s.lambda2 = tr / 2.0;
        s.rho = std::abs(tr) / 2.0;
    } else if (disc < 0.0) {
        s.branch = EigenBranch::Complex;
        const double im = std::sqrt(-disc) / 2.0;
        s.lambda1 = {tr / 2.0, im};
        s.lambda2 = {tr / 2.0, -im};
        s.rho = std::sqrt(det);  // |lambda|^2 = det > 0 here
    } else {
        s.branch = EigenBranch::Real;
        const double root = std::sqrt(disc);
        s.lambda1 = (tr + root) / 2.0;
        s.lambda2 = (tr - root) / 2.0;
        s.rho = std::max(std::abs(tr + root), std::abs(tr - root)) / 2.0;
    }
    return s;
}

inline double spectral_radius(const Mat2& m) { return spectrum(m).rho; }

inline const char* to_string(EigenBranch b) {
    switch (b) {
        case EigenBranch::Complex: return "complex";
        case EigenBranch::Repeated: return "repeated";
        case EigenBranch::Real: return "real";
    }
    return "?";
}

/// Evaluate rho(H1) for the given (eps, k) and assert the certified
/// bounds eps <= rho < 1. A violation would contradict the convergence
/// theorem, so it surfaces as logic_error rather than a return value.
inline double rho_bound_check(double eps, double k) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::domain_error("rho_bound_check: eps must lie in (0, 1)");
    }
    if (!(k > 0.0 && k < 1.0)) {
        throw std::domain_error("rho_bound_check: k must lie in (0, 1)");
    }
    const double beta = (1.0 - k * k) / (1.0 + k * k);
    const double rho = spectral_radius(build_h1(eps, beta));
    if (!(rho >= eps && rho < 1.0)) {
        throw std::logic_error("rho_bound_check: rho(H1) outside [eps, 1)");
    }
    return rho;
}

/// Empirical decay rate per two steps, fitted from a solver trace.
///
/// The first entry is dropped (a possible multiple-impact transient);
/// the fit runs over the every-other-step subsequence starting there,
/// which is the orbit of one two-step matrix. Returns exp(slope) of the
/// least-squares line through log|v| against the subsequence index,
/// directly comparable with rho(H1).
inline double estimate_rate(const std::vector<VelocityXY>& trace) {
    if (trace.size() < 8) {
        throw std::domain_error("estimate_rate: need a trace of length >= 8");
    }
    std::vector<double> norms(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        norms[i] = norm2_xy(trace[i]);
    }
    for (std::size_t i = 0; i + 1 < norms.size(); ++i) {
        if (!(norms[i + 1] < norms[i]) || !(norms[i + 1] > 0.0)) {
            throw std::domain_error(
                "estimate_rate: norms must be positive and strictly "
                "decreasing");
        }
    }
    std::vector<double> logs;
    for (std::size_t i = 1; i < norms.size(); i += 2) {
        logs.push_back(std::log(norms[i]));
    }
    const std::size_t n = logs.size();
    const double h_mean = static_cast<double>(n - 1) / 2.0;
    double y_mean = 0.0;
    for (double y : logs) y_mean += y;
    y_mean /= static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        const double dh = static_cast<double>(h) - h_mean;
        num += dh * (logs[h] - y_mean);
        den += dh * dh;
    }
    return std::exp(num / den);
}

}  // namespace corner_impact
