#pragma once

// Partition of velocity space by the signs of (xi_dot, eta_dot):
//   Z0  exit (no impact)      xi <= 0 and eta <= 0
//   Z1  impact with wall 1    xi <= 0 and eta  > 0
//   Z2  impact with wall 2    xi  > 0 and eta <= 0
//   Z12 multiple impact       xi  > 0 and eta  > 0
// The thresholded variant replaces 0 by S >= 0 so that sign decisions
// survive floating-point noise on nearly-zero components.

#include <stdexcept>
#include <string>
#include <string_view>

#include "corner_impact/geometry.hpp"

namespace corner_impact {

enum class Zone { Z0, Z1, Z2, Z12 };

inline Zone classify_thresholded(const VelocityXiEta& v, double S) {
    if (!(S >= 0.0)) {
        throw std::domain_error("classify_thresholded: S must be >= 0");
    }
    const bool xi_pos = v.xi_dot > S;
    const bool eta_pos = v.eta_dot > S;
    if (xi_pos) return eta_pos ? Zone::Z12 : Zone::Z2;
    return eta_pos ? Zone::Z1 : Zone::Z0;
}

inline Zone classify_exact(const VelocityXiEta& v) {
    return classify_thresholded(v, 0.0);
}

/// Zone of (vx, -vy) given the zone of (vx, vy); the wedge is mirror
/// symmetric about its bisector, which swaps the two walls.
inline Zone reflect_symmetry(Zone z) {
    switch (z) {
        case Zone::Z1: return Zone::Z2;
        case Zone::Z2: return Zone::Z1;
        default: return z;
    }
}

inline std::string_view to_string(Zone z) {
    switch (z) {
        case Zone::Z0: return "Z0";
        case Zone::Z1: return "Z1";
        case Zone::Z2: return "Z2";
        case Zone::Z12: return "Z12";
    }
    return "?";
}

inline Zone parse_zone(std::string_view s) {
    if (s == "Z0") return Zone::Z0;
    if (s == "Z1") return Zone::Z1;
    if (s == "Z2") return Zone::Z2;
    if (s == "Z12") return Zone::Z12;
    throw std::invalid_argument("parse_zone: unknown zone '" + std::string(s) +
                                "'");
}

}  // namespace corner_impact
