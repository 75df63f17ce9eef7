#pragma once

// Iteration of the single-step maps up to an exit velocity.
//
// One kernel serves both algorithms. The theoretical algorithm (TA)
// tests signs exactly and has no rest threshold; the numerical algorithm
// (NA) replaces the sign tests by a threshold S and additionally stops
// once the velocity norm falls below S_v. At S = S_v = 0 the two
// coincide step for step.
//
// Loop shape, per iteration with xi = k*vx + vy, eta = k*vx - vy:
//   continue while (xi > S or eta > S) and n < n_max and |v| > S_v;
//   branch on the thresholded signs of (xi, eta); recompute xi, eta.
// Stop reasons are reported with priority ExitZone, AlmostAtRest,
// StepCap when several trip at once.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "corner_impact/geometry.hpp"
#include "corner_impact/rules.hpp"
#include "corner_impact/zones.hpp"

namespace corner_impact {

/// Zone-sign threshold used by the reference experiments: twice the
/// binary64 machine epsilon.
inline constexpr double kDefaultZoneThreshold =
    2.0 * std::numeric_limits<double>::epsilon();
/// Almost-at-rest norm threshold.
inline constexpr double kDefaultRestThreshold = 1e-12;
/// Step cap.
inline constexpr long kDefaultStepCap = 10000;

enum class StopReason {
    ExitZone,      ///< both xi_dot and eta_dot fell to <= S
    AlmostAtRest,  ///< |v|_2 fell to <= S_v
    StepCap,       ///< n reached n_max
};

inline std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::ExitZone: return "ExitZone";
        case StopReason::AlmostAtRest: return "AlmostAtRest";
        case StopReason::StepCap: return "StepCap";
    }
    return "?";
}

inline StopReason parse_stop_reason(std::string_view s) {
    if (s == "ExitZone") return StopReason::ExitZone;
    if (s == "AlmostAtRest") return StopReason::AlmostAtRest;
    if (s == "StepCap") return StopReason::StepCap;
    throw std::invalid_argument("parse_stop_reason: unknown reason '" +
                                std::string(s) + "'");
}

struct RunConfig {
    RestitutionMode mode{};
    Corner corner{};
    double S{kDefaultZoneThreshold};
    double Sv{kDefaultRestThreshold};
    long n_max{kDefaultStepCap};
    bool trace{false};
    /// Rescale v0 to unit norm when it is off by more than 1e-9
    /// (the reference experiments assume |v0| = 1).
    bool normalize{true};

    /// Threshold/cap sanity, independent of the corner (run_grid fills
    /// the corner in per case).
    void validate_thresholds() const {
        if (!(S >= 0.0)) throw std::domain_error("RunConfig: S must be >= 0");
        if (!(Sv >= 0.0)) throw std::domain_error("RunConfig: Sv must be >= 0");
        if (n_max < 1) throw std::domain_error("RunConfig: n_max must be >= 1");
    }

    void validate() const {
        if (!(corner.k > 0.0)) {
            throw std::domain_error("RunConfig: corner not initialized");
        }
        validate_thresholds();
    }
};

struct TraceEntry {
    long step{};
    VelocityXY v;
    VelocityXiEta w;
    /// Branch fired at this step; for the final entry, the thresholded
    /// classification at which the loop stopped.
    Zone branch{};
};

struct RunResult {
    VelocityXY v_final;
    long steps{};
    StopReason stop{};
    Zone zone0{};
    std::vector<TraceEntry> trace;  ///< steps + 1 entries when enabled
};

namespace detail {

inline RunResult iterate_impacts(const VelocityXY& v0, double eps,
                                 const Corner& c, double S, double Sv,
                                 long n_max, bool trace_on) {
    RunResult out;
    VelocityXY v = v0;
    double xi = c.k * v.vx + v.vy;
    double eta = c.k * v.vx - v.vy;
    out.zone0 = classify_thresholded({xi, eta}, S);
    long n = 0;
    for (;;) {
        if (!(xi > S || eta > S)) {
            out.stop = StopReason::ExitZone;
            break;
        }
        if (!(norm2_xy(v) > Sv)) {
            out.stop = StopReason::AlmostAtRest;
            break;
        }
        if (!(n < n_max)) {
            out.stop = StopReason::StepCap;
            break;
        }
        const Zone branch = eta > S ? (xi > S ? Zone::Z12 : Zone::Z1)
                                    : Zone::Z2;
        if (trace_on) out.trace.push_back({n, v, {xi, eta}, branch});
        switch (branch) {
            case Zone::Z1: v = step_z1_xy(v, c, eps); break;
            case Zone::Z2: v = step_z2_xy(v, c, eps); break;
            default: v = step_z12_xy(v, c, eps); break;
        }
        xi = c.k * v.vx + v.vy;
        eta = c.k * v.vx - v.vy;
        ++n;
    }
    if (trace_on) {
        out.trace.push_back({n, v, {xi, eta}, classify_thresholded({xi, eta}, S)});
    }
    out.v_final = v;
    out.steps = n;
    return out;
}

}  // namespace detail

/// Theoretical algorithm: exact sign tests, no rest threshold. In the
/// ideal mode this provably reaches Z0; the cap only guards non-ideal
/// runs, whose norm decays geometrically without ever vanishing.
inline RunResult run_ta(const VelocityXY& v0, const RestitutionMode& mode,
                        const Corner& c, long n_cap = 1000000,
                        bool trace = false) {
    if (n_cap < 1) throw std::domain_error("run_ta: n_cap must be >= 1");
    if (!std::isfinite(v0.vx) || !std::isfinite(v0.vy)) {
        throw std::domain_error("run_ta: v0 must be finite");
    }
    return detail::iterate_impacts(v0, mode.eps(), c, 0.0, 0.0, n_cap, trace);
}

/// Numerical algorithm with thresholded sign tests and rest detection.
inline RunResult run_na(const VelocityXY& v0, const RunConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(v0.vx) || !std::isfinite(v0.vy)) {
        throw std::domain_error("run_na: v0 must be finite");
    }
    VelocityXY v = v0;
    if (cfg.normalize) {
        const double n = norm2_xy(v);
        if (std::abs(n - 1.0) > 1e-9) {
            if (n == 0.0) {
                throw std::domain_error("run_na: cannot normalize zero v0");
            }
            std::cerr << "run_na: normalizing v0 (|v0| = " << n << ")\n";
            v = {v.vx / n, v.vy / n, v.spin};
        }
    }
    return detail::iterate_impacts(v, cfg.mode.eps(), cfg.corner, cfg.S,
                                   cfg.Sv, cfg.n_max, cfg.trace);
}

/// One grid cell: a fully resolved solver input.
struct GridCase {
    std::string case_id;
    RestitutionMode mode;
    Corner corner;
    VelocityXY v0;
};

namespace detail {

inline unsigned sweep_thread_count(std::size_t n_cases) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("CORNER_IMPACT_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed >= 1) {
            hw = static_cast<unsigned>(parsed);
        }
    }
    // Runs are a few microseconds each; only fan out for real sweeps.
    if (n_cases < 64) return 1;
    return static_cast<unsigned>(
        std::min<std::size_t>(hw, (n_cases + 63) / 64));
}

}  // namespace detail

/// Run every case with the shared thresholds/cap from `defaults`
/// (mode and corner come from the case). Results keep input order;
/// runs are independent and may execute concurrently.
inline std::vector<RunResult> run_grid(const std::vector<GridCase>& cases,
                                       const RunConfig& defaults) {
    defaults.validate_thresholds();
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const GridCase& gc = cases[i];
        const bool v0_ok = std::isfinite(gc.v0.vx) && std::isfinite(gc.v0.vy) &&
                           !(defaults.normalize && norm2_xy(gc.v0) == 0.0);
        if (!(gc.corner.k > 0.0) || !v0_ok) {
            throw std::domain_error("run_grid: invalid case at index " +
                                    std::to_string(i) + " (" + gc.case_id +
                                    ")");
        }
    }
    std::vector<RunResult> results(cases.size());
    auto run_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            RunConfig cfg = defaults;
            cfg.mode = cases[i].mode;
            cfg.corner = cases[i].corner;
            results[i] = run_na(cases[i].v0, cfg);
        }
    };
    const unsigned n_threads = detail::sweep_thread_count(cases.size());
    if (n_threads <= 1) {
        run_range(0, cases.size());
        return results;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (cases.size() + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(cases.size(), lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
    return results;
}

}  // namespace corner_impact
