#pragma once

// Experiment harness: the default 7x7x7 sweep grid, table emission in
// CSV/markdown/JSON, and regression comparison against a golden table.
//
// Grid cells are labelled "i.j.k" (1-based indices into the eps, alpha
// and v0 lists). Initial velocities are given symbolically as functions
// of the wall slope k and normalized to unit norm at expansion time.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "corner_impact/geometry.hpp"
#include "corner_impact/solvers.hpp"
#include "corner_impact/zones.hpp"

namespace corner_impact {

/// One symbolic velocity component c * k^p with p in {-1, 0, 1}.
struct V0Component {
    double coef{};
    int k_power{};

    double eval(double k) const {
        if (k_power == 0) return coef;
        return k_power > 0 ? coef * k : coef / k;
    }
};

/// Parse "1", "-1", "k", "k/3", "2k/3", "1/k", "0.5k", ...
inline V0Component parse_v0_component(std::string_view s) {
    V0Component out{1.0, 0};
    std::string text(s);
    const char* p = text.c_str();
    char* end = nullptr;
    bool have_coef = false;
    double coef = std::strtod(p, &end);
    if (end != p) {
        out.coef = coef;
        have_coef = true;
        p = end;
    }
    if (*p == '*') ++p;
    if (*p == 'k') {
        out.k_power = 1;
        ++p;
    }
    if (*p == '/') {
        ++p;
        if (*p == 'k') {
            out.k_power -= 1;
            ++p;
        } else {
            const double q = std::strtod(p, &end);
            if (end == p || q == 0.0) {
                throw std::invalid_argument(
                    "parse_v0_component: bad denominator in '" + text + "'");
            }
            out.coef /= q;
            p = end;
        }
    }
    if (*p != '\0' || (!have_coef && out.k_power == 0)) {
        throw std::invalid_argument("parse_v0_component: cannot parse '" +
                                    text + "'");
    }
    return out;
}

/// Symbolic initial velocity (vx(k), vy(k)).
struct V0Spec {
    std::string label;
    V0Component x;
    V0Component y;

    VelocityXY eval(double k) const { return {x.eval(k), y.eval(k)}; }
};

inline V0Spec parse_v0_spec(std::string_view s) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) {
        throw std::invalid_argument("parse_v0_spec: expected 'x,y' in '" +
                                    std::string(s) + "'");
    }
    return {std::string(s), parse_v0_component(s.substr(0, comma)),
            parse_v0_component(s.substr(comma + 1))};
}

struct GridSpec {
    std::vector<double> eps_values;
    std::vector<double> alpha_values;
    std::vector<V0Spec> v0_specs;

    /// The reference 7x7x7 experiment grid.
    static GridSpec paper_default() {
        constexpr double pi = std::numbers::pi;
        GridSpec g;
        g.eps_values = {1.0, 0.95, 0.75, 0.5, 0.25, 0.05, 0.0};
        g.alpha_values = {pi / 4,  pi / 6,  pi / 8, pi / 12,
                          pi / 16, pi / 32, pi / 64};
        for (const char* s : {"1,0", "1,k/3", "1,2k/3", "1,k", "1,1/k", "0,1",
                              "-1,k"}) {
            g.v0_specs.push_back(parse_v0_spec(s));
        }
        return g;
    }
};

/// Expand a grid spec into solver-ready cases, eps-major then alpha then
/// v0, with unit-normalized initial velocities.
inline std::vector<GridCase> expand_grid(const GridSpec& spec) {
    if (spec.eps_values.empty() || spec.alpha_values.empty() ||
        spec.v0_specs.empty()) {
        throw std::invalid_argument("expand_grid: empty grid dimension");
    }
    std::vector<GridCase> cases;
    cases.reserve(spec.eps_values.size() * spec.alpha_values.size() *
                  spec.v0_specs.size());
    for (std::size_t i = 0; i < spec.eps_values.size(); ++i) {
        const RestitutionMode mode =
            RestitutionMode::from_eps(spec.eps_values[i]);
        for (std::size_t j = 0; j < spec.alpha_values.size(); ++j) {
            const Corner corner = make_corner(spec.alpha_values[j]);
            for (std::size_t k = 0; k < spec.v0_specs.size(); ++k) {
                VelocityXY v0 = spec.v0_specs[k].eval(corner.k);
                const double n = norm2_xy(v0);
                if (!std::isfinite(n) || n == 0.0) {
                    throw std::domain_error(
                        "expand_grid: v0 spec '" + spec.v0_specs[k].label +
                        "' is degenerate at k = " + std::to_string(corner.k));
                }
                v0 = {v0.vx / n, v0.vy / n};
                cases.push_back({std::to_string(i + 1) + "." +
                                     std::to_string(j + 1) + "." +
                                     std::to_string(k + 1),
                                 mode, corner, v0});
            }
        }
    }
    return cases;
}

struct TableRow {
    std::string case_id;
    VelocityXY v0;
    VelocityXY v_final;
    double norm_f{};
    Zone zone0{};
    long steps{};
    StopReason stop{};
};

inline std::vector<TableRow> make_rows(const std::vector<GridCase>& cases,
                                       const std::vector<RunResult>& results) {
    if (cases.size() != results.size()) {
        throw std::invalid_argument("make_rows: size mismatch");
    }
    std::vector<TableRow> rows(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        rows[i] = {cases[i].case_id, cases[i].v0,
                   results[i].v_final, norm2_xy(results[i].v_final),
                   results[i].zone0,  results[i].steps,
                   results[i].stop};
    }
    return rows;
}

/// Expand, run and collect the whole grid with shared solver settings.
inline std::vector<TableRow> run_table(const GridSpec& spec,
                                       const RunConfig& defaults) {
    const std::vector<GridCase> cases = expand_grid(spec);
    return make_rows(cases, run_grid(cases, defaults));
}

enum class TableFormat { Csv, Markdown, Json };

inline TableFormat parse_table_format(std::string_view s) {
    if (s == "csv") return TableFormat::Csv;
    if (s == "md" || s == "markdown") return TableFormat::Markdown;
    if (s == "json") return TableFormat::Json;
    throw std::invalid_argument("unknown table format '" + std::string(s) +
                                "'");
}

inline constexpr std::string_view kTableCsvHeader =
    "case_id,x0,y0,xf,yf,norm_f,zone0,steps,stop";

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

/// Markdown stop column mirrors the reference tables: the run either
/// exits through Z0 or is stopped by the norm threshold.
inline std::string_view stop_md(StopReason r) {
    switch (r) {
        case StopReason::ExitZone: return "Z0";
        case StopReason::AlmostAtRest: return "||v||";
        case StopReason::StepCap: return "Nmax";
    }
    return "?";
}

}  // namespace detail

inline std::string emit_table(const std::vector<TableRow>& rows,
                              TableFormat format) {
    std::string out;
    switch (format) {
        case TableFormat::Csv: {
            out += kTableCsvHeader;
            out += '\n';
            for (const TableRow& r : rows) {
                out += r.case_id;
                for (double v : {r.v0.vx, r.v0.vy, r.v_final.vx, r.v_final.vy,
                                 r.norm_f}) {
                    out += ',';
                    out += detail::fmt("%.15g", v);
                }
                out += ',';
                out += to_string(r.zone0);
                out += ',';
                out += std::to_string(r.steps);
                out += ',';
                out += to_string(r.stop);
                out += '\n';
            }
            return out;
        }
        case TableFormat::Markdown: {
            out += "| # | v0 | vf | \\|vf\\| | Z(v0) | N | Stop |\n";
            out += "|---|----|----|------|-------|---|------|\n";
            for (const TableRow& r : rows) {
                out += "| " + r.case_id + " | (" +
                       detail::fmt("%.3f", r.v0.vx) + ", " +
                       detail::fmt("%.3f", r.v0.vy) + ") | (" +
                       detail::fmt("%.2e", r.v_final.vx) + ", " +
                       detail::fmt("%.2e", r.v_final.vy) + ") | " +
                       detail::fmt("%.2e", r.norm_f) + " | " +
                       std::string(to_string(r.zone0)) + " | " +
                       std::to_string(r.steps) + " | " +
                       std::string(detail::stop_md(r.stop)) + " |\n";
            }
            return out;
        }
        case TableFormat::Json: {
            nlohmann::json arr = nlohmann::json::array();
            for (const TableRow& r : rows) {
                arr.push_back({{"case_id", r.case_id},
                               {"x0", r.v0.vx},
                               {"y0", r.v0.vy},
                               {"xf", r.v_final.vx},
                               {"yf", r.v_final.vy},
                               {"norm_f", r.norm_f},
                               {"zone0", to_string(r.zone0)},
                               {"steps", r.steps},
                               {"stop", to_string(r.stop)}});
            }
            return arr.dump(2) + "\n";
        }
    }
    throw std::logic_error("unreachable");
}

inline std::vector<TableRow> parse_table_csv(std::string_view text) {
    std::vector<TableRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != kTableCsvHeader) {
                throw std::invalid_argument(
                    "parse_table_csv: unexpected header '" + line + "'");
            }
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls{line};
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9) {
            throw std::invalid_argument("parse_table_csv: bad row '" + line +
                                        "'");
        }
        TableRow r;
        r.case_id = cells[0];
        r.v0 = {std::stod(cells[1]), std::stod(cells[2])};
        r.v_final = {std::stod(cells[3]), std::stod(cells[4])};
        r.norm_f = std::stod(cells[5]);
        r.zone0 = parse_zone(cells[6]);
        r.steps = std::stol(cells[7]);
        r.stop = parse_stop_reason(cells[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<TableRow> parse_table_json(std::string_view text) {
    const nlohmann::json arr = nlohmann::json::parse(text);
    std::vector<TableRow> rows;
    for (const auto& o : arr) {
        rows.push_back({o.at("case_id").get<std::string>(),
                        {o.at("x0").get<double>(), o.at("y0").get<double>()},
                        {o.at("xf").get<double>(), o.at("yf").get<double>()},
                        o.at("norm_f").get<double>(),
                        parse_zone(o.at("zone0").get<std::string>()),
                        o.at("steps").get<long>(),
                        parse_stop_reason(o.at("stop").get<std::string>())});
    }
    return rows;
}

inline std::vector<TableRow> load_table_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open table file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table_csv(buf.str());
}

/// Comparison tolerances. Velocity components and norms are compared
/// absolutely at the golden table's display precision; step counts are
/// exact for runs that exited through Z0 and proportional for runs cut
/// off by the rest threshold, whose counts are rounding-order sensitive.
struct ToleranceSpec {
    double v_abs{5e-3};
    double norm_abs{5e-3};
    double step_rel{0.02};
    /// AlmostAtRest rows must actually be almost at rest.
    double rest_norm_cap{2.0 * kDefaultRestThreshold};
};

struct RowVerdict {
    std::string case_id;
    bool pass{};
    std::string detail;  ///< empty when the row passes
};

struct CompareReport {
    std::vector<RowVerdict> rows;
    int n_pass{};
    int n_fail{};

    bool all_pass() const { return n_fail == 0; }

    std::string to_text(bool verbose = false) const {
        std::string out;
        for (const RowVerdict& r : rows) {
            if (r.pass && !verbose) continue;
            out += r.pass ? "PASS " : "FAIL ";
            out += r.case_id;
            if (!r.detail.empty()) out += ": " + r.detail;
            out += '\n';
        }
        out += "golden comparison: " + std::to_string(n_pass) + " passed, " +
               std::to_string(n_fail) + " failed of " +
               std::to_string(rows.size()) + " rows\n";
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const RowVerdict& r : rows) {
            rows_json.push_back({{"case_id", r.case_id},
                                 {"pass", r.pass},
                                 {"detail", r.detail}});
        }
        return {{"rows", rows_json},
                {"n_pass", n_pass},
                {"n_fail", n_fail},
                {"all_pass", all_pass()}};
    }
};

inline CompareReport compare_golden(const std::vector<TableRow>& produced,
                                    const std::vector<TableRow>& golden,
                                    const ToleranceSpec& tol = {}) {
    if (produced.size() != golden.size()) {
        throw std::invalid_argument(
            "compare_golden: row count mismatch (produced " +
            std::to_string(produced.size()) + ", golden " +
            std::to_string(golden.size()) + ")");
    }
    std::unordered_map<std::string_view, const TableRow*> by_id;
    for (const TableRow& g : golden) by_id.emplace(g.case_id, &g);
    auto find_golden = [&](const std::string& id) -> const TableRow& {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw std::invalid_argument("compare_golden: case '" + id +
                                        "' missing from golden table");
        }
        return *it->second;
    };
    CompareReport report;
    for (const TableRow& p : produced) {
        const TableRow& g = find_golden(p.case_id);
        std::string detail;
        auto check_abs = [&](const char* what, double got, double want,
                             double tol_abs) {
            if (!(std::abs(got - want) <= tol_abs)) {
                detail += std::string(detail.empty() ? "" : "; ") + what +
                          " " + detail::fmt("%.6g", got) + " vs golden " +
                          detail::fmt("%.6g", want);
            }
        };
        check_abs("x0", p.v0.vx, g.v0.vx, tol.v_abs);
        check_abs("y0", p.v0.vy, g.v0.vy, tol.v_abs);
        check_abs("xf", p.v_final.vx, g.v_final.vx, tol.v_abs);
        check_abs("yf", p.v_final.vy, g.v_final.vy, tol.v_abs);
        check_abs("norm_f", p.norm_f, g.norm_f, tol.norm_abs);
        if (p.zone0 != g.zone0) {
            detail += std::string(detail.empty() ? "" : "; ") + "zone0 " +
                      std::string(to_string(p.zone0)) + " vs golden " +
                      std::string(to_string(g.zone0));
        }
        if (p.stop != g.stop) {
            detail += std::string(detail.empty() ? "" : "; ") + "stop " +
                      std::string(to_string(p.stop)) + " vs golden " +
                      std::string(to_string(g.stop));
        }
        long step_tol = 0;
        if (g.stop != StopReason::ExitZone) {
            step_tol = static_cast<long>(
                std::ceil(tol.step_rel * static_cast<double>(g.steps)));
        }
        if (std::labs(p.steps - g.steps) > step_tol) {
            detail += std::string(detail.empty() ? "" : "; ") + "steps " +
                      std::to_string(p.steps) + " vs golden " +
                      std::to_string(g.steps) +
                      (step_tol > 0 ? " (tol " + std::to_string(step_tol) + ")"
                                    : "");
        }
        if (g.stop == StopReason::AlmostAtRest &&
            !(p.norm_f <= tol.rest_norm_cap)) {
            detail += std::string(detail.empty() ? "" : "; ") +
                      "norm_f above rest cap " +
                      detail::fmt("%.3g", tol.rest_norm_cap);
        }
        report.rows.push_back({p.case_id, detail.empty(), detail});
        detail.empty() ? ++report.n_pass : ++report.n_fail;
    }
    return report;
}

}  // namespace corner_impact
