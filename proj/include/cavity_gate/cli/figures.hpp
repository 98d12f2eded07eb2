#pragma once

// Figure tables. Every column is a scheme/method/field triple evaluated on
// a base configuration with per-column overrides, so any row can be
// recomputed with `evaluate` from the CSV's own header block.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cavity_gate/cli/config.hpp"
#include "cavity_gate/cli/evaluate.hpp"
#include "cavity_gate/sweep.hpp"

namespace cgate::cli {

struct ColumnSpec {
    std::string name;
    std::string scheme;
    std::string method;
    std::string field = "fidelity";
    std::vector<std::string> overrides;  // section/key=value, encoded after ";"

    std::string encode() const {
        std::string s = scheme + " " + method + " " + field;
        for (const auto& o : overrides) s += "; " + o;
        return s;
    }

    static ColumnSpec decode(const std::string& name, const std::string& text) {
        std::vector<std::string> parts;
        std::istringstream split(text);
        for (std::string p; std::getline(split, p, ';');) parts.push_back(trim(p));
        ColumnSpec c;
        c.name = name;
        std::istringstream in(parts.empty() ? std::string() : parts.front());
        std::string extra;
        if (!(in >> c.scheme >> c.method >> c.field) || (in >> extra))
            throw ConfigError("columns/" + name, "expected 'scheme method field[; key=value ...]'");
        for (std::size_t i = 1; i < parts.size(); ++i)
            if (!parts[i].empty()) c.overrides.push_back(parts[i]);
        return c;
    }
};

/// A swept config key. Values are written as "<x> <unit>".
struct AxisSpec {
    Axis axis;
    std::string key;
    std::string unit;  // empty for dimensionless keys
};

struct FigureSpec {
    std::string name;
    std::string note;
    Tree base;
    std::vector<AxisSpec> axes;  // one or two
    std::vector<ColumnSpec> columns;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<CellError> errors;
};

/// Rounds to the 12 significant digits used in CSV output.
inline double round12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return std::strtod(buf, nullptr);
}

inline std::string format_value(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

inline std::string axis_value_text(double x, const std::string& unit) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return unit.empty() ? std::string(buf) : std::string(buf) + " " + unit;
}

/// Value of one column at one grid point.
inline double evaluate_cell(const FigureSpec& fig, const ColumnSpec& col, std::span<const double> x) {
    Tree t = fig.base;
    std::vector<std::string> sets = col.overrides;
    for (std::size_t k = 0; k < fig.axes.size(); ++k)
        sets.push_back(fig.axes[k].key + "=" + axis_value_text(x[k], fig.axes[k].unit));
    apply_overrides(t, sets);
    const Scheme scheme = parse_scheme(col.scheme);
    const GateResult r = evaluate(t, scheme, parse_method(col.method));
    return result_field(r, col.field, load_cavity(t).gamma());
}

inline Table build_table(const FigureSpec& fig, unsigned threads = 0) {
    require(!fig.axes.empty() && fig.axes.size() <= 2, "figures take one or two axes");
    Table table;
    for (const auto& a : fig.axes) table.header.push_back(a.axis.name);
    for (const auto& c : fig.columns) table.header.push_back(c.name);

    std::vector<Axis> axes;
    for (const auto& a : fig.axes) axes.push_back(a.axis);
    std::vector<SweepResult> results;
    for (const auto& col : fig.columns) {
        SweepSpec spec;
        spec.axes = axes;
        spec.threads = threads;
        spec.scheme = col.scheme;
        spec.method = col.method;
        spec.evaluator = [&fig, &col](std::span<const double> x) {
            std::vector<double> r(x.begin(), x.end());
            for (auto& v : r) v = round12(v);
            return evaluate_cell(fig, col, r);
        };
        results.push_back(run_sweep(spec));
        for (auto e : results.back().errors) {
            e.message = col.name + ": " + e.message;
            table.errors.push_back(e);
        }
    }
    const std::size_t n = results.empty() ? 0 : results.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (double x : results.front().coords(i)) row.push_back(round12(x));
        for (const auto& r : results) row.push_back(r.values[i]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Header block: the base config plus [figure], [axis] and [columns].
inline Tree header_tree(const FigureSpec& fig) {
    Tree t = fig.base;
    t.put(key_path("figure/name"), fig.name);
    if (!fig.note.empty()) t.put(key_path("figure/note"), fig.note);
    const char* names[] = {"x", "y"};
    for (std::size_t k = 0; k < fig.axes.size(); ++k) {
        const auto& a = fig.axes[k];
        const std::string p = std::string("axis/") + names[k];
        t.put(key_path(p), a.axis.name);
        t.put(key_path(p + "_key"), a.key);
        if (!a.unit.empty()) t.put(key_path(p + "_unit"), a.unit);
        t.put(key_path(p + "_range"), format_value(a.axis.lo) + " " + format_value(a.axis.hi) + " " +
                                          std::to_string(a.axis.points) + " " + to_string(a.axis.scale));
    }
    for (const auto& c : fig.columns) t.put(key_path("columns/" + c.name), c.encode());
    return t;
}

inline std::string render_csv(const FigureSpec& fig, const Table& table) {
    std::ostringstream out;
    std::istringstream ini(to_ini(header_tree(fig)));
    for (std::string line; std::getline(ini, line);) out << "# " << line << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_value(row[i]);
        out << '\n';
    }
    return out.str();
}

namespace figures {

inline Tree base_tree(std::initializer_list<std::pair<const char*, const char*>> kv) {
    Tree t;
    for (auto [k, v] : kv) t.put(key_path(k), v);
    return t;
}

inline AxisSpec axis(const char* name, double lo, double hi, int points, Scale scale, const char* key,
                     const char* unit) {
    return {Axis{name, lo, hi, points, scale}, key, unit};
}

inline std::vector<ColumnSpec> scattering_columns(const std::vector<std::pair<std::string, std::string>>& variants) {
    std::vector<ColumnSpec> cols;
    for (const auto& [tag, set] : variants) {
        cols.push_back({"F_numeric_" + tag, "scattering", "numeric", "fidelity", {set}});
        cols.push_back({"F_analytic_" + tag, "scattering", "analytic", "fidelity", {set}});
    }
    return cols;
}

inline Tree scattering_base() {
    return base_tree({{"cavity/gamma", "1"},
                      {"cavity/cooperativity", "4000"},
                      {"cavity/g_over_kappa", "0.1"},
                      {"decoherence/Gamma", "1e-5 per_gamma"},
                      {"scheme.scattering/gate_time", "2 gamma_inv"},
                      {"scheme.scattering/delta_p", "30 per_gamma"},
                      {"scheme.scattering/delta_eps_A", "0"},
                      {"scheme.scattering/delta_eps_B", "0"}});
}

inline const std::vector<std::pair<std::string, std::string>>& regimes() {
    static const std::vector<std::pair<std::string, std::string>> r = {
        {"gk0.01", "cavity/g_over_kappa=0.01"}, {"gk0.5", "cavity/g_over_kappa=0.5"}, {"gk10", "cavity/g_over_kappa=10"}};
    return r;
}

inline FigureSpec fig2a() {
    return {"fig2a", "scattering fidelity vs gate time; C=4000, Gamma=1e-5 gamma, delta_p=30 gamma",
            scattering_base(),
            {axis("T_gamma", 0.05, 50.0, 121, Scale::Log, "scheme.scattering/gate_time", "gamma_inv")},
            scattering_columns(regimes())};
}

inline FigureSpec fig2b() {
    return {"fig2b", "scattering fidelity vs photon detuning; C=4000, T=2/gamma, Gamma=1e-5 gamma",
            scattering_base(),
            {axis("delta_p_over_gamma", 0.0, 100.0, 101, Scale::Linear, "scheme.scattering/delta_p", "per_gamma")},
            scattering_columns(regimes())};
}

inline FigureSpec fig2c() {
    return {"fig2c", "scattering fidelity vs cavity regime; C=4000, T=2/gamma, Gamma=1e-5 gamma",
            scattering_base(),
            {axis("g_over_kappa", 0.01, 100.0, 121, Scale::Log, "cavity/g_over_kappa", "")},
            scattering_columns({{"dp0", "scheme.scattering/delta_p=0"},
                                {"dp30", "scheme.scattering/delta_p=30 per_gamma"},
                                {"dp100", "scheme.scattering/delta_p=100 per_gamma"}})};
}

inline FigureSpec fig4() {
    return {"fig4", "simple exchange fidelity vs cavity detuning; C=8000, Delta_eps=0, delta_eg=inf, Gamma=0",
            base_tree({{"cavity/gamma", "1"},
                       {"cavity/cooperativity", "8000"},
                       {"cavity/g_over_kappa", "0.1"},
                       {"decoherence/Gamma", "0"},
                       {"scheme.simple/delta_eg", "inf"},
                       {"scheme.simple/Delta_eps", "0"}}),
            {axis("Delta_over_kappa", 1.0, 1e4, 161, Scale::Log, "scheme.simple/Delta", "per_kappa")},
            {{"F_numeric_weak", "simple", "numeric", "fidelity", {"cavity/g_over_kappa=0.1"}},
             {"F_numeric_strong", "simple", "numeric", "fidelity", {"cavity/g_over_kappa=10"}},
             {"F_analytic", "simple", "analytic", "fidelity", {"cavity/g_over_kappa=0.1"}}}};
}

inline Tree raman_base() {
    return base_tree({{"cavity/gamma", "1"},
                      {"cavity/cooperativity", "8000"},
                      {"cavity/g_over_kappa", "0.1"},
                      {"decoherence/Gamma", "0"},
                      {"scheme.raman/Omega_over_Delta", "0.05"},
                      {"scheme.raman/delta", "optimal"},
                      {"scheme.raman/Delta", "1 per_kappa"}});
}

inline FigureSpec fig6a() {
    return {"fig6a", "Raman fidelity vs (delta, Delta); Omega=Delta/20, g/kappa=0.1, C=8000, Gamma=0",
            raman_base(),
            {axis("delta_over_kappa", 0.1, 1e3, 121, Scale::Log, "scheme.raman/delta", "per_kappa"),
             axis("Delta_over_kappa", 0.1, 1e3, 121, Scale::Log, "scheme.raman/Delta", "per_kappa")},
            {{"F_numeric", "raman", "numeric", "fidelity", {}},
             {"F_analytic", "raman", "analytic", "fidelity", {}}}};
}

inline FigureSpec fig6b() {
    return {"fig6b", "Raman fidelity along 2 delta = kappa sqrt(C); C=8000, Delta_A=Delta_B, Gamma=0",
            raman_base(),
            {axis("Delta_over_kappa", 0.1, 1e3, 161, Scale::Log, "scheme.raman/Delta", "per_kappa")},
            {{"F_numeric_omega20", "raman", "numeric", "fidelity", {"scheme.raman/Omega_over_Delta=0.05"}},
             {"F_numeric_omega3", "raman", "numeric", "fidelity", {"scheme.raman/Omega_over_Delta=0.333333333333"}},
             {"F_analytic_omega20", "raman", "analytic", "fidelity", {"scheme.raman/Omega_over_Delta=0.05"}}}};
}

inline Tree comparison_base(const char* coop) {
    Tree t = base_tree({{"cavity/gamma", "1"},
                        {"cavity/g_over_kappa", "0.1"},
                        {"decoherence/Gamma", "0"},
                        {"scheme.scattering/gate_time", "1 gamma_inv"},
                        {"scheme.simple/delta_eg", "inf"},
                        {"scheme.raman/Omega_over_Delta", "0.05"}});
    t.put(key_path("cavity/cooperativity"), coop);
    return t;
}

inline FigureSpec fig7() {
    return {"fig7", "cooperativity-limited maximum fidelity; all error terms zero",
            comparison_base("8000"),
            {axis("C", 1.0, 1e5, 101, Scale::Log, "cavity/cooperativity", "")},
            {{"F_scattering", "scattering", "coop_limit", "fidelity", {}},
             {"F_simple", "simple", "coop_limit", "fidelity", {}},
             {"F_raman", "raman", "coop_limit", "fidelity", {}},
             {"F_scattering_asymptote", "scattering", "asymptote", "fidelity", {}},
             {"F_exchange_asymptote", "simple", "asymptote", "fidelity", {}}}};
}

inline FigureSpec fig8(bool times) {
    const char* field = times ? "gate_time_gamma" : "fidelity";
    const char* prefix = times ? "T_gamma_" : "F_";
    FigureSpec f{times ? "fig8b" : "fig8a",
                 times ? "gate time at the decoherence-limited optimum; g/kappa=0.1, C=8000"
                       : "decoherence-limited maximum fidelity; g/kappa=0.1, C=8000",
                 comparison_base("8000"),
                 {axis("Gamma_over_gamma", 1e-6, 1e-1, 51, Scale::Log, "decoherence/Gamma", "per_gamma")},
                 {}};
    for (const char* s : {"scattering", "simple", "raman"})
        f.columns.push_back({std::string(prefix) + s, s, "optimum", field, {}});
    return f;
}

inline std::vector<std::string> names() {
    return {"fig2a", "fig2b", "fig2c", "fig4", "fig6a", "fig6b", "fig7", "fig8a", "fig8b"};
}

inline FigureSpec by_name(const std::string& name) {
    if (name == "fig2a") return fig2a();
    if (name == "fig2b") return fig2b();
    if (name == "fig2c") return fig2c();
    if (name == "fig4") return fig4();
    if (name == "fig6a") return fig6a();
    if (name == "fig6b") return fig6b();
    if (name == "fig7") return fig7();
    if (name == "fig8a") return fig8(false);
    if (name == "fig8b") return fig8(true);
    throw ConfigError("figure", "unknown figure '" + name + "'");
}

} // namespace figures
} // namespace cgate::cli
