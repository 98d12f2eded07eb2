// cavity-gate: evaluate, figure, casestudy, sweep.
//
// Exit codes: 0 ok, 1 usage, 2 configuration, 3 evaluator, 4 output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavity_gate/cli/casestudy.hpp"
#include "cavity_gate/cli/config.hpp"
#include "cavity_gate/cli/evaluate.hpp"
#include "cavity_gate/cli/figures.hpp"
#include "cavity_gate/cli/manifest.hpp"

namespace {

using namespace cgate;
using namespace cgate::cli;
using json = nlohmann::json;

enum Exit { Ok = 0, Usage = 1, BadConfig = 2, EvalFailed = 3, BadOutput = 4 };

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read config '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// A file whose first line is a comment is read as a figure CSV header block.
Tree load_tree(const std::string& path, const std::vector<std::string>& sets) {
    const std::string text = read_text(path);
    const bool csv = text.rfind("#", 0) == 0 && path.size() > 4 && path.substr(path.size() - 4) == ".csv";
    Tree t = load_config_text(text, csv, path);
    apply_overrides(t, sets);
    return t;
}

json result_json(const GateResult& r, Scheme scheme, const std::string& method, double gamma) {
    return {{"schema_version", schema_version},
            {"scheme", to_string(scheme)},
            {"method", method},
            {"fidelity", r.fidelity},
            {"gate_time_s", r.gate_time},
            {"gate_time_gamma", r.gate_time * gamma},
            {"success_probability", r.success_probability},
            {"warnings", r.warnings}};
}

void print_warnings(const GateResult& r) {
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

AxisSpec parse_axis(const std::string& text) {
    // name=section/key:lo:hi:points:scale[:unit]
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("axis", "expected name=section/key:lo:hi:points:scale[:unit]");
    std::vector<std::string> parts;
    std::istringstream in(text.substr(eq + 1));
    for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
    if (parts.size() != 5 && parts.size() != 6)
        throw ConfigError("axis", "expected name=section/key:lo:hi:points:scale[:unit]");
    AxisSpec a;
    a.axis.name = text.substr(0, eq);
    a.key = parts[0];
    a.axis.lo = parse_number("axis/" + a.axis.name, parts[1]);
    a.axis.hi = parse_number("axis/" + a.axis.name, parts[2]);
    a.axis.points = static_cast<int>(parse_number("axis/" + a.axis.name, parts[3]));
    if (parts[4] == "log")
        a.axis.scale = Scale::Log;
    else if (parts[4] == "linear")
        a.axis.scale = Scale::Linear;
    else
        throw ConfigError("axis/" + a.axis.name, "scale must be 'log' or 'linear'");
    if (parts.size() == 6) a.unit = parts[5];
    try {
        a.axis.validate();
    } catch (const Error& e) {
        throw ConfigError("axis/" + a.axis.name, e.what());
    }
    return a;
}

std::vector<std::string> write_table(const std::filesystem::path& dir, const FigureSpec& fig, const Table& table) {
    const auto path = dir / (fig.name + ".csv");
    write_file(path, render_csv(fig, table));
    for (const auto& e : table.errors)
        std::cerr << "warning: " << fig.name << " cell " << e.flat << ": " << e.message << '\n';
    return {path.string()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-mediated controlled phase-flip gate simulator"};
    app.require_subcommand(1);

    std::string scheme_name, method = "analytic", config_path, out_dir, field = "fidelity";
    std::vector<std::string> sets, figure_names, axis_texts;
    unsigned threads = 0;
    bool refine = false;
    double t2_ms = 0.0, coop = 0.0;

    auto* eval = app.add_subcommand("evaluate", "Evaluate one scheme and print a JSON result");
    eval->add_option("--scheme", scheme_name, "scattering | simple | raman")->required();
    eval->add_option("--config", config_path, "INI config, or a figure CSV")->required();
    eval->add_option("--method", method, "analytic | numeric | lindblad | max | coop_limit | asymptote | optimum");
    eval->add_option("--set", sets, "Override section/key=value");

    auto* fig = app.add_subcommand("figure", "Write figure data as CSV");
    fig->add_option("names", figure_names, "Figure names, or 'all'")->required();
    fig->add_option("--out", out_dir, "Output directory")->required();
    fig->add_option("--threads", threads, "Worker threads (default: CAVITY_GATE_THREADS or all cores)");

    auto* cs = app.add_subcommand("casestudy", "Three-scheme comparison for the rare-earth ion case");
    cs->add_option("--config", config_path, "INI overriding the built-in parameters");
    cs->add_option("--set", sets, "Override section/key=value");
    cs->add_option("--T2", t2_ms, "Qubit coherence time in ms");
    cs->add_option("--cooperativity", coop, "Cavity cooperativity");
    cs->add_option("--out", out_dir, "Also write casestudy.json and manifest.json here");

    auto* sw = app.add_subcommand("sweep", "Grid sweep of one scheme over one or two config keys");
    sw->add_option("--scheme", scheme_name)->required();
    sw->add_option("--config", config_path)->required();
    sw->add_option("--method", method);
    sw->add_option("--field", field, "fidelity | gate_time_gamma | gate_time | success_probability");
    sw->add_option("--axis", axis_texts, "name=section/key:lo:hi:points:log|linear[:unit]")->required();
    sw->add_option("--set", sets);
    sw->add_option("--out", out_dir)->required();
    sw->add_option("--threads", threads);
    sw->add_flag("--refine", refine, "Refine the grid maximum and print it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? Ok : Usage;
    }

    try {
        if (*eval) {
            const Tree tree = load_tree(config_path, sets);
            const Scheme scheme = parse_scheme(scheme_name);
            const EvalMethod m = parse_method(method);
            const double gamma = load_cavity(tree).gamma();
            const GateResult r = evaluate(tree, scheme, m);
            print_warnings(r);
            json j = result_json(r, scheme, to_string(m), gamma);
            j["config_hash"] = config_hash(tree);
            std::cout << j.dump(2) << '\n';
            return Ok;
        }
        if (*fig) {
            std::vector<std::string> names = figure_names;
            if (names.size() == 1 && names[0] == "all") names = figures::names();
            std::vector<FigureSpec> specs;
            for (const auto& n : names) specs.push_back(figures::by_name(n));
            const auto dir = prepare_output_dir(out_dir);
            RunManifest manifest;
            manifest.command = "figure";
            std::string hashes;
            for (const auto& spec : specs) {
                manifest.command += " " + spec.name;
                const Table table = build_table(spec, threads);
                for (auto& p : write_table(dir, spec, table)) manifest.outputs.push_back(p);
                hashes += config_hash(header_tree(spec));
            }
            manifest.config_hash = fnv1a_hex(hashes);
            manifest.outputs.push_back((dir / "manifest.json").string());
            write_manifest(dir, manifest);
            for (const auto& p : manifest.outputs) std::cout << p << '\n';
            return Ok;
        }
        if (*cs) {
            Tree tree = casestudy_defaults();
            if (!config_path.empty()) {
                const Tree user = load_tree(config_path, {});
                for (const auto& [section, body] : user)
                    for (const auto& [key, value] : body) tree.put(key_path(section + "/" + key), value.data());
            }
            if (t2_ms > 0.0) sets.push_back("decoherence/t2=" + axis_value_text(t2_ms, "ms"));
            if (coop > 0.0) sets.push_back("cavity/cooperativity=" + axis_value_text(coop, ""));
            apply_overrides(tree, sets);
            const double gamma = load_cavity(tree).gamma();
            json report = {{"schema_version", schema_version}, {"config_hash", config_hash(tree)}};
            json schemes = json::object();
            for (const auto& e : run_casestudy(tree)) {
                print_warnings(e.result);
                json j = result_json(e.result, e.scheme, to_string(e.method), gamma);
                j["Gamma_s_inv"] = e.Gamma;
                schemes[to_string(e.scheme)] = j;
            }
            report["schemes"] = schemes;
            json params = json::object();
            for (const auto& [section, body] : tree)
                for (const auto& [key, value] : body) params[section + "/" + key] = value.data();
            report["parameters"] = params;
            std::cout << report.dump(2) << '\n';
            if (!out_dir.empty()) {
                const auto dir = prepare_output_dir(out_dir);
                write_file(dir / "casestudy.json", report.dump(2) + "\n");
                RunManifest manifest;
                manifest.command = "casestudy";
                manifest.config_hash = config_hash(tree);
                manifest.outputs = {(dir / "casestudy.json").string(), (dir / "manifest.json").string()};
                write_manifest(dir, manifest);
            }
            return Ok;
        }
        if (*sw) {
            if (axis_texts.empty() || axis_texts.size() > 2) throw ConfigError("axis", "give one or two --axis options");
            FigureSpec spec;
            spec.name = "sweep";
            spec.base = load_tree(config_path, sets);
            for (const auto& a : axis_texts) spec.axes.push_back(parse_axis(a));
            spec.columns.push_back({"value", scheme_name, method, field, {}});
            parse_scheme(scheme_name);
            parse_method(method);
            const auto dir = prepare_output_dir(out_dir);
            const Table table = build_table(spec, threads);
            RunManifest manifest;
            manifest.command = "sweep " + scheme_name + " " + method;
            manifest.config_hash = config_hash(header_tree(spec));
            manifest.outputs = write_table(dir, spec, table);
            manifest.outputs.push_back((dir / "manifest.json").string());
            write_manifest(dir, manifest);
            if (refine) {
                std::vector<Axis> axes;
                for (const auto& a : spec.axes) axes.push_back(a.axis);
                SweepResult r;
                r.axes = axes;
                for (const auto& row : table.rows) r.values.push_back(row.back());
                r.best = locate_max(r);
                const auto& col = spec.columns.front();
                const RefinedMax m = refine_max(r, [&](std::span<const double> x) { return evaluate_cell(spec, col, x); });
                json j = {{"schema_version", schema_version}, {"value", m.value}, {"rounds", m.rounds}};
                for (std::size_t k = 0; k < axes.size(); ++k) j["coords"][axes[k].name] = m.coords[k];
                std::cout << j.dump(2) << '\n';
            }
            return Ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return BadConfig;
    } catch (const OutputError& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return BadOutput;
    } catch (const Error& e) {
        std::cerr << "evaluation error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return EvalFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EvalFailed;
    }
    return Usage;
}
