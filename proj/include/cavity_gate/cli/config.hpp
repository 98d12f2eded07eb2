#pragma once

// INI run configuration: [cavity], [decoherence], [scheme.<name>].
// Keys are addressed as "section/key". Values are "<number> [unit]" or
// "hz:<number>". Rate units: rad_s, s_inv, hz, khz, mhz, ghz (x 2 pi),
// per_gamma, per_kappa. Time units: s, ms, us, ns, gamma_inv. A bare
// number is taken in the canonical unit (rad/s, seconds).

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cavity_gate/qed_params.hpp"
#include "cavity_gate/raman.hpp"
#include "cavity_gate/scattering.hpp"
#include "cavity_gate/simple_exchange.hpp"

namespace cgate::cli {

using Tree = boost::property_tree::ptree;

/// Configuration problem tied to a key path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

inline Tree::path_type key_path(const std::string& key) { return Tree::path_type(key, '/'); }

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Sections and keys the loader understands. Anything else is rejected.
inline const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"cavity", {"g", "kappa", "gamma", "cooperativity", "g_over_kappa"}},
        {"decoherence",
         {"qubit_relaxation", "qubit_dephasing", "optical_dephasing", "shelving_decay", "t2", "Gamma"}},
        {"scheme.scattering", {"gate_time", "sigma_p", "delta_p", "delta_eps_A", "delta_eps_B"}},
        {"scheme.simple",
         {"Delta", "delta_eg", "Delta_eps", "mode", "gate_time", "g_upA", "g_downB", "g_upB"}},
        {"scheme.raman",
         {"Delta", "Delta_A", "Delta_B", "delta", "delta_A", "delta_B", "Omega_A", "Omega_B", "Omega_over_Delta",
          "gate_time", "g_A", "g_B"}},
    };
    return keys;
}

// Free-form sections carried by figure CSV headers; ignored by the loader.
inline bool passthrough_section(const std::string& name) {
    return name == "figure" || name == "axis" || name == "columns";
}

inline void check_keys(const Tree& tree) {
    const auto& known = known_keys();
    for (const auto& [section, body] : tree) {
        if (passthrough_section(section)) continue;
        const auto it = known.find(section);
        if (it == known.end()) throw ConfigError(section, "unknown section");
        if (!body.data().empty()) throw ConfigError(section, "expected a section, found a value");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigError(section + "/" + key, "unknown key");
    }
}

inline Tree parse_ini(std::istream& in, const std::string& origin = "config") {
    Tree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("", origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    check_keys(tree);
    return tree;
}

/// Reads an INI file, or the '#'-prefixed header block of a figure CSV.
inline Tree load_config_text(const std::string& text, bool comment_block, const std::string& origin = "config") {
    if (!comment_block) {
        std::istringstream in(text);
        return parse_ini(in, origin);
    }
    std::ostringstream ini;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("#", 0) != 0) break;
        line.erase(0, 1);
        if (!line.empty() && line[0] == ' ') line.erase(0, 1);
        ini << line << '\n';
    }
    std::istringstream in(ini.str());
    return parse_ini(in, origin);
}

/// Applies "section/key=value" overrides.
inline void apply_overrides(Tree& tree, const std::vector<std::string>& sets) {
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(s, "override must be section/key=value");
        const std::string key = trim(s.substr(0, eq));
        const auto slash = key.find('/');
        if (slash == std::string::npos || slash == 0 || slash + 1 == key.size())
            throw ConfigError(key, "override key must be section/key");
        tree.put(key_path(key), trim(s.substr(eq + 1)));
    }
    check_keys(tree);
}

/// Canonical "section/key=value" listing, sorted.
inline std::string canonical_text(const Tree& tree) {
    std::map<std::string, std::string> flat;
    for (const auto& [section, body] : tree)
        for (const auto& [key, value] : body) flat[section + "/" + key] = trim(value.data());
    std::string out;
    for (const auto& [k, v] : flat) out += k + "=" + v + "\n";
    return out;
}

inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string config_hash(const Tree& tree) { return fnv1a_hex(canonical_text(tree)); }

/// INI text for a two-level tree.
inline std::string to_ini(const Tree& tree) {
    std::ostringstream out;
    boost::property_tree::ini_parser::write_ini(out, tree);
    return out.str();
}

enum class Quantity { Rate, Time, Plain };

struct UnitContext {
    double gamma = std::nan("");
    double kappa = std::nan("");
};

inline double parse_number(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    if (used != text.size()) throw ConfigError(key, "trailing characters in '" + text + "'");
    return v;
}

inline double parse_quantity(const std::string& key, const std::string& raw, Quantity q, const UnitContext& ctx) {
    std::string text = trim(raw);
    if (text.empty()) throw ConfigError(key, "empty value");
    if (text.rfind("hz:", 0) == 0) {
        if (q != Quantity::Rate) throw ConfigError(key, "hz: prefix only applies to rates");
        return from_hz(parse_number(key, trim(text.substr(3))));
    }
    std::string unit;
    const auto sp = text.find_first_of(" \t");
    if (sp != std::string::npos) {
        unit = trim(text.substr(sp));
        text = text.substr(0, sp);
    }
    const double v = parse_number(key, text);
    if (unit.empty()) return v;

    auto need = [&](double x, const char* what) {
        if (!std::isfinite(x)) throw ConfigError(key, std::string("unit '") + unit + "' needs " + what + " first");
        return x;
    };
    if (q == Quantity::Rate) {
        if (unit == "rad_s" || unit == "s_inv") return v;
        if (unit == "hz") return from_hz(v);
        if (unit == "khz") return from_hz(v * 1e3);
        if (unit == "mhz") return from_hz(v * 1e6);
        if (unit == "ghz") return from_hz(v * 1e9);
        if (unit == "per_gamma") return v * need(ctx.gamma, "gamma");
        if (unit == "per_kappa") return v * need(ctx.kappa, "kappa");
    } else if (q == Quantity::Time) {
        if (unit == "s") return v;
        if (unit == "ms") return v * 1e-3;
        if (unit == "us") return v * 1e-6;
        if (unit == "ns") return v * 1e-9;
        if (unit == "gamma_inv") return v / need(ctx.gamma, "gamma");
    }
    throw ConfigError(key, "unknown unit '" + unit + "'");
}

inline std::optional<std::string> get_raw(const Tree& tree, const std::string& key) {
    if (auto v = tree.get_optional<std::string>(key_path(key))) return trim(*v);
    return std::nullopt;
}

inline std::optional<double> get_quantity(const Tree& tree, const std::string& key, Quantity q,
                                          const UnitContext& ctx) {
    if (auto raw = get_raw(tree, key)) return parse_quantity(key, *raw, q, ctx);
    return std::nullopt;
}

inline double require_quantity(const Tree& tree, const std::string& key, Quantity q, const UnitContext& ctx) {
    if (auto v = get_quantity(tree, key, q, ctx)) return *v;
    throw ConfigError(key, "missing required key");
}

/// Wraps library validation errors with the section they came from.
template <class F>
auto with_section(const std::string& section, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) throw ConfigError(section, e.what());
        throw;
    }
}

inline CavitySystem load_cavity(const Tree& tree) {
    UnitContext ctx;
    const double gamma = require_quantity(tree, "cavity/gamma", Quantity::Rate, ctx);
    if (!(gamma > 0.0)) throw ConfigError("cavity/gamma", "must be positive");
    ctx.gamma = gamma;
    const bool by_coop = get_raw(tree, "cavity/cooperativity").has_value();
    const bool by_rates = get_raw(tree, "cavity/g").has_value() || get_raw(tree, "cavity/kappa").has_value();
    if (by_coop == by_rates)
        throw ConfigError("cavity", "give either (g, kappa) or (cooperativity, g_over_kappa)");
    return with_section("cavity", [&] {
        if (by_coop) {
            const double c = require_quantity(tree, "cavity/cooperativity", Quantity::Plain, ctx);
            const double r = require_quantity(tree, "cavity/g_over_kappa", Quantity::Plain, ctx);
            return CavitySystem::from_cooperativity(c, r, gamma);
        }
        const double g = require_quantity(tree, "cavity/g", Quantity::Rate, ctx);
        const double kappa = require_quantity(tree, "cavity/kappa", Quantity::Rate, ctx);
        return CavitySystem(g, kappa, gamma);
    });
}

inline UnitContext unit_context(const CavitySystem& c) { return {c.gamma(), c.kappa()}; }

/// Effective decoherence rate for a scheme: the explicit Gamma if given,
/// otherwise composed from the individual rates.
inline double load_gamma(const Tree& tree, const CavitySystem& cavity, Scheme scheme) {
    const UnitContext ctx = unit_context(cavity);
    if (auto g = get_quantity(tree, "decoherence/Gamma", Quantity::Rate, ctx)) {
        if (!(*g >= 0.0)) throw ConfigError("decoherence/Gamma", "must be non-negative");
        return *g;
    }
    DecoherenceSpec spec;
    auto rate = [&](const char* name) {
        return get_quantity(tree, std::string("decoherence/") + name, Quantity::Rate, ctx).value_or(0.0);
    };
    spec.qubit_relaxation = rate("qubit_relaxation");
    spec.qubit_dephasing = rate("qubit_dephasing");
    spec.optical_dephasing = rate("optical_dephasing");
    spec.shelving_decay = rate("shelving_decay");
    spec.t2 = get_quantity(tree, "decoherence/t2", Quantity::Time, ctx).value_or(0.0);
    return with_section("decoherence", [&] { return effective_gamma(spec, scheme); });
}

inline ScatteringConfig load_scattering(const Tree& tree) {
    const CavitySystem cavity = load_cavity(tree);
    const UnitContext ctx = unit_context(cavity);
    const std::string s = "scheme.scattering/";
    const auto t = get_quantity(tree, s + "gate_time", Quantity::Time, ctx);
    const auto sigma = get_quantity(tree, s + "sigma_p", Quantity::Rate, ctx);
    if (t.has_value() == sigma.has_value()) throw ConfigError("scheme.scattering", "give exactly one of gate_time, sigma_p");
    const double dp = get_quantity(tree, s + "delta_p", Quantity::Rate, ctx).value_or(0.0);
    return with_section("scheme.scattering", [&] {
        const PhotonPulse pulse = t ? PhotonPulse::from_gate_time(*t, dp) : PhotonPulse(*sigma, dp);
        ScatteringConfig c{cavity, pulse, get_quantity(tree, s + "delta_eps_A", Quantity::Rate, ctx).value_or(0.0),
                           get_quantity(tree, s + "delta_eps_B", Quantity::Rate, ctx).value_or(0.0),
                           load_gamma(tree, cavity, Scheme::Scattering)};
        c.validate();
        return c;
    });
}

struct SimpleRun {
    ExchangeConfig config;
    std::optional<double> gate_time;
};

inline SimpleRun load_simple(const Tree& tree) {
    const CavitySystem cavity = load_cavity(tree);
    const UnitContext ctx = unit_context(cavity);
    const std::string s = "scheme.simple/";
    SimpleRun run{ExchangeConfig{cavity}, std::nullopt};
    auto& c = run.config;
    const std::string delta = get_raw(tree, s + "Delta").value_or("optimal");
    c.Delta = delta == "optimal" ? optimal_detuning_exchange(cavity) : parse_quantity(s + "Delta", delta, Quantity::Rate, ctx);
    const std::string eg = get_raw(tree, s + "delta_eg").value_or("inf");
    c.delta_eg = eg == "inf" ? std::numeric_limits<double>::infinity() : parse_quantity(s + "delta_eg", eg, Quantity::Rate, ctx);
    c.Delta_eps = get_quantity(tree, s + "Delta_eps", Quantity::Rate, ctx).value_or(0.0);
    const std::string mode = get_raw(tree, s + "mode").value_or("opposite");
    if (mode == "opposite")
        c.mode = ExchangeMode::OppositeSpin;
    else if (mode == "same")
        c.mode = ExchangeMode::SameSpin;
    else
        throw ConfigError(s + "mode", "expected 'opposite' or 'same'");
    if (auto g = get_quantity(tree, s + "g_upA", Quantity::Rate, ctx)) c.g_upA = *g;
    if (auto g = get_quantity(tree, s + "g_downB", Quantity::Rate, ctx)) c.g_downB = *g;
    if (auto g = get_quantity(tree, s + "g_upB", Quantity::Rate, ctx)) c.g_upB = *g;
    run.gate_time = get_quantity(tree, s + "gate_time", Quantity::Time, ctx);
    c.Gamma = load_gamma(tree, cavity, Scheme::SimpleExchange);
    with_section("scheme.simple", [&] { c.validate(); });
    return run;
}

struct RamanRun {
    RamanConfig config;
    std::optional<double> gate_time;
};

inline RamanRun load_raman(const Tree& tree) {
    const CavitySystem cavity = load_cavity(tree);
    const UnitContext ctx = unit_context(cavity);
    const std::string s = "scheme.raman/";
    RamanRun run{RamanConfig{cavity}, std::nullopt};
    auto& c = run.config;

    const auto Delta = get_quantity(tree, s + "Delta", Quantity::Rate, ctx);
    const auto Delta_A = get_quantity(tree, s + "Delta_A", Quantity::Rate, ctx);
    const auto Delta_B = get_quantity(tree, s + "Delta_B", Quantity::Rate, ctx);
    if (Delta && (Delta_A || Delta_B)) throw ConfigError(s + "Delta", "give Delta or Delta_A/Delta_B, not both");
    const double d_default = Delta.value_or(cavity.kappa());
    c.Delta_A = Delta_A.value_or(d_default);
    c.Delta_B = Delta_B.value_or(d_default);

    auto two_photon = [&](const std::string& key) -> std::optional<double> {
        const auto raw = get_raw(tree, s + key);
        if (!raw) return std::nullopt;
        if (*raw == "optimal") return optimal_two_photon_detuning(cavity);
        return parse_quantity(s + key, *raw, Quantity::Rate, ctx);
    };
    const auto delta = two_photon("delta");
    const auto delta_A = two_photon("delta_A");
    const auto delta_B = two_photon("delta_B");
    if (delta && (delta_A || delta_B)) throw ConfigError(s + "delta", "give delta or delta_A/delta_B, not both");
    const double dd = delta.value_or(optimal_two_photon_detuning(cavity));
    c.delta_A = delta_A.value_or(dd);
    c.delta_B = delta_B.value_or(dd);

    const auto omega = get_quantity(tree, s + "Omega_A", Quantity::Rate, ctx);
    const auto ratio = get_quantity(tree, s + "Omega_over_Delta", Quantity::Plain, ctx);
    if (omega && ratio) throw ConfigError(s + "Omega_A", "give Omega_A or Omega_over_Delta, not both");
    c.Omega_A = omega ? *omega : ratio.value_or(0.05) * c.Delta();
    if (auto ob = get_quantity(tree, s + "Omega_B", Quantity::Rate, ctx)) c.Omega_B = *ob;
    if (auto g = get_quantity(tree, s + "g_A", Quantity::Rate, ctx)) c.g_A = *g;
    if (auto g = get_quantity(tree, s + "g_B", Quantity::Rate, ctx)) c.g_B = *g;
    run.gate_time = get_quantity(tree, s + "gate_time", Quantity::Time, ctx);
    c.Gamma = load_gamma(tree, cavity, Scheme::Raman);
    with_section("scheme.raman", [&] { c.validate(); });
    return run;
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "scattering") return Scheme::Scattering;
    if (name == "simple") return Scheme::SimpleExchange;
    if (name == "raman") return Scheme::Raman;
    throw ConfigError("scheme", "unknown scheme '" + name + "' (scattering, simple, raman)");
}

inline const char* section_name(Scheme s) {
    switch (s) {
    case Scheme::Scattering: return "scheme.scattering";
    case Scheme::SimpleExchange: return "scheme.simple";
    case Scheme::Raman: return "scheme.raman";
    }
    return "";
}

} // namespace cgate::cli
