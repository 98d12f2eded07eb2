#pragma once

// Single-point evaluation of a configured scheme by a named method.

#include <string>

#include "cavity_gate/cli/config.hpp"
#include "cavity_gate/lindblad.hpp"
#include "cavity_gate/sweep.hpp"

namespace cgate::cli {

// analytic:   closed form at the configured point
// numeric:    amplitude integration (scattering) or non-Hermitian propagation
// lindblad:   master equation with recycling (exchange schemes only)
// max:        expanded maximum at the optimal operating point
// coop_limit: cooperativity-limited maximum, all error terms zero
// asymptote:  large-C form of coop_limit
// optimum:    decoherence-limited optimum over the free timing parameters
enum class EvalMethod { Analytic, Numeric, Lindblad, Max, CoopLimit, Asymptote, Optimum };

inline EvalMethod parse_method(const std::string& name) {
    if (name == "analytic") return EvalMethod::Analytic;
    if (name == "numeric") return EvalMethod::Numeric;
    if (name == "lindblad") return EvalMethod::Lindblad;
    if (name == "max") return EvalMethod::Max;
    if (name == "coop_limit") return EvalMethod::CoopLimit;
    if (name == "asymptote") return EvalMethod::Asymptote;
    if (name == "optimum") return EvalMethod::Optimum;
    throw ConfigError("method", "unknown method '" + name + "'");
}

inline const char* to_string(EvalMethod m) {
    switch (m) {
    case EvalMethod::Analytic: return "analytic";
    case EvalMethod::Numeric: return "numeric";
    case EvalMethod::Lindblad: return "lindblad";
    case EvalMethod::Max: return "max";
    case EvalMethod::CoopLimit: return "coop_limit";
    case EvalMethod::Asymptote: return "asymptote";
    case EvalMethod::Optimum: return "optimum";
    }
    return "";
}

namespace detail {

inline GateResult plain_result(double f, double t, Method m) {
    GateResult r;
    r.method = m;
    r.gate_time = t;
    r.fidelity = clamp_fidelity(f, r.warnings);
    return r;
}

inline double exchange_coop_limit(double coop) {
    const auto rows = cooperativity_scaling(std::span<const double>(&coop, 1));
    return rows.front().simple;
}

inline double raman_coop_limit(double coop) {
    const auto rows = cooperativity_scaling(std::span<const double>(&coop, 1));
    return rows.front().raman;
}

} // namespace detail

inline GateResult evaluate(const Tree& tree, Scheme scheme, EvalMethod method) {
    switch (scheme) {
    case Scheme::Scattering: {
        const ScatteringConfig c = load_scattering(tree);
        const double coop = c.cavity.cooperativity(), gamma = c.cavity.gamma();
        switch (method) {
        case EvalMethod::Analytic: return fidelity_analytic(c);
        case EvalMethod::Numeric: return fidelity_numeric(c);
        case EvalMethod::Max: {
            ScatteringConfig at = c;
            at.pulse = PhotonPulse::from_gate_time(optimal_gate_time(coop, gamma, c.Gamma), c.pulse.delta_p());
            return fidelity_analytic(at);
        }
        case EvalMethod::CoopLimit:
            return detail::plain_result(scattering_cooperativity_limit(coop), c.pulse.gate_time(), Method::Analytic);
        case EvalMethod::Asymptote:
            return detail::plain_result(1.0 - 5.0 / (4.0 * coop), c.pulse.gate_time(), Method::Analytic);
        case EvalMethod::Optimum: {
            const auto o = decoherence_optimum(c.Gamma / gamma, coop, c.cavity.g_over_kappa());
            return detail::plain_result(o.scattering_F, o.scattering_T / gamma, Method::Analytic);
        }
        case EvalMethod::Lindblad:
            throw Error(ErrorKind::InvalidArgument, "the master-equation oracle covers the exchange schemes only");
        }
        break;
    }
    case Scheme::SimpleExchange: {
        const SimpleRun run = load_simple(tree);
        const auto& c = run.config;
        const double coop = c.cavity.cooperativity(), gamma = c.cavity.gamma();
        const double t = run.gate_time.value_or(gate_time_exchange(c));
        switch (method) {
        case EvalMethod::Analytic: return fidelity_closed_form_exchange(c);
        case EvalMethod::Numeric: return fidelity_numeric_exchange(c, t);
        case EvalMethod::Lindblad: return fidelity_lindblad_exchange(c, t);
        case EvalMethod::Max: return max_fidelity_exchange(c);
        case EvalMethod::CoopLimit:
            return detail::plain_result(detail::exchange_coop_limit(coop), optimal_gate_time_exchange(c.cavity),
                                        Method::Analytic);
        case EvalMethod::Asymptote:
            return detail::plain_result(1.0 - pi / std::sqrt(coop), optimal_gate_time_exchange(c.cavity),
                                        Method::Analytic);
        case EvalMethod::Optimum: {
            const auto o = decoherence_optimum(c.Gamma / gamma, coop, c.cavity.g_over_kappa());
            return detail::plain_result(o.simple_F, o.simple_T / gamma, Method::Analytic);
        }
        }
        break;
    }
    case Scheme::Raman: {
        const RamanRun run = load_raman(tree);
        const auto& c = run.config;
        const double coop = c.cavity.cooperativity(), gamma = c.cavity.gamma();
        switch (method) {
        case EvalMethod::Analytic: return fidelity_analytic_raman(c);
        case EvalMethod::Numeric: return fidelity_numeric_raman(c, run.gate_time.value_or(gate_time_raman(c)));
        case EvalMethod::Lindblad: return fidelity_lindblad_raman(c, run.gate_time.value_or(gate_time_raman(c)));
        case EvalMethod::Max: return max_fidelity_raman(c);
        case EvalMethod::CoopLimit:
            return detail::plain_result(detail::raman_coop_limit(coop),
                                        optimal_gate_time_raman(c.cavity, c.Omega_A / c.Delta()), Method::Analytic);
        case EvalMethod::Asymptote:
            return detail::plain_result(1.0 - pi / std::sqrt(coop),
                                        optimal_gate_time_raman(c.cavity, c.Omega_A / c.Delta()), Method::Analytic);
        case EvalMethod::Optimum: {
            const auto o = decoherence_optimum(c.Gamma / gamma, coop, c.cavity.g_over_kappa());
            return detail::plain_result(o.raman_F, o.raman_T / gamma, Method::Analytic);
        }
        }
        break;
    }
    }
    throw Error(ErrorKind::InvalidArgument, "unsupported scheme/method combination");
}

/// Named scalar of a result: "fidelity", "gate_time_gamma" (T gamma) or "gate_time".
inline double result_field(const GateResult& r, const std::string& field, double gamma) {
    if (field == "fidelity") return r.fidelity;
    if (field == "gate_time_gamma") return r.gate_time * gamma;
    if (field == "gate_time") return r.gate_time;
    if (field == "success_probability") return r.success_probability;
    throw ConfigError("field", "unknown result field '" + field + "'");
}

} // namespace cgate::cli
