#pragma once

// Three-scheme comparison for a rare-earth ion in a nanophotonic cavity:
// C = 50 000, g/kappa = 0.1, gamma = 2 pi x 596 Hz, T2 = 6.6 ms.

#include <string>
#include <vector>

#include "cavity_gate/cli/config.hpp"
#include "cavity_gate/cli/evaluate.hpp"

namespace cgate::cli {

inline Tree casestudy_defaults() {
    Tree t;
    for (auto [k, v] : std::initializer_list<std::pair<const char*, const char*>>{
             {"cavity/gamma", "596 hz"},
             {"cavity/cooperativity", "50000"},
             {"cavity/g_over_kappa", "0.1"},
             {"decoherence/t2", "6.6 ms"},
             {"decoherence/optical_dephasing", "9000 s_inv"},
             {"scheme.scattering/gate_time", "1 gamma_inv"},
             {"scheme.scattering/delta_p", "30 per_gamma"},
             {"scheme.simple/Delta", "optimal"},
             {"scheme.simple/delta_eg", "0.2 ghz"},
             {"scheme.raman/Omega_over_Delta", "0.1"},
             {"scheme.raman/delta", "optimal"}})
        t.put(key_path(k), v);
    return t;
}

struct CaseEntry {
    Scheme scheme;
    EvalMethod method;
    GateResult result;
    double Gamma;
};

/// Scattering at its stated operating point T = 1/gamma; the exchange
/// schemes at their optimal detunings.
inline std::vector<CaseEntry> run_casestudy(const Tree& tree) {
    const CavitySystem cavity = load_cavity(tree);
    std::vector<CaseEntry> out;
    for (auto [scheme, method] : {std::pair{Scheme::Scattering, EvalMethod::Analytic},
                                  std::pair{Scheme::SimpleExchange, EvalMethod::Max},
                                  std::pair{Scheme::Raman, EvalMethod::Max}})
        out.push_back({scheme, method, evaluate(tree, scheme, method), load_gamma(tree, cavity, scheme)});
    return out;
}

} // namespace cgate::cli
