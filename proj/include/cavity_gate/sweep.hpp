#pragma once

// Grid sweeps over one or two parameters, argmax refinement, and the
// scheme-comparison tables built on them.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cavity_gate/error.hpp"
#include "cavity_gate/qed_params.hpp"
#include "cavity_gate/raman.hpp"
#include "cavity_gate/scattering.hpp"
#include "cavity_gate/simple_exchange.hpp"

namespace cgate {

enum class Scale { Linear, Log };

inline const char* to_string(Scale s) { return s == Scale::Log ? "log" : "linear"; }

struct Axis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    int points = 2;
    Scale scale = Scale::Linear;

    void validate() const {
        require(points >= 2, "axis '" + name + "' needs at least 2 points");
        require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "axis '" + name + "' range must be ordered");
        require(scale == Scale::Linear || lo > 0.0, "log axis '" + name + "' needs a positive range");
    }

    // Map to/from the coordinate in which the grid is uniform.
    double to_uniform(double x) const { return scale == Scale::Log ? std::log(x) : x; }
    double from_uniform(double u) const { return scale == Scale::Log ? std::exp(u) : u; }

    double at(int i) const {
        if (i == 0) return lo;
        if (i == points - 1) return hi;
        const double a = to_uniform(lo), b = to_uniform(hi);
        return from_uniform(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }

    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) v[static_cast<std::size_t>(i)] = at(i);
        return v;
    }
};

using Evaluator = std::function<double(std::span<const double>)>;

struct SweepSpec {
    std::vector<Axis> axes;   // one or two; the last axis varies fastest
    Evaluator evaluator;
    std::string scheme;
    std::string method;
    std::string config_hash;
    unsigned threads = 0;     // 0: CAVITY_GATE_THREADS or hardware concurrency

    void validate() const {
        require(axes.size() == 1 || axes.size() == 2, "sweeps take one or two axes");
        for (const auto& a : axes) a.validate();
        require(static_cast<bool>(evaluator), "sweep needs an evaluator");
    }
};

struct GridMax {
    bool found = false;
    std::size_t flat = 0;
    std::vector<int> index;
    std::vector<double> coords;
    double value = std::numeric_limits<double>::quiet_NaN();
};

struct CellError {
    std::size_t flat;
    std::string message;
};

struct SweepResult {
    std::vector<Axis> axes;
    std::vector<double> values;       // row-major
    std::vector<CellError> errors;    // sorted by cell
    GridMax best;
    std::string scheme;
    std::string method;
    std::string config_hash;

    std::size_t size() const { return values.size(); }

    std::vector<int> unflatten(std::size_t flat) const {
        std::vector<int> idx(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            const auto n = static_cast<std::size_t>(axes[k].points);
            idx[k] = static_cast<int>(flat % n);
            flat /= n;
        }
        return idx;
    }

    std::vector<double> coords(std::size_t flat) const {
        const auto idx = unflatten(flat);
        std::vector<double> x(axes.size());
        for (std::size_t k = 0; k < axes.size(); ++k) x[k] = axes[k].at(idx[k]);
        return x;
    }
};

/// Worker count: explicit request, else CAVITY_GATE_THREADS, else hardware.
inline unsigned sweep_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CAVITY_GATE_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Lowest-index maximum over finite cells.
inline GridMax locate_max(const SweepResult& r) {
    GridMax m;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        const double v = r.values[i];
        if (!std::isfinite(v)) continue;
        if (!m.found || v > m.value) {
            m.found = true;
            m.flat = i;
            m.value = v;
        }
    }
    if (m.found) {
        m.index = r.unflatten(m.flat);
        m.coords = r.coords(m.flat);
    }
    return m;
}

/// Evaluates every grid cell. Failing cells become NaN and are logged; the
/// sweep itself never throws for evaluator errors.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult r;
    r.axes = spec.axes;
    r.scheme = spec.scheme;
    r.method = spec.method;
    r.config_hash = spec.config_hash;
    std::size_t total = 1;
    for (const auto& a : spec.axes) total *= static_cast<std::size_t>(a.points);
    r.values.assign(total, std::numeric_limits<double>::quiet_NaN());

    std::vector<std::string> messages(total);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            const auto x = r.coords(i);
            try {
                const double v = spec.evaluator(x);
                if (std::isfinite(v))
                    r.values[i] = v;
                else
                    messages[i] = "non-finite value";
            } catch (const std::exception& e) {
                messages[i] = e.what();
            }
        }
    };
    const unsigned n = std::min<std::size_t>(sweep_threads(spec.threads), total);
    if (n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    }
    for (std::size_t i = 0; i < total; ++i)
        if (!messages[i].empty()) r.errors.push_back({i, messages[i]});
    r.best = locate_max(r);
    return r;
}

struct Optimum {
    double x = 0.0;
    double value = -std::numeric_limits<double>::infinity();
};

/// Golden-section search for a maximum of f on [a, b], stopping when the
/// bracket is narrower than tol. Non-finite values count as -inf.
inline Optimum golden_section_max(const std::function<double(double)>& f, double a, double b, double tol,
                                  int max_iter = 200) {
    require(a < b && tol > 0.0, "golden section needs an ordered bracket and positive tolerance");
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    auto safe = [&](double x) {
        double v;
        try {
            v = f(x);
        } catch (const Error&) {
            v = -std::numeric_limits<double>::infinity();
        }
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = safe(c), fd = safe(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = safe(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = safe(d);
        }
    }
    return fc >= fd ? Optimum{c, fc} : Optimum{d, fd};
}

struct RefinedMax {
    std::vector<double> coords;
    double value = 0.0;
    int rounds = 0;
};

/// Refines the best grid cell with golden sections (alternating over the
/// axes in 2-D, at most 50 rounds). Log axes are searched in log space.
/// Tolerance is 1e-4 relative in each coordinate.
inline RefinedMax refine_max(const SweepResult& result, const Evaluator& evaluator, double rel_tol = 1e-4) {
    if (!result.best.found) throw Error(ErrorKind::InvalidArgument, "sweep has no finite cells");
    const auto& axes = result.axes;
    for (std::size_t k = 0; k < axes.size(); ++k) {
        const int i = result.best.index[k];
        if (i == 0 || i == axes[k].points - 1)
            throw Error(ErrorKind::BoundaryMaximum, "maximum lies on the boundary of axis '" + axes[k].name + "'");
    }

    RefinedMax out{result.best.coords, result.best.value, 0};
    std::vector<double> x = out.coords;
    double fx = out.value;
    const int max_rounds = axes.size() == 1 ? 1 : 50;
    for (int round = 0; round < max_rounds; ++round) {
        bool moved = false;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            const Axis& ax = axes[k];
            const double step = (ax.to_uniform(ax.hi) - ax.to_uniform(ax.lo)) / (ax.points - 1);
            const double u0 = ax.to_uniform(x[k]);
            const double lo = std::max(ax.to_uniform(ax.lo), u0 - step);
            const double hi = std::min(ax.to_uniform(ax.hi), u0 + step);
            // Relative tolerance in x; in log space that is an absolute width.
            const double tol = ax.scale == Scale::Log ? rel_tol : rel_tol * std::max(std::abs(x[k]), step * 1e-3);
            auto line = [&](double u) {
                std::vector<double> y = x;
                y[k] = ax.from_uniform(u);
                return evaluator(y);
            };
            const Optimum o = golden_section_max(line, lo, hi, tol);
            if (o.value > fx) {
                const double nx = ax.from_uniform(o.x);
                if (std::abs(nx - x[k]) > rel_tol * std::abs(x[k])) moved = true;
                x[k] = nx;
                fx = o.value;
            }
        }
        out.rounds = round + 1;
        if (!moved) break;
    }
    out.coords = x;
    out.value = fx;
    return out;
}

/// Cooperativity-limited maxima with all error terms zeroed.
struct ScalingRow {
    double C;
    double scattering;
    double scattering_asymptote;  // 1 - 5/(4C)
    double simple;
    double raman;
    double exchange_asymptote;    // 1 - pi/sqrt(C)
    double simple_detuning;       // argmax Delta/kappa
    double raman_detuning;        // argmax delta/kappa
};

namespace detail {

inline Optimum maximize_ridge(const std::function<double(double, double)>& f_pi, double coop) {
    // Search x = Delta/kappa in log space around sqrt(C)/2.
    const double centre = std::log(0.5 * std::sqrt(coop));
    auto g = [&](double u) { return 0.5 * (f_pi(std::exp(u), coop) + 1.0); };
    Optimum o = golden_section_max(g, centre - std::log(20.0), centre + std::log(20.0), 1e-10);
    o.x = std::exp(o.x);
    return o;
}

} // namespace detail

inline std::vector<ScalingRow> cooperativity_scaling(std::span<const double> coops) {
    std::vector<ScalingRow> rows;
    rows.reserve(coops.size());
    for (double c : coops) {
        require(std::isfinite(c) && c >= 1.0, "cooperativity values must be >= 1");
        const Optimum s = detail::maximize_ridge(f_pi_ideal, c);
        const Optimum r = detail::maximize_ridge(raman_f_pi, c);
        rows.push_back({c, scattering_cooperativity_limit(c), 1.0 - 5.0 / (4.0 * c), s.value, r.value,
                        1.0 - pi / std::sqrt(c), s.x, r.x});
    }
    return rows;
}

/// Decoherence-limited optimum of each scheme for a bad-cavity system,
/// in units where gamma = 1.
struct DecoherenceOptimum {
    double Gamma;
    double scattering_F, scattering_T;
    double simple_F, simple_T;
    double raman_F, raman_T;
    double raman_Omega_over_Delta;
};

/// Scattering: optimize the photon duration (delta_p = 0). Simple exchange:
/// optimize Delta. Raman: optimize delta and Omega/Delta with Delta large
/// enough that only the cos^2(pi Omega/4 Delta) adiabatic factor remains.
inline DecoherenceOptimum decoherence_optimum(double Gamma, double coop, double g_over_kappa) {
    require(Gamma > 0.0, "Gamma must be positive");
    const auto cav = CavitySystem::from_cooperativity(coop, g_over_kappa, 1.0);
    const double kappa = cav.kappa(), g2 = cav.g() * cav.g();
    DecoherenceOptimum out{};
    out.Gamma = Gamma;

    {
        auto f = [&](double u) {
            const ScatteringConfig sc{cav, PhotonPulse::from_gate_time(std::exp(u), 0.0), 0.0, 0.0, Gamma};
            return fidelity_analytic(sc).fidelity;
        };
        const double t0 = std::log(optimal_gate_time(coop, 1.0, Gamma));
        const Optimum o = golden_section_max(f, t0 - 5.0, t0 + 5.0, 1e-10);
        out.scattering_T = std::exp(o.x);
        out.scattering_F = o.value;
    }
    {
        auto f = [&](double u) {
            const double x = std::exp(u);
            return 0.5 * (f_pi_ideal(x, coop) + 1.0) - Gamma * pi * x * kappa / g2;
        };
        const double c0 = std::log(0.5 * std::sqrt(coop));
        const Optimum o = golden_section_max(f, c0 - 8.0, c0 + 3.0, 1e-10);
        out.simple_T = pi * std::exp(o.x) * kappa / g2;
        out.simple_F = o.value;
    }
    {
        auto f = [&](double u, double r) {
            const double y = std::exp(u);
            const double a = std::cos(pi * r / 4.0);
            return 0.5 * (a * a * raman_f_pi(y, coop) + 1.0) - Gamma * pi * y * kappa / (g2 * r * r);
        };
        double u = std::log(0.5 * std::sqrt(coop)), r = 0.5;
        double best = f(u, r);
        for (int round = 0; round < 50; ++round) {
            const Optimum ou = golden_section_max([&](double v) { return f(v, r); }, u - 6.0, u + 3.0, 1e-10);
            const Optimum orr = golden_section_max([&](double v) { return f(ou.x, v); }, 1e-4, 2.0, 1e-10);
            const bool done = std::abs(ou.x - u) < 1e-9 && std::abs(orr.x - r) < 1e-9;
            if (orr.value >= best) {
                u = ou.x;
                r = orr.x;
                best = orr.value;
            }
            if (done) break;
        }
        out.raman_F = best;
        out.raman_Omega_over_Delta = r;
        out.raman_T = pi * std::exp(u) * kappa / (g2 * r * r);
    }
    return out;
}

} // namespace cgate
