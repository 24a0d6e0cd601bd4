#pragma once

// Experiment drivers. Each runner draws every trial from its own generator seeded with
// (seed, n, trial), so a report is reproducible from its name, parameters and seed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pentatrope/automaton.hpp"
#include "pentatrope/errors.hpp"
#include "pentatrope/invariants.hpp"
#include "pentatrope/pentagram_dynamics.hpp"
#include "pentatrope/projective_geometry.hpp"
#include "pentatrope/sampling.hpp"
#include "pentatrope/tropical_core.hpp"

namespace pentatrope {

inline constexpr std::uint64_t default_seed = 20240611;

struct Tolerances {
    double conjugacy_rel = 1e-9;       // Log_t F^l t^x against phi_t^l
    double tf_conjugacy_rel = 1e-12;   // T against sign-conjugated F
    double conservation_rel = 1e-8;    // O_k, E_k drift along T
    double geometry_rel = 1e-7;        // geometric step against T
    double projective_rel = 1e-8;      // canonical coordinates under Psi
    double bound_slack = 1e-9;         // absolute rounding allowance on bound-type checks
    double log_crosscheck = 1e-8;      // log-domain F against linear T
    double max_nongeneric_fraction = 0.2;
    double max_rank_mismatch_fraction = 0.05;
};

struct ExperimentReport {
    std::string name;
    nlohmann::json parameters = nlohmann::json::object();
    std::uint64_t samples = 0;
    double max_observed = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::uint64_t seed = default_seed;
    std::int64_t runtime_ms = 0;
    nlohmann::json details = nlohmann::json::object();
};

inline nlohmann::json to_json(const ExperimentReport& r) {
    return {{"name", r.name},         {"parameters", r.parameters}, {"samples", r.samples},
            {"max_observed", r.max_observed}, {"bound", r.bound},   {"pass", r.pass},
            {"seed", r.seed},         {"runtime_ms", r.runtime_ms}, {"details", r.details}};
}

namespace detail {

class Stopwatch {
public:
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double max_rel_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        g = std::max(g, rel_gap(a[i], b[i]));
    }
    return g;
}

inline double max_rel_gap(const SignedState& a, const SignedState& b) {
    return std::max(max_rel_gap(a.z, b.z), max_rel_gap(a.w, b.w));
}

/// Log-uniform positive state with entries in [1/3, 3].
template <class Rng>
PositiveState random_positive_state(std::size_t n, Rng& rng, double log_bound = std::log(3.0)) {
    std::uniform_real_distribution<double> u(-log_bound, log_bound);
    std::vector<double> z(n), w(n);
    for (auto& v : z) {
        v = std::exp(u(rng));
    }
    for (auto& v : w) {
        v = std::exp(u(rng));
    }
    return PositiveState(std::move(z), std::move(w));
}

/// A B_n point whose y block repeats with period gcd(k, n), so that phi^k fixes it.
template <class Rng>
TropicalState<double> b_n_point_fixed_by(std::size_t n, std::size_t k, Rng& rng, double bound) {
    const std::size_t g = std::gcd(k, n);
    std::uniform_real_distribution<double> u(-bound, bound);
    std::vector<double> x(n), seed_y(g), y(n);
    for (auto& v : x) {
        v = u(rng);
    }
    for (auto& v : seed_y) {
        v = u(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = seed_y[i % g];
    }
    return pushed_into_B_n(std::move(x), std::move(y));
}

}  // namespace detail

/// phi on rational B_n points: y shifts cyclically each step, x is fixed, phi^n = id. Zero tolerance.
inline ExperimentReport run_lemma21(const std::vector<std::size_t>& ns, std::size_t trials,
                                    std::uint64_t seed = default_seed) {
    detail::Stopwatch clock;
    ExperimentReport r{"lemma21", {{"n", ns}, {"trials", trials}}};
    r.seed = seed;
    std::uint64_t violations = 0;
    nlohmann::json periods = nlohmann::json::object();
    for (std::size_t n : ns) {
        std::map<std::size_t, std::uint64_t> histogram;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            auto rng = trial_rng(seed, n, trial);
            const auto s = random_rational_B_n_point(n, rng);
            auto cur = s;
            for (std::size_t l = 1; l <= n; ++l) {
                cur = step_phi(cur);
                bool shifted = cur.x == s.x;
                for (std::size_t i = 0; i < n && shifted; ++i) {
                    shifted = cur.y[i] == s.y[(i + l) % n];
                }
                violations += shifted ? 0 : 1;
            }
            violations += cur == s ? 0 : 1;
            ++histogram[detect_period(s, n).value_or(0)];
            ++r.samples;
        }
        nlohmann::json h = nlohmann::json::object();
        for (const auto& [k, c] : histogram) {
            h[std::to_string(k)] = c;
        }
        periods[std::to_string(n)] = h;
    }
    r.max_observed = static_cast<double>(violations);
    r.bound = 0.0;
    r.pass = violations == 0;
    r.details = {{"violations", violations}, {"period_histogram", periods}};
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

/// Quasi-recursiveness of T on lifted B_n points. Iterates F in natural-log form; on the
/// quasi-periodic sign pattern T^k = conj F^k conj, so ratios z^k/z have positive sign and
/// |log ratio| = |u_k - u_0|. Where t^x is representable the linear T orbit is iterated as well.
inline ExperimentReport run_thm22(std::size_t n, std::size_t k, const std::vector<double>& t_values,
                                  std::size_t trials, std::uint64_t seed = default_seed,
                                  const Tolerances& tol = {}, double magnitude = 3.0) {
    detail::Stopwatch clock;
    ExperimentReport r{"thm22", {{"n", n}, {"k", k}, {"t", t_values}, {"trials", trials}, {"magnitude", magnitude}}};
    r.seed = seed;
    if (n < min_polygon_size || k == 0) {
        throw domain_error("run_thm22 needs n >= 5 and k >= 1");
    }
    const unsigned kk = static_cast<unsigned>(k);
    const double log_bound = std::log(std::log(4.0)) + log_p_number(kk, 5.0);
    const bool log_compare = log_bound > std::log(1e300);
    // With log_compare, bound and max_observed are natural logs of the linear quantities.
    r.bound = log_compare ? log_bound : std::exp(log_bound);

    double max_log_ratio = 0.0;
    double max_t_scaled = 0.0;
    double max_t_scaled_normalized = 0.0;
    double max_crosscheck = 0.0;
    std::uint64_t crosschecked = 0;
    std::uint64_t period_mismatch = 0;
    std::uint64_t singular = 0;
    nlohmann::json per_t = nlohmann::json::array();
    for (double tv : t_values) {
        const SemiringParam t(tv);
        const double t_bound = p_number(kk, 5.0) * std::log(4.0) / t.log_base();
        double worst_here = 0.0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            auto rng = trial_rng(seed, n, trial);
            const auto s = detail::b_n_point_fixed_by(n, k, rng, magnitude);
            const auto period = detect_period(s, n);
            if (!period || k % *period != 0) {
                ++period_mismatch;
            }
            const LogState start = lift_log(t, s);
            LogState cur = start;
            for (std::size_t step = 0; step < k; ++step) {
                cur = step_F_log(cur);
            }
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max({worst, std::abs(cur.u[i] - start.u[i]), std::abs(cur.v[i] - start.v[i])});
            }
            for (double v : cur.u) {
                singular += std::isfinite(v) ? 0 : 1;
            }
            max_log_ratio = std::max(max_log_ratio, worst);
            worst_here = std::max(worst_here, worst);
            max_t_scaled = std::max(max_t_scaled, worst / t.log_base());
            max_t_scaled_normalized = std::max(max_t_scaled_normalized, worst / t.log_base() / t_bound);

            std::optional<SignedState> lifted;
            try {
                lifted = lift_quasiperiodic(t, s, trial % 2 == 0 ? Block::w : Block::z);
            } catch (const range_error&) {
                continue;
            }
            try {
                const SignedState lin0 = *lifted;
                SignedState lin = lin0;
                for (std::size_t step = 0; step < k; ++step) {
                    lin = step_T(lin);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double lu = std::log(std::abs(lin.z[i]));
                    const double lv = std::log(std::abs(lin.w[i]));
                    max_crosscheck = std::max({max_crosscheck, detail::rel_gap(lu, cur.u[i]), detail::rel_gap(lv, cur.v[i])});
                    // Sign of the ratio z^k/z must be +.
                    if (lin.z[i] * lin0.z[i] <= 0.0 || lin.w[i] * lin0.w[i] <= 0.0) {
                        ++singular;
                    }
                }
                ++crosschecked;
            } catch (const singularity_error&) {
                ++singular;
            }
        }
        per_t.push_back({{"t", tv}, {"max_log_ratio", worst_here}, {"t_scaled_bound", t_bound}});
        r.samples += trials;
    }
    const bool within = log_compare ? (max_log_ratio == 0.0 || std::log(max_log_ratio) <= log_bound)
                                    : max_log_ratio <= r.bound + tol.bound_slack;
    const bool t_uniform = max_t_scaled_normalized <= 1.0 + tol.bound_slack;
    r.max_observed = log_compare ? std::log(max_log_ratio) : max_log_ratio;
    r.pass = within && t_uniform && singular == 0 && period_mismatch == 0 && max_crosscheck <= tol.log_crosscheck;
    r.details = {{"log_bound", log_bound},
                 {"bound_exponent_of_4", p_number(kk, 5.0)},
                 {"log_domain_comparison", log_compare},
                 {"max_t_scaled_log_ratio", max_t_scaled},
                 {"max_t_scaled_over_bound", max_t_scaled_normalized},
                 {"linear_crosschecks", crosschecked},
                 {"max_linear_crosscheck_gap", max_crosscheck},
                 {"singularities", singular},
                 {"period_mismatches", period_mismatch},
                 {"per_t", per_t}};
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

/// Co-iterates phi and phi_t; reports the worst ratio deviation / (P_l(5) log_t 4) over l, t, components.
inline ExperimentReport run_prop33(std::size_t n, std::size_t l_max, const std::vector<double>& t_values,
                                   std::size_t trials, std::uint64_t seed = default_seed, const Tolerances& tol = {},
                                   double sup_norm = 10.0) {
    detail::Stopwatch clock;
    ExperimentReport r{"prop33", {{"n", n}, {"l_max", l_max}, {"t", t_values}, {"trials", trials}, {"sup_norm", sup_norm}}};
    r.seed = seed;
    std::uint64_t violations = 0;
    double worst_ratio = 0.0;
    double max_first_step = 0.0;
    nlohmann::json per_t = nlohmann::json::array();
    for (double tv : t_values) {
        const SemiringParam t(tv);
        const double log_t_4 = std::log(4.0) / t.log_base();
        double worst_dev = 0.0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            auto rng = trial_rng(seed, n, trial);
            auto a = random_real_state(n, rng, sup_norm);
            auto b = a;
            for (std::size_t l = 1; l <= l_max; ++l) {
                a = step_phi(a);
                b = step_phi_t(t, b);
                const double bound = p_number(static_cast<unsigned>(l), 5.0) * log_t_4;
                for (std::size_t i = 0; i < n; ++i) {
                    for (double dev : {std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i])}) {
                        violations += dev > bound + tol.bound_slack ? 1 : 0;
                        worst_ratio = std::max(worst_ratio, dev / bound);
                        worst_dev = std::max(worst_dev, dev);
                        if (l == 1) {
                            max_first_step = std::max(max_first_step, dev / log_t_4);
                        }
                    }
                }
            }
        }
        per_t.push_back({{"t", tv}, {"max_deviation", worst_dev}, {"bound_at_l_max", p_number(static_cast<unsigned>(l_max), 5.0) * log_t_4}});
        r.samples += trials;
    }
    r.max_observed = worst_ratio;
    r.bound = 1.0;
    r.pass = violations == 0;
    r.details = {{"violations", violations}, {"max_first_step_over_log_t_4", max_first_step}, {"per_t", per_t}};
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

/// Log_t F^l t^x against phi_t^l x, relative gap |a - b| / max(1, |b|).
inline ExperimentReport run_conjugacy(std::size_t n, std::size_t l_max, double tv, std::size_t trials,
                                      std::uint64_t seed = default_seed, const Tolerances& tol = {},
                                      double sup_norm = 5.0) {
    detail::Stopwatch clock;
    ExperimentReport r{"conjugacy", {{"n", n}, {"l_max", l_max}, {"t", tv}, {"trials", trials}, {"sup_norm", sup_norm}}};
    r.seed = seed;
    const SemiringParam t(tv);
    double worst = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        auto rng = trial_rng(seed, n, trial);
        auto x = random_real_state(n, rng, sup_norm);
        auto z = lift_positive(t, x);
        for (std::size_t l = 1; l <= l_max; ++l) {
            z = step_F(z);
            x = step_phi_t(t, x);
            const auto back = log_t_state(t, z);
            worst = std::max({worst, detail::max_rel_gap(back.x, x.x), detail::max_rel_gap(back.y, x.y)});
        }
        ++r.samples;
    }
    r.max_observed = worst;
    r.bound = tol.conjugacy_rel;
    r.pass = worst <= r.bound;
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

/// Drift of O_k, E_k (k <= floor(n/2) and k = n) along T-orbits of quasi-periodic states, under the
/// convention selected by the conservation oracle unless `forced` is given.
inline ExperimentReport run_conservation(const std::vector<std::size_t>& ns, std::size_t orbits, std::size_t steps,
                                         std::uint64_t seed = default_seed, const Tolerances& tol = {},
                                         std::optional<SignConvention> forced = std::nullopt) {
    detail::Stopwatch clock;
    ExperimentReport r{"conservation", {{"n", ns}, {"orbits", orbits}, {"steps", steps}}};
    r.seed = seed;
    r.bound = tol.conservation_rel;
    r.pass = true;
    nlohmann::json per_n = nlohmann::json::array();
    for (std::size_t n : ns) {
        SignConvention conv;
        nlohmann::json entry = {{"n", n}};
        if (forced) {
            conv = *forced;
            entry["convention_source"] = "config";
        } else {
            try {
                const auto res = resolve_sign_convention(n, seed, orbits, steps, tol.conservation_rel);
                conv = res.convention;
                nlohmann::json cands = nlohmann::json::array();
                for (const auto& c : res.candidates) {
                    cands.push_back({{"family", c.family == Family::O ? "O" : "E"},
                                     {"signed", c.is_signed},
                                     {"block", c.block == EBlock::shifted ? "shifted" : "literal"},
                                     {"max_relative_drift", c.max_relative_drift},
                                     {"conserved", c.conserved}});
                }
                entry["convention_source"] = "oracle";
                entry["candidates"] = cands;
            } catch (const configuration_error& e) {
                entry["error"] = e.what();
                r.pass = false;
                per_n.push_back(entry);
                continue;
            }
        }
        entry["convention"] = {{"o_signed", conv.o_signed},
                               {"e_signed", conv.e_signed},
                               {"e_block", conv.e_block == EBlock::shifted ? "shifted" : "literal"}};
        double worst = 0.0;
        std::uint64_t singular = 0;
        for (std::size_t o = 0; o < orbits; ++o) {
            auto rng = trial_rng(seed ^ 0x5eedULL, n, o);
            const auto orb = orbit_T(random_quasiperiodic_state(n, rng), steps);
            if (!orb.complete()) {
                ++singular;
                continue;
            }
            for (std::size_t k : invariant_weights(n)) {
                const double o0 = eval_O_k(orb.states.front(), k, conv);
                const double e0 = eval_E_k(orb.states.front(), k, conv);
                for (const auto& st : orb.states) {
                    worst = std::max(worst, std::abs(eval_O_k(st, k, conv) - o0) / std::abs(o0));
                    worst = std::max(worst, std::abs(eval_E_k(st, k, conv) - e0) / std::abs(e0));
                }
            }
            ++r.samples;
        }
        entry["max_relative_drift"] = worst;
        entry["singular_orbits"] = singular;
        r.max_observed = std::max(r.max_observed, worst);
        r.pass = r.pass && singular == 0 && worst <= r.bound;
        per_n.push_back(entry);
    }
    r.details = {{"per_n", per_n}};
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

/// Exact conservation of sum x, sum y, tilde-O_k on integer phi-orbits; tilde-E max-pair on the
/// generic subset (both signs present and distinct at the start, for every k).
inline ExperimentReport run_tropical_conservation(const std::vector<std::size_t>& ns, std::size_t trials,
                                                  std::size_t steps, std::uint64_t seed = default_seed,
                                                  const Tolerances& tol = {}, std::int64_t magnitude = 1000) {
    detail::Stopwatch clock;
    ExperimentReport r{"tropical", {{"n", ns}, {"trials", trials}, {"steps", steps}, {"magnitude", magnitude}}};
    r.seed = seed;
    std::uint64_t violations = 0;
    std::uint64_t e_violations = 0;
    std::uint64_t three_case_violations = 0;
    std::uint64_t generic = 0;
    nlohmann::json per_n = nlohmann::json::array();
    using I = std::int64_t;
    for (std::size_t n : ns) {
        std::uint64_t generic_here = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            auto rng = trial_rng(seed, n, trial);
            auto s = random_integer_state(n, rng, magnitude);
            std::vector<I> o0;
            for (std::size_t k : invariant_weights(n)) {
                o0.push_back(tropical_O_k(s, k));
            }
            const I sy0 = tropical_E_k(s, n);
            std::vector<TropicalPair<I>> e0;
            bool is_generic = true;
            for (std::size_t k = 1; k <= half_size(n); ++k) {
                e0.push_back(tropical_E_pm(s, k));
                is_generic = is_generic && e0.back().separated();
            }
            for (std::size_t l = 0; l < steps; ++l) {
                s = step_phi(s);
                std::size_t idx = 0;
                for (std::size_t k : invariant_weights(n)) {
                    violations += tropical_O_k(s, k) == o0[idx++] ? 0 : 1;
                }
                violations += tropical_E_k(s, n) == sy0 ? 0 : 1;
                if (!is_generic) {
                    continue;
                }
                for (std::size_t k = 1; k <= half_size(n); ++k) {
                    const auto& start = e0[k - 1];
                    const auto now = tropical_E_pm(s, k);
                    e_violations += now.combined() == start.combined() ? 0 : 1;
                    // Difference form: the side leading at the start equals max(other side, initial value).
                    if (start.plus && start.minus) {
                        const bool plus_leads = *start.plus > *start.minus;
                        const I lead = plus_leads ? *now.plus : *now.minus;
                        const I other = plus_leads ? *now.minus : *now.plus;
                        three_case_violations += lead == std::max(other, start.combined()) ? 0 : 1;
                    }
                }
            }
            generic += is_generic ? 1 : 0;
            generic_here += is_generic ? 1 : 0;
            ++r.samples;
        }
        per_n.push_back({{"n", n}, {"generic_fraction", static_cast<double>(generic_here) / static_cast<double>(trials)}});
    }
    const double nongeneric = r.samples == 0 ? 0.0 : 1.0 - static_cast<double>(generic) / static_cast<double>(r.samples);
    r.max_observed = static_cast<double>(violations + e_violations);
    r.bound = 0.0;
    r.pass = violations == 0 && e_violations == 0 && nongeneric <= tol.max_nongeneric_fraction;
    r.details = {{"violations", violations},
                 {"e_pair_violations", e_violations},
                 {"e_three_case_violations", three_case_violations},
                 {"nongeneric_fraction", nongeneric},
                 {"per_n", per_n}};
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

/// Exact rank of the tropical invariants' local gradients along integer phi-orbits.
inline ExperimentReport run_thm23(const std::vector<std::size_t>& ns, std::size_t trials,
                                  std::uint64_t seed = default_seed, const Tolerances& tol = {},
                                  std::size_t steps = 30, std::int64_t magnitude = 1000) {
    detail::Stopwatch clock;
    ExperimentReport r{"thm23", {{"n", ns}, {"trials", trials}, {"steps", steps}, {"magnitude", magnitude}}};
    r.seed = seed;
    r.bound = tol.max_rank_mismatch_fraction;
    r.pass = true;
    nlohmann::json per_n = nlohmann::json::array();
    using I = std::int64_t;
    for (std::size_t n : ns) {
        std::uint64_t points = 0, nongeneric = 0, matched = 0, conservation_violations = 0;
        std::map<std::size_t, std::uint64_t> ranks;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            auto rng = trial_rng(seed, n, trial);
            auto s = random_integer_state(n, rng, magnitude);
            std::vector<I> start;
            auto snapshot = [&](const TropicalState<I>& v) {
                std::vector<I> out;
                for (std::size_t k : invariant_weights(n)) {
                    out.push_back(tropical_O_k(v, k));
                    out.push_back(tropical_E_k(v, k));
                }
                return out;
            };
            start = snapshot(s);
            for (std::size_t l = 0; l <= steps; ++l) {
                if (l > 0) {
                    s = step_phi(s);
                    conservation_violations += snapshot(s) == start ? 0 : 1;
                }
                ++points;
                try {
                    const auto rank = invariant_rank_at(s);
                    ++ranks[rank];
                    matched += rank == predicted_invariant_rank(n) ? 1 : 0;
                } catch (const genericity_error&) {
                    ++nongeneric;
                }
            }
        }
        const std::uint64_t generic = points - nongeneric;
        const double mismatch = generic == 0 ? 1.0 : 1.0 - static_cast<double>(matched) / static_cast<double>(generic);
        const double nongeneric_fraction = static_cast<double>(nongeneric) / static_cast<double>(points);
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [k, c] : ranks) {
            hist[std::to_string(k)] = c;
        }
        per_n.push_back({{"n", n},
                         {"points", points},
                         {"nongeneric_fraction", nongeneric_fraction},
                         {"predicted_rank", predicted_invariant_rank(n)},
                         {"rank_match_fraction", 1.0 - mismatch},
                         {"rank_histogram", hist},
                         {"polytope_dimension", 2 * n - predicted_invariant_rank(n)},
                         {"conservation_violations", conservation_violations}});
        r.samples += points;
        r.max_observed = std::max(r.max_observed, mismatch);
        r.pass = r.pass && mismatch <= r.bound && nongeneric_fraction < tol.max_nongeneric_fraction &&
                 conservation_violations == 0;
    }
    r.details = {{"per_n", per_n}};
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

/// Geometric step against T through canonical coordinates, projective invariance of the
/// coordinates, and T/F sign-conjugacy. Degenerate polygons are redrawn up to `max_retries` times.
inline ExperimentReport run_crosschecks(const std::vector<std::size_t>& ns, std::size_t trials,
                                        std::uint64_t seed = default_seed, const Tolerances& tol = {},
                                        std::size_t max_retries = 10) {
    detail::Stopwatch clock;
    ExperimentReport r{"crosschecks", {{"n", ns}, {"trials", trials}, {"max_retries", max_retries}}};
    r.seed = seed;
    double geo = 0.0, proj = 0.0, tf = 0.0;
    std::uint64_t retries = 0, exhausted = 0;
    for (std::size_t n : ns) {
        for (std::size_t trial = 0; trial < trials; ++trial) {
            auto rng = trial_rng(seed, n, trial);
            bool done = false;
            for (std::size_t attempt = 0; attempt <= max_retries && !done; ++attempt) {
                try {
                    const auto poly = random_convex_polygon(n, rng, trial % 2 == 1);
                    const auto coords = canonical_coordinates(poly);
                    geo = std::max(geo, detail::max_rel_gap(canonical_coordinates(geometric_pentagram_step(poly)),
                                                            step_T(coords)));
                    const auto psi = random_projective(rng);
                    proj = std::max(proj, detail::max_rel_gap(canonical_coordinates(poly.transformed(psi)), coords));
                    done = true;
                } catch (const geometry_error&) {
                    ++retries;
                } catch (const singularity_error&) {
                    ++retries;
                }
            }
            exhausted += done ? 0 : 1;
            const auto p = detail::random_positive_state(n, rng);
            for (Block b : {Block::z, Block::w}) {
                tf = std::max(tf, detail::max_rel_gap(step_T(sign_conjugate(p, b)), sign_conjugate(step_F(p), b)));
            }
            ++r.samples;
        }
    }
    r.max_observed = geo;
    r.bound = tol.geometry_rel;
    r.pass = geo <= tol.geometry_rel && proj <= tol.projective_rel && tf <= tol.tf_conjugacy_rel && exhausted == 0;
    r.details = {{"max_geometric_vs_T", geo},
                 {"max_projective_invariance_gap", proj},
                 {"max_T_F_conjugacy_gap", tf},
                 {"retries", retries},
                 {"exhausted_trials", exhausted}};
    r.runtime_ms = clock.elapsed_ms();
    return r;
}

}  // namespace pentatrope
