#pragma once

/**
 * @file invariants.hpp
 * @brief Conserved quantities O_k, E_k of the pentagram map and their tropical counterparts.
 *
 * An admissible monomial is a product of "big" factors Z_i = z_i w_i z_{i+1} and "small"
 * factors z_j with no two factors consecutive (indices mod n):
 *   Z_i ~ Z_j  iff j in {i-2, ..., i+2},
 *   Z_i ~ z_j  iff j in {i-1, ..., i+2},
 *   z_i ~ z_{i+1}.
 * Its weight is (#big + #small) and its sign (-1)^(#small).
 *
 * The E family uses the same index sets with z and w exchanged. Which big block is conserved
 * (W_i = w_i z_{i+1} w_{i+1} or w_i z_i w_{i+1}) and whether the families are signed is decided
 * by resolve_sign_convention, which measures conservation along T-orbits; the default
 * SignConvention is the one it selects.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pentatrope/automaton.hpp"
#include "pentatrope/errors.hpp"
#include "pentatrope/exact_rank.hpp"
#include "pentatrope/pentagram_dynamics.hpp"

namespace pentatrope {

enum class Family { O, E };

/// Big factor of the E family.
enum class EBlock {
    shifted,  ///< W_i = w_i z_{i+1} w_{i+1}
    literal,  ///< W_i = w_i z_i w_{i+1}
};

struct SignConvention {
    bool o_signed = true;
    bool e_signed = true;
    EBlock e_block = EBlock::shifted;

    friend bool operator==(const SignConvention&, const SignConvention&) = default;
};

struct AdmissibleMonomial {
    Family kind = Family::O;
    std::vector<std::size_t> big_indices;
    std::vector<std::size_t> small_indices;

    std::size_t weight() const noexcept { return big_indices.size() + small_indices.size(); }
    int sign() const noexcept { return small_indices.size() % 2 == 0 ? 1 : -1; }

    friend bool operator==(const AdmissibleMonomial&, const AdmissibleMonomial&) = default;
};

/// Largest k with nontrivial admissible monomials handled by enumerate_admissible.
inline std::size_t half_size(std::size_t n) { return n / 2; }

namespace detail {

inline std::size_t cyclic_offset(std::size_t from, std::size_t to, std::size_t n) { return (to + n - from) % n; }

inline bool big_big_clash(std::size_t i, std::size_t j, std::size_t n) {
    const std::size_t d = cyclic_offset(i, j, n);
    return d <= 2 || d >= n - 2;
}

inline bool big_small_clash(std::size_t i, std::size_t j, std::size_t n) {
    const std::size_t d = cyclic_offset(i, j, n);
    return d <= 2 || d == n - 1;
}

inline bool small_small_clash(std::size_t i, std::size_t j, std::size_t n) {
    const std::size_t d = cyclic_offset(i, j, n);
    return d == 0 || d == 1 || d == n - 1;
}

inline void check_k(std::size_t n, std::size_t k) {
    if (n < min_polygon_size) {
        throw domain_error("invariants need n >= 5");
    }
    if (k == 0 || (k > half_size(n) && k != n)) {
        throw domain_error("k = " + std::to_string(k) + " outside 1..floor(n/2) and k = n for n = " +
                           std::to_string(n));
    }
}

inline void enumerate_rec(std::size_t n, std::size_t k, std::size_t pos, std::vector<std::size_t>& big,
                          std::vector<std::size_t>& small, Family kind, std::vector<AdmissibleMonomial>& out) {
    if (big.size() + small.size() == k) {
        out.push_back(AdmissibleMonomial{kind, big, small});
        return;
    }
    if (pos == n) {
        return;
    }
    enumerate_rec(n, k, pos + 1, big, small, kind, out);

    const bool big_ok = std::none_of(big.begin(), big.end(), [&](std::size_t b) { return big_big_clash(b, pos, n); }) &&
                        std::none_of(small.begin(), small.end(), [&](std::size_t s) { return big_small_clash(pos, s, n); });
    if (big_ok) {
        big.push_back(pos);
        enumerate_rec(n, k, pos + 1, big, small, kind, out);
        big.pop_back();
    }
    const bool small_ok =
        std::none_of(big.begin(), big.end(), [&](std::size_t b) { return big_small_clash(b, pos, n); }) &&
        std::none_of(small.begin(), small.end(), [&](std::size_t s) { return small_small_clash(s, pos, n); });
    if (small_ok) {
        small.push_back(pos);
        enumerate_rec(n, k, pos + 1, big, small, kind, out);
        small.pop_back();
    }
}

}  // namespace detail

/// All admissible monomials of weight k, ordered lexicographically by (big_indices, small_indices).
/// k = n is not an admissible weight: O_n = prod z_i is special-cased by the evaluators.
inline std::vector<AdmissibleMonomial> enumerate_admissible(std::size_t n, std::size_t k, Family kind) {
    detail::check_k(n, k);
    if (k == n) {
        throw domain_error("enumerate_admissible: weight n is the product invariant, not an admissible sum");
    }
    std::vector<AdmissibleMonomial> out;
    std::vector<std::size_t> big, small;
    detail::enumerate_rec(n, k, 0, big, small, kind, out);
    std::sort(out.begin(), out.end(), [](const AdmissibleMonomial& a, const AdmissibleMonomial& b) {
        return std::tie(a.big_indices, a.small_indices) < std::tie(b.big_indices, b.small_indices);
    });
    return out;
}

namespace detail {

/// Shared, immutable enumerations keyed by (n, k). Entries are never erased, so references stay valid.
inline const std::vector<AdmissibleMonomial>& admissible_cached(std::size_t n, std::size_t k) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, std::vector<AdmissibleMonomial>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find({n, k});
    if (it == cache.end()) {
        it = cache.emplace(std::make_pair(n, k), enumerate_admissible(n, k, Family::O)).first;
    }
    return it->second;
}

/// Index of the middle factor of a big block: Z_i uses w_i (O) and z_{i+1} (E, shifted) or z_i (E, literal).
inline std::size_t big_middle(std::size_t i, std::size_t n, Family family, EBlock block) {
    if (family == Family::E && block == EBlock::shifted) {
        return (i + 1) % n;
    }
    return i;
}

/// (primary, secondary) blocks for a family: O is built on z with w in the middle; E the reverse.
template <class V>
std::pair<const V&, const V&> family_blocks(const V& z, const V& w, Family family) {
    if (family == Family::O) {
        return {z, w};
    }
    return {w, z};
}

}  // namespace detail

/// Value of one monomial at (z, w).
inline double monomial_value(const AdmissibleMonomial& m, const SignedState& s, Family family, EBlock block) {
    const std::size_t n = s.size();
    auto [p, q] = detail::family_blocks(s.z, s.w, family);
    double v = 1.0;
    for (std::size_t i : m.big_indices) {
        v *= p[i] * q[detail::big_middle(i, n, family, block)] * p[(i + 1) % n];
    }
    for (std::size_t j : m.small_indices) {
        v *= p[j];
    }
    return v;
}

namespace detail {

inline double eval_family(const SignedState& s, std::size_t k, Family family, bool is_signed, EBlock block) {
    const std::size_t n = s.size();
    check_k(n, k);
    const auto& primary = family == Family::O ? s.z : s.w;
    if (k == n) {
        double prod = 1.0;
        for (double v : primary) {
            prod *= v;
        }
        return prod;
    }
    double sum = 0.0;
    for (const auto& m : admissible_cached(n, k)) {
        const double v = monomial_value(m, s, family, block);
        sum += is_signed ? m.sign() * v : v;
    }
    return sum;
}

}  // namespace detail

/// O_k = sum over admissible monomials of weight k (signed per convention); O_n = prod z_i.
inline double eval_O_k(const SignedState& s, std::size_t k, const SignConvention& conv = {}) {
    return detail::eval_family(s, k, Family::O, conv.o_signed, conv.e_block);
}

inline double eval_O_k(const PositiveState& s, std::size_t k, const SignConvention& conv = {}) {
    return eval_O_k(s.as_signed(), k, conv);
}

/// E_k, the z <-> w exchanged family; E_n = prod w_i.
inline double eval_E_k(const SignedState& s, std::size_t k, const SignConvention& conv = {}) {
    return detail::eval_family(s, k, Family::E, conv.e_signed, conv.e_block);
}

inline double eval_E_k(const PositiveState& s, std::size_t k, const SignConvention& conv = {}) {
    return eval_E_k(s.as_signed(), k, conv);
}

/// The weights k with a conserved quantity: 1..floor(n/2) and n.
inline std::vector<std::size_t> invariant_weights(std::size_t n) {
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k <= half_size(n); ++k) {
        ks.push_back(k);
    }
    ks.push_back(n);
    return ks;
}

/// Drift of one candidate convention measured by the oracle.
struct ConventionCandidate {
    Family family = Family::O;
    bool is_signed = true;
    EBlock block = EBlock::shifted;
    double max_relative_drift = 0.0;
    bool conserved = false;
};

struct ConventionResolution {
    SignConvention convention;
    std::vector<ConventionCandidate> candidates;
};

inline constexpr std::uint64_t default_oracle_seed = 20240611;

/// A sign-conjugated positive state with entries log-uniform in [1/3, 3]; never singular for T.
template <class Rng>
SignedState random_quasiperiodic_state(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> u(-std::log(3.0), std::log(3.0));
    std::vector<double> z(n), w(n);
    for (auto& v : z) {
        v = std::exp(u(rng));
    }
    for (auto& v : w) {
        v = std::exp(u(rng));
    }
    std::bernoulli_distribution coin(0.5);
    return sign_conjugate(PositiveState(std::move(z), std::move(w)), coin(rng) ? Block::z : Block::w);
}

/// Selects the invariant convention by measuring conservation along random nonsingular T-orbits.
/// Per family, exactly one candidate must keep max relative drift <= tol, else configuration_error.
inline ConventionResolution resolve_sign_convention(std::size_t n, std::uint64_t seed = default_oracle_seed,
                                                    std::size_t orbits = 50, std::size_t steps = 10,
                                                    double tol = 1e-8) {
    if (n < min_polygon_size) {
        throw domain_error("resolve_sign_convention needs n >= 5");
    }
    std::vector<Orbit<SignedState>> samples;
    samples.reserve(orbits);
    for (std::size_t o = 0; o < orbits; ++o) {
        std::seed_seq sseq{seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(o)};
        std::mt19937_64 rng(sseq);
        samples.push_back(orbit_T(random_quasiperiodic_state(n, rng), steps));
    }

    std::vector<ConventionCandidate> candidates;
    for (bool is_signed : {true, false}) {
        candidates.push_back({Family::O, is_signed, EBlock::shifted});
    }
    for (EBlock block : {EBlock::shifted, EBlock::literal}) {
        for (bool is_signed : {true, false}) {
            candidates.push_back({Family::E, is_signed, block});
        }
    }
    for (auto& c : candidates) {
        for (const auto& orb : samples) {
            for (std::size_t k = 1; k <= half_size(n); ++k) {
                const double i0 = detail::eval_family(orb.states.front(), k, c.family, c.is_signed, c.block);
                for (const auto& st : orb.states) {
                    const double im = detail::eval_family(st, k, c.family, c.is_signed, c.block);
                    const double drift = std::abs(im - i0) / std::max(std::abs(i0), 1e-300);
                    c.max_relative_drift = std::max(c.max_relative_drift, drift);
                }
            }
        }
        c.conserved = c.max_relative_drift <= tol;
    }

    ConventionResolution result{SignConvention{}, candidates};
    for (Family family : {Family::O, Family::E}) {
        const ConventionCandidate* chosen = nullptr;
        std::size_t passing = 0;
        for (const auto& c : candidates) {
            if (c.family == family && c.conserved) {
                ++passing;
                chosen = &c;
            }
        }
        const char* name = family == Family::O ? "O" : "E";
        if (passing == 0) {
            throw configuration_error(std::string("no conserved convention for the ") + name +
                                      " family at n = " + std::to_string(n));
        }
        if (passing > 1) {
            throw configuration_error(std::string("ambiguous convention for the ") + name + " family at n = " +
                                      std::to_string(n));
        }
        if (family == Family::O) {
            result.convention.o_signed = chosen->is_signed;
        } else {
            result.convention.e_signed = chosen->is_signed;
            result.convention.e_block = chosen->block;
        }
    }
    return result;
}

// --- tropical counterparts -------------------------------------------------------------------

/// Tropicalized monomial: sum of X_i = x_i + y_i + x_{i+1} over big factors plus x_j over small ones
/// (with x <-> y and the E block for the E family).
template <class Scalar>
Scalar tropical_monomial_value(const AdmissibleMonomial& m, const TropicalState<Scalar>& s, Family family,
                               EBlock block = EBlock::shifted) {
    const std::size_t n = s.size();
    auto [p, q] = detail::family_blocks(s.x, s.y, family);
    Scalar v(0);
    for (std::size_t i : m.big_indices) {
        v += p[i] + q[detail::big_middle(i, n, family, block)] + p[(i + 1) % n];
    }
    for (std::size_t j : m.small_indices) {
        v += p[j];
    }
    return v;
}

/// Integer gradient of a tropical monomial over (x_0..x_{n-1}, y_0..y_{n-1}).
inline std::vector<int> tropical_monomial_gradient(const AdmissibleMonomial& m, std::size_t n, Family family,
                                                   EBlock block = EBlock::shifted) {
    std::vector<int> g(2 * n, 0);
    const std::size_t p0 = family == Family::O ? 0 : n;
    const std::size_t q0 = family == Family::O ? n : 0;
    for (std::size_t i : m.big_indices) {
        g[p0 + i] += 1;
        g[q0 + detail::big_middle(i, n, family, block)] += 1;
        g[p0 + (i + 1) % n] += 1;
    }
    for (std::size_t j : m.small_indices) {
        g[p0 + j] += 1;
    }
    return g;
}

namespace detail {

template <class Scalar>
Scalar block_sum(const std::vector<Scalar>& v) {
    Scalar acc(0);
    for (const auto& e : v) {
        acc += e;
    }
    return acc;
}

template <class Scalar>
Scalar tropical_family(const TropicalState<Scalar>& s, std::size_t k, Family family, EBlock block) {
    const std::size_t n = s.size();
    check_k(n, k);
    if (k == n) {
        return block_sum(family == Family::O ? s.x : s.y);
    }
    const auto& mons = admissible_cached(n, k);
    Scalar best = tropical_monomial_value(mons.front(), s, family, block);
    for (std::size_t i = 1; i < mons.size(); ++i) {
        best = max_value(best, tropical_monomial_value(mons[i], s, family, block));
    }
    return best;
}

}  // namespace detail

/// max over admissible monomials of weight k of their tropicalization; k = n gives sum x_i.
template <class Scalar>
Scalar tropical_O_k(const TropicalState<Scalar>& s, std::size_t k) {
    return detail::tropical_family(s, k, Family::O, EBlock::shifted);
}

/// Tropical E_k over all monomials; equals max of the two tropical_E_pm values. k = n gives sum y_i.
template <class Scalar>
Scalar tropical_E_k(const TropicalState<Scalar>& s, std::size_t k, EBlock block = EBlock::shifted) {
    return detail::tropical_family(s, k, Family::E, block);
}

/// Maxima over positive-sign (even #small) and negative-sign (odd #small) E monomials separately.
/// A side is empty when no admissible monomial of that parity exists (e.g. n = 6, k = 3).
template <class Scalar>
struct TropicalPair {
    std::optional<Scalar> plus;
    std::optional<Scalar> minus;

    Scalar combined() const {
        if (plus && minus) {
            return detail::max_value(*plus, *minus);
        }
        return plus ? *plus : *minus;
    }

    /// No leading-term cancellation is possible: the sides differ or one is empty.
    bool separated() const { return !plus || !minus || *plus != *minus; }
};

template <class Scalar>
TropicalPair<Scalar> tropical_E_pm(const TropicalState<Scalar>& s, std::size_t k, EBlock block = EBlock::shifted) {
    const std::size_t n = s.size();
    detail::check_k(n, k);
    if (k == n) {
        const Scalar sum = detail::block_sum(s.y);
        return {sum, std::nullopt};
    }
    TropicalPair<Scalar> out;
    for (const auto& m : detail::admissible_cached(n, k)) {
        const Scalar v = tropical_monomial_value(m, s, Family::E, block);
        auto& side = m.sign() > 0 ? out.plus : out.minus;
        side = side ? detail::max_value(*side, v) : v;
    }
    return out;
}

/// 2 floor(n/2) + 2: the number of tropical invariants used for the level-set rank.
inline std::size_t predicted_invariant_rank(std::size_t n) { return 2 * (n / 2) + 2; }

/// 2 floor((n+1)/2) - 2 = 2n - predicted_invariant_rank(n).
inline std::size_t predicted_polytope_dimension(std::size_t n) { return 2 * ((n + 1) / 2) - 2; }

/// Rank over the rationals of the local gradients of tilde-O_k, tilde-E_k (k <= floor(n/2)),
/// sum x and sum y at a generic point. `margin` is the minimal gap required between the top two
/// monomial values and between x_i + y_i and 0; exact scalars require a strict gap.
template <class Scalar>
std::size_t invariant_rank_at(const TropicalState<Scalar>& s, EBlock block = EBlock::shifted, double margin = 1e-9) {
    const std::size_t n = s.size();
    auto too_close = [&](const Scalar& a, const Scalar& b) {
        const Scalar gap = detail::abs_value(Scalar(a - b));
        if constexpr (std::is_floating_point_v<Scalar>) {
            return gap <= margin;
        } else {
            return gap == Scalar(0);
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (too_close(Scalar(s.x[i] + s.y[i]), Scalar(0))) {
            throw genericity_error("inner max(0, x_i + y_i) at its breakpoint for i = " + std::to_string(i));
        }
    }
    std::vector<std::vector<int>> rows;
    for (std::size_t k = 1; k <= half_size(n); ++k) {
        for (Family family : {Family::O, Family::E}) {
            const auto& mons = detail::admissible_cached(n, k);
            std::size_t arg = 0;
            std::optional<Scalar> best, second;
            for (std::size_t i = 0; i < mons.size(); ++i) {
                const Scalar v = tropical_monomial_value(mons[i], s, family, block);
                if (!best || *best < v) {
                    second = best;
                    best = v;
                    arg = i;
                } else if (!second || *second < v) {
                    second = v;
                }
            }
            if (second && too_close(*best, *second)) {
                throw genericity_error(std::string("tilde-") + (family == Family::O ? "O_" : "E_") +
                                       std::to_string(k) + " attains its maximum at more than one monomial");
            }
            rows.push_back(tropical_monomial_gradient(mons[arg], n, family, block));
        }
    }
    std::vector<int> sx(2 * n, 0), sy(2 * n, 0);
    std::fill(sx.begin(), sx.begin() + static_cast<std::ptrdiff_t>(n), 1);
    std::fill(sy.begin() + static_cast<std::ptrdiff_t>(n), sy.end(), 1);
    rows.push_back(sx);
    rows.push_back(sy);
    return exact_rank(rows);
}

}  // namespace pentatrope
