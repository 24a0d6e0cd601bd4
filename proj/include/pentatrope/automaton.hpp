#pragma once

/**
 * @file automaton.hpp
 * @brief The pentagram automaton phi, its R_t interpolation phi_t, periodic points and their lifts.
 *
 *   phi: x_i <- x_i + max(0, x_{i-1}+y_{i-1}) - max(0, x_{i+1}+y_{i+1})
 *        y_i <- y_{i+1} + max(0, x_{i+2}+y_{i+2}) - max(0, x_i+y_i)          (indices mod n)
 *
 * phi_t replaces max(0, a) by 0 (+)_t a = log_t(1 + t^a); Log_t o F o t^(.) == phi_t exactly.
 *
 * TropicalState is a template over its scalar so that integer (std::int64_t) and rational
 * (boost::rational) states are iterated with exact arithmetic.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "pentatrope/errors.hpp"
#include "pentatrope/pentagram_dynamics.hpp"
#include "pentatrope/tropical_core.hpp"

namespace pentatrope {

template <class Scalar>
struct TropicalState {
    std::vector<Scalar> x;
    std::vector<Scalar> y;

    TropicalState() = default;
    TropicalState(std::vector<Scalar> x_, std::vector<Scalar> y_) : x(std::move(x_)), y(std::move(y_)) {
        if (x.size() != y.size()) {
            throw dimension_error("x and y blocks must have equal length");
        }
        if (x.size() < min_polygon_size) {
            throw domain_error("states need n >= 5, got n = " + std::to_string(x.size()));
        }
        if constexpr (std::is_floating_point_v<Scalar>) {
            for (const auto* block : {&x, &y}) {
                for (Scalar v : *block) {
                    if (!std::isfinite(v)) {
                        throw domain_error("tropical state entries must be finite");
                    }
                }
            }
        }
    }

    std::size_t size() const noexcept { return x.size(); }

    /// (x_0..x_{n-1}, y_0..y_{n-1}), the variable order used by the presentations below.
    std::vector<Scalar> flat() const {
        std::vector<Scalar> out(x);
        out.insert(out.end(), y.begin(), y.end());
        return out;
    }

    friend bool operator==(const TropicalState&, const TropicalState&) = default;
};

namespace detail {

template <class Scalar>
Scalar abs_value(const Scalar& v) {
    return v < Scalar(0) ? Scalar(-v) : v;
}

template <class Scalar>
Scalar max_value(const Scalar& a, const Scalar& b) {
    return a < b ? b : a;
}

}  // namespace detail

template <class Scalar>
TropicalState<Scalar> step_phi(const TropicalState<Scalar>& s) {
    const std::size_t n = s.size();
    std::vector<Scalar> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = detail::max_value(Scalar(0), Scalar(s.x[i] + s.y[i]));
    }
    TropicalState<Scalar> out;
    out.x.resize(n);
    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out.x[i] = s.x[i] + m[detail::wrap(k - 1, n)] - m[detail::wrap(k + 1, n)];
        out.y[i] = s.y[detail::wrap(k + 1, n)] + m[detail::wrap(k + 2, n)] - m[i];
    }
    return out;
}

inline TropicalState<double> step_phi_t(const SemiringParam& t, const TropicalState<double>& s) {
    const std::size_t n = s.size();
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = oplus(t, {0.0, s.x[i] + s.y[i]});
    }
    TropicalState<double> out;
    out.x.resize(n);
    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out.x[i] = s.x[i] + m[detail::wrap(k - 1, n)] - m[detail::wrap(k + 1, n)];
        out.y[i] = s.y[detail::wrap(k + 1, n)] + m[detail::wrap(k + 2, n)] - m[i];
    }
    return out;
}

template <class Scalar, class StepFn>
TropicalState<Scalar> iterate(StepFn&& step, TropicalState<Scalar> s, std::size_t times) {
    for (std::size_t i = 0; i < times; ++i) {
        s = step(s);
    }
    return s;
}

/// Sup-metric d(a, b) = max_i |a_i - b_i| over both blocks.
template <class Scalar>
Scalar sup_distance(const TropicalState<Scalar>& a, const TropicalState<Scalar>& b) {
    if (a.size() != b.size()) {
        throw dimension_error("sup_distance: size mismatch");
    }
    Scalar best(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        best = detail::max_value(best, detail::abs_value(Scalar(a.x[i] - b.x[i])));
        best = detail::max_value(best, detail::abs_value(Scalar(a.y[i] - b.y[i])));
    }
    return best;
}

/// B_n = { x_i + y_j <= 0 for all i, j }; phi acts on it as the cyclic shift of y.
template <class Scalar>
bool in_B_n(const TropicalState<Scalar>& s) {
    const Scalar mx = *std::max_element(s.x.begin(), s.x.end());
    const Scalar my = *std::max_element(s.y.begin(), s.y.end());
    return !(Scalar(0) < Scalar(mx + my));
}

/// Smallest k <= k_max with phi^k(s) = s. Exact comparison for exact scalars; sup-metric
/// tolerance `tol` for floating point. k_max = 0 means n^2.
template <class Scalar>
std::optional<std::size_t> detect_period(const TropicalState<Scalar>& s, std::size_t k_max = 0, double tol = 1e-9) {
    if (k_max == 0) {
        k_max = s.size() * s.size();
    }
    TropicalState<Scalar> cur = s;
    for (std::size_t k = 1; k <= k_max; ++k) {
        cur = step_phi(cur);
        if constexpr (std::is_floating_point_v<Scalar>) {
            if (sup_distance(cur, s) <= tol) {
                return k;
            }
        } else {
            if (cur == s) {
                return k;
            }
        }
    }
    return std::nullopt;
}

/// Largest |x log t| accepted by lift_positive before t^x would overflow or underflow.
inline constexpr double max_natural_exponent = 700.0;

/// (t^{x_1}, ..., t^{y_n}).
inline PositiveState lift_positive(const SemiringParam& t, const TropicalState<double>& s) {
    auto lift = [&](const std::vector<double>& block) {
        std::vector<double> out(block.size());
        for (std::size_t i = 0; i < block.size(); ++i) {
            const double e = block[i] * t.log_base();
            if (std::abs(e) > max_natural_exponent) {
                throw range_error("lift_positive: t^x out of range; use log-domain iteration");
            }
            out[i] = std::exp(e);
        }
        return out;
    };
    return PositiveState(lift(s.x), lift(s.y));
}

/// Log_t, the inverse of lift_positive.
inline TropicalState<double> log_t_state(const SemiringParam& t, const PositiveState& s) {
    return TropicalState<double>(log_t(t, s.z()), log_t(t, s.w()));
}

/// A point of bold-Per_k: lift_positive followed by negation of one block.
inline SignedState lift_quasiperiodic(const SemiringParam& t, const TropicalState<double>& s, Block block) {
    return sign_conjugate(lift_positive(t, s), block);
}

/// Natural-log image of the lift, for iteration with step_F_log when t^x is not representable.
inline LogState lift_log(const SemiringParam& t, const TropicalState<double>& s) {
    LogState out{s.x, s.y};
    for (double& v : out.u) {
        v *= t.log_base();
    }
    for (double& v : out.v) {
        v *= t.log_base();
    }
    return out;
}

/// The 2n components of phi as relative (max,+) presentations over (x_0..x_{n-1}, y_0..y_{n-1}).
/// Each has M = 4 components and Lipschitz bound 3 + 2 = 5.
inline std::vector<MaxPlusPresentation> automaton_presentations(std::size_t n) {
    if (n < min_polygon_size) {
        throw domain_error("automaton_presentations needs n >= 5");
    }
    const std::size_t d = 2 * n;
    auto unit = [&](std::initializer_list<std::size_t> idx) {
        std::vector<int> e(d, 0);
        for (std::size_t i : idx) {
            e[i] += 1;
        }
        return e;
    };
    auto xi = [&](std::ptrdiff_t i) { return detail::wrap(i, n); };
    auto yi = [&](std::ptrdiff_t i) { return n + detail::wrap(i, n); };
    std::vector<MaxPlusPresentation> out;
    out.reserve(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out.emplace_back(std::vector<AffineTerm>{{0.0, unit({xi(k)})}, {0.0, unit({xi(k), xi(k - 1), yi(k - 1)})}},
                         std::vector<AffineTerm>{{0.0, unit({})}, {0.0, unit({xi(k + 1), yi(k + 1)})}});
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out.emplace_back(std::vector<AffineTerm>{{0.0, unit({yi(k + 1)})}, {0.0, unit({yi(k + 1), xi(k + 2), yi(k + 2)})}},
                         std::vector<AffineTerm>{{0.0, unit({})}, {0.0, unit({xi(k), yi(k)})}});
    }
    return out;
}

}  // namespace pentatrope
