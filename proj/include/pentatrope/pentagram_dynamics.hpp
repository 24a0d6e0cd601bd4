#pragma once

/**
 * @file pentagram_dynamics.hpp
 * @brief The pentagram map T in (z, w) coordinates, its positive conjugate F, and orbits.
 *
 *   T: z_i' = z_i (1 - z_{i-1} w_{i-1}) / (1 - z_{i+1} w_{i+1}),
 *      w_i' = w_{i+1} (1 - z_{i+2} w_{i+2}) / (1 - z_i w_i)
 *
 *   F: the same with every "1 -" replaced by "1 +"; F maps the positive orthant to itself.
 *
 * Negating either block conjugates one into the other:
 *   step_T(sign_conjugate(s, b)) == sign_conjugate(step_F(s), b).
 * Indices are taken mod n.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pentatrope/errors.hpp"

namespace pentatrope {

inline constexpr std::size_t min_polygon_size = 5;

/// Relative threshold on |1 - z_i w_i| below which T is considered singular.
inline constexpr double default_singularity_tol = 1e-12;

enum class Block { z, w };

/// A point (z, w) of R^{2n}; entries may have any sign.
struct SignedState {
    std::vector<double> z;
    std::vector<double> w;

    SignedState() = default;
    SignedState(std::vector<double> z_, std::vector<double> w_) : z(std::move(z_)), w(std::move(w_)) {
        if (z.size() != w.size()) {
            throw dimension_error("z and w blocks must have equal length");
        }
        if (z.size() < min_polygon_size) {
            throw domain_error("states need n >= 5, got n = " + std::to_string(z.size()));
        }
        for (const auto* block : {&z, &w}) {
            for (double v : *block) {
                if (!std::isfinite(v)) {
                    throw domain_error("state entries must be finite");
                }
            }
        }
    }

    std::size_t size() const noexcept { return z.size(); }

    friend bool operator==(const SignedState&, const SignedState&) = default;
};

/// A point of the positive orthant, the domain of F.
class PositiveState {
public:
    PositiveState(std::vector<double> z, std::vector<double> w) : s_(std::move(z), std::move(w)) {
        for (const auto* block : {&s_.z, &s_.w}) {
            for (double v : *block) {
                if (!(v > 0.0)) {
                    throw domain_error("PositiveState entries must be > 0");
                }
            }
        }
    }

    const std::vector<double>& z() const noexcept { return s_.z; }
    const std::vector<double>& w() const noexcept { return s_.w; }
    std::size_t size() const noexcept { return s_.size(); }
    const SignedState& as_signed() const noexcept { return s_; }

    friend bool operator==(const PositiveState&, const PositiveState&) = default;

private:
    SignedState s_;
};

namespace detail {

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace detail

inline SignedState step_T(const SignedState& s, double singularity_tol = default_singularity_tol) {
    const std::size_t n = s.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = s.z[i] * s.w[i];
        d[i] = 1.0 - p;
        if (std::abs(d[i]) <= singularity_tol * std::max(1.0, std::abs(p))) {
            throw singularity_error("pentagram map singular: 1 - z_i w_i vanishes at i = " + std::to_string(i), i);
        }
    }
    SignedState out;
    out.z.resize(n);
    out.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out.z[i] = s.z[i] * d[detail::wrap(k - 1, n)] / d[detail::wrap(k + 1, n)];
        out.w[i] = s.w[detail::wrap(k + 1, n)] * d[detail::wrap(k + 2, n)] / d[i];
    }
    return out;
}

inline PositiveState step_F(const PositiveState& s) {
    const std::size_t n = s.size();
    const auto& z = s.z();
    const auto& w = s.w();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = 1.0 + z[i] * w[i];
    }
    std::vector<double> nz(n), nw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        nz[i] = z[i] * d[detail::wrap(k - 1, n)] / d[detail::wrap(k + 1, n)];
        nw[i] = w[detail::wrap(k + 1, n)] * d[detail::wrap(k + 2, n)] / d[i];
    }
    return PositiveState(std::move(nz), std::move(nw));
}

/// F on natural logarithms (u, v) = (log z, log w); 1 + e^a is evaluated as softplus(a).
struct LogState {
    std::vector<double> u;
    std::vector<double> v;
};

inline double softplus(double a) {
    return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

inline LogState step_F_log(const LogState& s) {
    const std::size_t n = s.u.size();
    if (s.v.size() != n) {
        throw dimension_error("log state blocks must have equal length");
    }
    std::vector<double> sp(n);
    for (std::size_t i = 0; i < n; ++i) {
        sp[i] = softplus(s.u[i] + s.v[i]);
    }
    LogState out{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i);
        out.u[i] = s.u[i] + sp[detail::wrap(k - 1, n)] - sp[detail::wrap(k + 1, n)];
        out.v[i] = s.v[detail::wrap(k + 1, n)] + sp[detail::wrap(k + 2, n)] - sp[i];
    }
    return out;
}

inline LogState to_log(const PositiveState& s) {
    LogState out{std::vector<double>(s.size()), std::vector<double>(s.size())};
    std::transform(s.z().begin(), s.z().end(), out.u.begin(), [](double v) { return std::log(v); });
    std::transform(s.w().begin(), s.w().end(), out.v.begin(), [](double v) { return std::log(v); });
    return out;
}

inline PositiveState from_log(const LogState& s) {
    std::vector<double> z(s.u.size()), w(s.v.size());
    std::transform(s.u.begin(), s.u.end(), z.begin(), [](double v) { return std::exp(v); });
    std::transform(s.v.begin(), s.v.end(), w.begin(), [](double v) { return std::exp(v); });
    return PositiveState(std::move(z), std::move(w));
}

/// Negates one block. An involution.
inline SignedState sign_conjugate(SignedState s, Block block) {
    auto& target = block == Block::z ? s.z : s.w;
    for (double& v : target) {
        v = -v;
    }
    return s;
}

inline SignedState sign_conjugate(const PositiveState& s, Block block) {
    return sign_conjugate(s.as_signed(), block);
}

/// Where and why an orbit stopped early.
struct SingularityReport {
    std::size_t step = 0;   ///< index of the state whose image could not be formed
    std::size_t index = 0;  ///< offending coordinate
    std::string message;
};

template <class State>
struct Orbit {
    std::vector<State> states;
    std::optional<SingularityReport> stopped;

    bool complete() const noexcept { return !stopped.has_value(); }
};

/// Iterates `step` `steps` times. A singularity_error ends the orbit early and is recorded.
template <class State, class StepFn>
Orbit<State> orbit(StepFn&& step, State start, std::size_t steps) {
    Orbit<State> out;
    out.states.reserve(steps + 1);
    out.states.push_back(std::move(start));
    for (std::size_t m = 0; m < steps; ++m) {
        try {
            out.states.push_back(step(out.states.back()));
        } catch (const singularity_error& e) {
            out.stopped = SingularityReport{m, e.index(), e.what()};
            break;
        }
    }
    return out;
}

inline Orbit<SignedState> orbit_T(const SignedState& s, std::size_t steps,
                                  double singularity_tol = default_singularity_tol) {
    return orbit([&](const SignedState& x) { return step_T(x, singularity_tol); }, s, steps);
}

inline Orbit<PositiveState> orbit_F(const PositiveState& s, std::size_t steps) {
    return orbit([](const PositiveState& x) { return step_F(x); }, s, steps);
}

}  // namespace pentatrope
