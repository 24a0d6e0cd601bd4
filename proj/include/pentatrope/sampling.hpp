#pragma once

/**
 * @file sampling.hpp
 * @brief Seeded random generators for polygons and states.
 *
 * Every experiment trial owns its generator, seeded from (seed, tag, trial) so results do not
 * depend on the order in which trials run.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include "pentatrope/automaton.hpp"
#include "pentatrope/pentagram_dynamics.hpp"
#include "pentatrope/projective_geometry.hpp"

namespace pentatrope {

using Rational = boost::rational<std::int64_t>;

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t trial) {
    std::seed_seq sseq{seed, tag, trial};
    return std::mt19937_64(sseq);
}

/// Random projective transformation I + noise with 2-norm condition number <= max_condition.
template <class Rng>
Eigen::Matrix3d random_projective(Rng& rng, double max_condition = 10.0) {
    std::normal_distribution<double> noise(0.0, 0.3);
    for (;;) {
        Eigen::Matrix3d psi = Eigen::Matrix3d::Identity();
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) {
                psi(i, j) += noise(rng);
            }
        }
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(psi);
        const auto& sv = svd.singularValues();
        if (sv(2) > 0.0 && sv(0) / sv(2) <= max_condition) {
            return psi;
        }
    }
}

/// Convex n-gon: sorted angles on the unit circle with radial jitter <= 10%, then a random
/// projective perturbation. With `twisted`, the monodromy is a small perturbation of the identity.
template <class Rng>
TwistedPolygon random_convex_polygon(std::size_t n, Rng& rng, bool twisted = false) {
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    std::uniform_real_distribution<double> angle_noise(-0.35, 0.35);
    const double slot = 2.0 * std::numbers::pi / static_cast<double>(n);
    const Eigen::Matrix3d psi = random_projective(rng);
    std::vector<ProjectivePoint> vertices;
    vertices.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = slot * (static_cast<double>(i) + angle_noise(rng));
        const double r = 1.0 + jitter(rng);
        vertices.emplace_back(psi * Eigen::Vector3d(r * std::cos(a), r * std::sin(a), 1.0));
    }
    Eigen::Matrix3d monodromy = Eigen::Matrix3d::Identity();
    if (twisted) {
        std::normal_distribution<double> noise(0.0, 0.03);
        for (Eigen::Index i = 0; i < 3; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) {
                monodromy(i, j) += noise(rng);
            }
        }
        monodromy = psi * monodromy * psi.inverse();
    }
    return TwistedPolygon(std::move(vertices), monodromy);
}

/// The regular n-gon inscribed in the unit circle.
inline TwistedPolygon regular_polygon(std::size_t n) {
    std::vector<ProjectivePoint> v;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        v.emplace_back(std::cos(a), std::sin(a), 1.0);
    }
    return TwistedPolygon::closed(std::move(v));
}

/// Entries uniform in [-bound, bound].
template <class Rng>
TropicalState<double> random_real_state(std::size_t n, Rng& rng, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    std::vector<double> x(n), y(n);
    for (auto& v : x) {
        v = u(rng);
    }
    for (auto& v : y) {
        v = u(rng);
    }
    return TropicalState<double>(std::move(x), std::move(y));
}

/// Integer entries uniform in [-bound, bound].
template <class Rng>
TropicalState<std::int64_t> random_integer_state(std::size_t n, Rng& rng, std::int64_t bound) {
    std::uniform_int_distribution<std::int64_t> u(-bound, bound);
    std::vector<std::int64_t> x(n), y(n);
    for (auto& v : x) {
        v = u(rng);
    }
    for (auto& v : y) {
        v = u(rng);
    }
    return TropicalState<std::int64_t>(std::move(x), std::move(y));
}

namespace detail {

/// Moves x down so that max x + max y <= 0.
template <class Scalar>
TropicalState<Scalar> pushed_into_B_n(std::vector<Scalar> x, std::vector<Scalar> y) {
    // Repeated because a floating-point shift can leave a one-ulp excess.
    for (;;) {
        const Scalar excess = *std::max_element(x.begin(), x.end()) + *std::max_element(y.begin(), y.end());
        if (!(Scalar(0) < excess)) {
            break;
        }
        for (auto& v : x) {
            v -= excess;
        }
    }
    return TropicalState<Scalar>(std::move(x), std::move(y));
}

}  // namespace detail

/// A point of B_n with entries of magnitude about `bound`.
template <class Rng>
TropicalState<double> random_B_n_point(std::size_t n, Rng& rng, double bound) {
    auto s = random_real_state(n, rng, bound);
    return detail::pushed_into_B_n(std::move(s.x), std::move(s.y));
}

/// A rational point of B_n, numerators in [-bound*den, bound*den] over denominators 1..max_den.
template <class Rng>
TropicalState<Rational> random_rational_B_n_point(std::size_t n, Rng& rng, std::int64_t bound = 10,
                                                  std::int64_t max_den = 12) {
    std::uniform_int_distribution<std::int64_t> den(1, max_den);
    auto draw = [&] {
        const std::int64_t d = den(rng);
        std::uniform_int_distribution<std::int64_t> num(-bound * d, bound * d);
        return Rational(num(rng), d);
    };
    std::vector<Rational> x(n), y(n);
    for (auto& v : x) {
        v = draw();
    }
    for (auto& v : y) {
        v = draw();
    }
    return detail::pushed_into_B_n(std::move(x), std::move(y));
}

}  // namespace pentatrope
