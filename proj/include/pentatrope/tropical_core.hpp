#pragma once

/**
 * @file tropical_core.hpp
 * @brief The R_t semiring, relative (max,+) functions and the P_N(c) bound numbers.
 *
 * A relative (max,+) function is stored as two lists of affine forms
 *
 *     phi(x) = max_k (alpha_k + a_k . x) - max_k (beta_k + b_k . x)
 *
 * and can be evaluated three ways:
 *   - eval_maxplus     the piecewise linear function itself (exact for integer/rational scalars),
 *   - eval_Rt          the same expression with max replaced by x (+)_t y = log_t(t^x + t^y),
 *   - eval_elementary  the positive rational function sum t^alpha z^a / sum t^beta z^b.
 *
 * eval_elementary(p, t, t^x) = t^eval_Rt(p, t, x) identically, and
 * |eval_Rt - eval_maxplus| <= log_t(component_count()).
 */

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pentatrope/errors.hpp"

namespace pentatrope {

/// Base of the semiring R_t; always strictly greater than one.
class SemiringParam {
public:
    explicit SemiringParam(double t) : t_(t) {
        if (!(t > 1.0) || !std::isfinite(t)) {
            throw domain_error("semiring parameter t must be finite and > 1, got " + std::to_string(t));
        }
        log_t_ = std::log(t);
    }

    double value() const noexcept { return t_; }
    /// Natural logarithm of t.
    double log_base() const noexcept { return log_t_; }

private:
    double t_;
    double log_t_;
};

/// x_1 (+)_t ... (+)_t x_m = log_t(sum t^{x_i}), evaluated as max + log_t(sum t^{x_i - max}).
inline double oplus(const SemiringParam& t, std::span<const double> values) {
    if (values.empty()) {
        throw domain_error("oplus of an empty sequence");
    }
    const double top = *std::max_element(values.begin(), values.end());
    if (std::isinf(top)) {
        return top;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += std::exp((v - top) * t.log_base());
    }
    return top + std::log(sum) / t.log_base();
}

inline double oplus(const SemiringParam& t, std::initializer_list<double> values) {
    return oplus(t, std::span<const double>(values.begin(), values.size()));
}

/// Componentwise log_t.
inline std::vector<double> log_t(const SemiringParam& t, std::span<const double> z) {
    std::vector<double> out(z.size());
    std::transform(z.begin(), z.end(), out.begin(), [&](double v) {
        if (!(v > 0.0)) {
            throw domain_error("log_t of a nonpositive value");
        }
        return std::log(v) / t.log_base();
    });
    return out;
}

/// Componentwise t^x.
inline std::vector<double> exp_t(const SemiringParam& t, std::span<const double> x) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return std::exp(v * t.log_base()); });
    return out;
}

/// One affine form offset + exponents . x of a (max,+) presentation.
struct AffineTerm {
    double offset = 0.0;
    std::vector<int> exponents;

    friend bool operator==(const AffineTerm&, const AffineTerm&) = default;
};

class MaxPlusPresentation {
public:
    MaxPlusPresentation(std::vector<AffineTerm> plus, std::vector<AffineTerm> minus)
        : plus_(std::move(plus)), minus_(std::move(minus)) {
        if (plus_.empty() || minus_.empty()) {
            throw domain_error("a relative (max,+) presentation needs nonempty plus and minus terms");
        }
        arity_ = plus_.front().exponents.size();
        for (const auto* list : {&plus_, &minus_}) {
            for (const auto& term : *list) {
                if (term.exponents.size() != arity_) {
                    throw dimension_error("all exponent vectors of a presentation must have the same length");
                }
                if (!std::isfinite(term.offset)) {
                    throw domain_error("presentation offsets must be finite");
                }
            }
        }
    }

    /// max(plus) - 0, i.e. minus_terms = [(0, 0...0)].
    static MaxPlusPresentation pure_max(std::vector<AffineTerm> plus) {
        const std::size_t d = plus.empty() ? 0 : plus.front().exponents.size();
        return MaxPlusPresentation(std::move(plus), {AffineTerm{0.0, std::vector<int>(d, 0)}});
    }

    std::size_t arity() const noexcept { return arity_; }
    const std::vector<AffineTerm>& plus_terms() const noexcept { return plus_; }
    const std::vector<AffineTerm>& minus_terms() const noexcept { return minus_; }

    /// M = |plus| * |minus|.
    std::size_t component_count() const noexcept { return plus_.size() * minus_.size(); }

    /// Sup-metric Lipschitz bound max ||a_k||_1 + max ||b_k||_1 (an upper bound, not necessarily tight).
    double lipschitz_constant() const noexcept { return max_l1(plus_) + max_l1(minus_); }

    friend bool operator==(const MaxPlusPresentation&, const MaxPlusPresentation&) = default;

private:
    static double max_l1(const std::vector<AffineTerm>& terms) {
        double best = 0.0;
        for (const auto& term : terms) {
            double l1 = 0.0;
            for (int e : term.exponents) {
                l1 += std::abs(e);
            }
            best = std::max(best, l1);
        }
        return best;
    }

    std::vector<AffineTerm> plus_;
    std::vector<AffineTerm> minus_;
    std::size_t arity_ = 0;
};

namespace detail {

template <class Scalar>
Scalar offset_as(double offset) {
    if constexpr (std::is_floating_point_v<Scalar>) {
        return static_cast<Scalar>(offset);
    } else {
        constexpr double limit = 9007199254740992.0;  // 2^53
        if (offset != std::trunc(offset) || std::abs(offset) > limit) {
            throw domain_error("exact evaluation requires integer offsets");
        }
        return Scalar(static_cast<std::int64_t>(offset));
    }
}

template <class Scalar>
Scalar affine_value(const AffineTerm& term, std::span<const Scalar> x) {
    Scalar acc = offset_as<Scalar>(term.offset);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (term.exponents[i] != 0) {
            acc += Scalar(term.exponents[i]) * x[i];
        }
    }
    return acc;
}

template <class Scalar>
Scalar max_of(const std::vector<AffineTerm>& terms, std::span<const Scalar> x) {
    Scalar best = affine_value(terms.front(), x);
    for (std::size_t k = 1; k < terms.size(); ++k) {
        Scalar v = affine_value(terms[k], x);
        if (best < v) {
            best = v;
        }
    }
    return best;
}

inline void check_arity(const MaxPlusPresentation& p, std::size_t d) {
    if (d != p.arity()) {
        throw dimension_error("input has dimension " + std::to_string(d) + ", presentation expects " +
                              std::to_string(p.arity()));
    }
}

}  // namespace detail

/// The piecewise linear value. Exact whenever Scalar is an exact type (integers, rationals).
template <class Scalar>
Scalar eval_maxplus(const MaxPlusPresentation& p, std::span<const Scalar> x) {
    detail::check_arity(p, x.size());
    return detail::max_of(p.plus_terms(), x) - detail::max_of(p.minus_terms(), x);
}

template <class Scalar>
Scalar eval_maxplus(const MaxPlusPresentation& p, const std::vector<Scalar>& x) {
    return eval_maxplus<Scalar>(p, std::span<const Scalar>(x));
}

/// The relative R_t-polynomial: oplus_t over plus terms minus oplus_t over minus terms.
inline double eval_Rt(const MaxPlusPresentation& p, const SemiringParam& t, std::span<const double> x) {
    detail::check_arity(p, x.size());
    auto side = [&](const std::vector<AffineTerm>& terms) {
        std::vector<double> values;
        values.reserve(terms.size());
        for (const auto& term : terms) {
            values.push_back(detail::affine_value<double>(term, x));
        }
        return oplus(t, values);
    };
    return side(p.plus_terms()) - side(p.minus_terms());
}

/// The relative elementary function sum t^alpha z^a / sum t^beta z^b on the positive orthant.
inline double eval_elementary(const MaxPlusPresentation& p, const SemiringParam& t, std::span<const double> z) {
    detail::check_arity(p, z.size());
    for (double v : z) {
        if (!(v > 0.0)) {
            throw domain_error("relative elementary functions are defined on the positive orthant only");
        }
    }
    auto side = [&](const std::vector<AffineTerm>& terms) {
        double sum = 0.0;
        for (const auto& term : terms) {
            double monomial = std::pow(t.value(), term.offset);
            for (std::size_t i = 0; i < z.size(); ++i) {
                if (term.exponents[i] != 0) {
                    monomial *= std::pow(z[i], term.exponents[i]);
                }
            }
            sum += monomial;
        }
        return sum;
    };
    return side(p.plus_terms()) / side(p.minus_terms());
}

/// P_N(c) = (c^N - 1)/(c - 1) for c > 1 and N for c = 1; satisfies c P_N + 1 = P_{N+1}.
inline double p_number(unsigned N, double c) {
    if (!(c >= 1.0)) {
        throw domain_error("p_number requires c >= 1");
    }
    if (c == 1.0) {
        return static_cast<double>(N);
    }
    return (std::pow(c, static_cast<double>(N)) - 1.0) / (c - 1.0);
}

/// log P_N(c) without forming c^N; -inf for N = 0.
inline double log_p_number(unsigned N, double c) {
    if (!(c >= 1.0)) {
        throw domain_error("p_number requires c >= 1");
    }
    if (N == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (c == 1.0) {
        return std::log(static_cast<double>(N));
    }
    const double n_log_c = static_cast<double>(N) * std::log(c);
    // log(c^N - 1) = N log c + log(1 - c^-N)
    return n_log_c + std::log1p(-std::exp(-n_log_c)) - std::log(c - 1.0);
}

// JSON: {"plus": [["alpha", [a...]], ...], "minus": [["beta", [b...]], ...]}.
// Offsets are written as decimal strings; integral offsets are written without exponent or fraction.

namespace detail {

inline std::string format_offset(double v) {
    if (v == std::trunc(v) && std::abs(v) < 9007199254740992.0) {
        return std::to_string(static_cast<std::int64_t>(v));
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_offset(const nlohmann::json& j) {
    if (j.is_number()) {
        return j.get<double>();
    }
    if (!j.is_string()) {
        throw configuration_error("presentation offset must be a decimal string or a number");
    }
    const auto s = j.get<std::string>();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw configuration_error("malformed presentation offset '" + s + "'");
    }
    return v;
}

inline nlohmann::json terms_to_json(const std::vector<AffineTerm>& terms) {
    auto arr = nlohmann::json::array();
    for (const auto& term : terms) {
        arr.push_back(nlohmann::json::array({format_offset(term.offset), term.exponents}));
    }
    return arr;
}

inline std::vector<AffineTerm> terms_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) {
        throw configuration_error("presentation terms must be an array");
    }
    std::vector<AffineTerm> out;
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2) {
            throw configuration_error("presentation term must be [offset, [exponents...]]");
        }
        out.push_back(AffineTerm{parse_offset(item[0]), item[1].get<std::vector<int>>()});
    }
    return out;
}

}  // namespace detail

inline nlohmann::json to_json(const MaxPlusPresentation& p) {
    return {{"plus", detail::terms_to_json(p.plus_terms())}, {"minus", detail::terms_to_json(p.minus_terms())}};
}

inline MaxPlusPresentation presentation_from_json(const nlohmann::json& j) {
    if (!j.contains("plus") || !j.contains("minus")) {
        throw configuration_error("presentation JSON needs \"plus\" and \"minus\"");
    }
    return MaxPlusPresentation(detail::terms_from_json(j.at("plus")), detail::terms_from_json(j.at("minus")));
}

}  // namespace pentatrope
