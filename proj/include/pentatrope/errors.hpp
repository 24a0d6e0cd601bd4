#pragma once

/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by every pentatrope module.
 */

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pentatrope {

/// Precondition on a scalar argument failed (t <= 1, empty input, k out of range, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Vector arguments of incompatible length.
class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Result would leave the representable range of double.
class range_error : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Geometric precondition failed. `index` names the polygon index involved, or npos.
class geometry_error : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit geometry_error(const std::string& what, std::size_t index = npos)
        : std::runtime_error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Coincident points / identical lines / vanishing cross-ratio denominator.
class degeneracy_error : public geometry_error {
public:
    using geometry_error::geometry_error;
};

/// A denominator 1 - z_i w_i of the pentagram map vanished.
class singularity_error : public std::runtime_error {
public:
    singularity_error(const std::string& what, std::size_t index)
        : std::runtime_error(what), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A tropical invariant (or an inner max) is tied at the evaluation point.
class genericity_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No (or more than one) invariant convention survived the conservation oracle,
/// or a config file is malformed.
class configuration_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pentatrope
