// SPDX-License-Identifier: Apache-2.0
#ifndef CEDONUT_ERROR_HPP
#define CEDONUT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cedonut {

/// Bad input: parameters, malformed files, targets outside the feasible set.
class InvalidArgument : public std::invalid_argument {
public:
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested symbol is not a noise-free received value reachable with CE phases.
class TargetOutsideDoughnut : public InvalidArgument {
public:
    explicit TargetOutsideDoughnut(const std::string& what) : InvalidArgument(what) {}
};

/// A numeric routine failed to reach its accuracy target (nonconvergence, unreachable rate).
class NumericFailure : public std::runtime_error {
public:
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) throw InvalidArgument(message);
}

} // namespace cedonut

#endif // CEDONUT_ERROR_HPP
