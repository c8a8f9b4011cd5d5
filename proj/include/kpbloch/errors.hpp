#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace kpbloch {

namespace detail {

/// Compact number for error messages.
inline std::string show(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace detail

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid potential, truncation or run parameters.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A series denominator came within the degeneracy threshold of zero.
class DegenerateDenominator : public Error {
public:
    DegenerateDenominator(int depth, long partial_sum, double denominator)
        : Error("degenerate denominator " + detail::show(static_cast<double>(denominator)) +
                " at depth " + std::to_string(depth) +
                " (index tuple with n_1+...+n_" + std::to_string(depth) +
                " = " + std::to_string(partial_sum) + ")"),
          depth_(depth), partial_sum_(partial_sum) {}

    int depth() const noexcept { return depth_; }
    long partial_sum() const noexcept { return partial_sum_; }

private:
    int depth_;
    long partial_sum_;
};

/// A quantity that must be real carried an imaginary part above threshold.
class RealityViolation : public Error {
public:
    using Error::Error;
};

/// The contraction hypothesis failed (C >= 1) or the sector is Violated.
class HypothesisFailure : public Error {
public:
    using Error::Error;
};

/// A fixed-point iterate left the localization interval.
class LocalizationEscape : public Error {
public:
    using Error::Error;
};

/// The root scan hit its ceiling before finding the requested roots.
class BracketExhaustion : public Error {
public:
    BracketExhaustion(const std::string& what, int found)
        : Error(what), found_(found) {}
    int found() const noexcept { return found_; }

private:
    int found_;
};

}  // namespace kpbloch
