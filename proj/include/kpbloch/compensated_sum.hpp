#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace kpbloch {

/// Neumaier-compensated accumulator. Works for real and std::complex scalars
/// (the complex case compensates the two parts independently).
template <typename T>
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(T init) : sum_(init) {}

    CompensatedSum& operator+=(T x) {
        add(x);
        return *this;
    }

    T value() const { return sum_ + carry_; }

private:
    void add(T x) {
        if constexpr (is_complex) {
            using R = typename T::value_type;
            R sr = sum_.real(), si = sum_.imag();
            R cr = carry_.real(), ci = carry_.imag();
            add_real(sr, cr, x.real());
            add_real(si, ci, x.imag());
            sum_ = T(sr, si);
            carry_ = T(cr, ci);
        } else {
            add_real(sum_, carry_, x);
        }
    }

    template <typename R>
    static void add_real(R& sum, R& carry, R x) {
        const R t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }

    template <typename U>
    struct complex_check : std::false_type {};
    template <typename U>
    struct complex_check<std::complex<U>> : std::true_type {};
    static constexpr bool is_complex = complex_check<T>::value;

    T sum_{};
    T carry_{};
};

}  // namespace kpbloch
