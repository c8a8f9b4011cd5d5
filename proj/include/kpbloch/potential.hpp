#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "kpbloch/errors.hpp"

namespace kpbloch {

/// One-period Kronig-Penney step potential on [0,1):
///   q(x) = a on [0,c],  q(x) = b on (c,1),
/// with a < 0 < b and zero mean, a*c + (1-c)*b = 0.
template <typename Scalar>
class KronigPenney {
public:
    using scalar_type = Scalar;

    /// Builds the potential from the well depth and the step location; the
    /// barrier height is derived so that the mean vanishes exactly.
    static KronigPenney from_depth(Scalar a, Scalar c) {
        check_shape(a, c);
        return KronigPenney(a, -a * c / (Scalar(1) - c), c);
    }

    /// Builds the potential from all three parameters and rejects any triple
    /// whose mean exceeds 1e-12 * max(|a|, b).
    static KronigPenney from_values(Scalar a, Scalar b, Scalar c) {
        check_shape(a, c);
        if (!(b > 0))
            throw InvalidArgument("b must be positive");
        const Scalar mean = a * c + (Scalar(1) - c) * b;
        if (std::abs(mean) > Scalar(1e-12) * std::max(std::abs(a), b))
            throw InvalidArgument("potential must have zero mean: a*c + (1-c)*b = " +
                                  detail::show(static_cast<double>(mean)));
        return KronigPenney(a, b, c);
    }

    Scalar a() const noexcept { return a_; }
    Scalar b() const noexcept { return b_; }
    Scalar c() const noexcept { return c_; }
    /// max(|a|, b): half-width of every localization interval.
    Scalar M() const noexcept { return std::max(std::abs(a_), b_); }

    /// q(x) for x in [0,1); the left piece is closed at x = c.
    Scalar operator()(Scalar x) const noexcept { return x <= c_ ? a_ : b_; }

    /// Same potential with a and b multiplied by `factor`. Used for the
    /// q = 0 limit in tests, so the sign and mean checks are skipped.
    KronigPenney scaled(Scalar factor) const noexcept {
        return KronigPenney(a_ * factor, b_ * factor, c_);
    }

private:
    KronigPenney(Scalar a, Scalar b, Scalar c) : a_(a), b_(b), c_(c) {}

    static void check_shape(Scalar a, Scalar c) {
        if (!(a < 0))
            throw InvalidArgument("a must be negative");
        if (!(c > 0 && c < 1))
            throw InvalidArgument("c must be in (0,1)");
    }

    Scalar a_, b_, c_;
};

namespace detail {

template <typename Scalar>
constexpr Scalar pi_v = std::numbers::pi_v<Scalar>;

template <typename Scalar>
std::complex<Scalar> expi(Scalar phase) {
    return {std::cos(phase), std::sin(phase)};
}

/// e^{2 pi i t}. The argument is reduced mod 1 first, so integer and
/// half-integer t (rational c times k) give exact 1 and -1.
template <typename Scalar>
std::complex<Scalar> turn(Scalar t) {
    Scalar f = t - std::round(t);  // in [-1/2, 1/2]
    if (f == Scalar(0.5) || f == Scalar(-0.5))
        return {Scalar(-1), Scalar(0)};
    if (f == Scalar(0.25))
        return {Scalar(0), Scalar(1)};
    if (f == Scalar(-0.25))
        return {Scalar(0), Scalar(-1)};
    return expi(2 * pi_v<Scalar> * f);
}

inline void require_nonzero(long k, const char* what) {
    if (k == 0)
        throw InvalidArgument(std::string(what) + " is undefined at k = 0");
}

}  // namespace detail

/// q_0 vanishes because the potential has zero mean.
template <typename Scalar>
inline constexpr std::complex<Scalar> q_coeff_zero{};

/// Fourier coefficient q_k = int_0^1 q(x) e^{-2 pi i k x} dx, k != 0.
template <typename Scalar>
std::complex<Scalar> q_coeff(const KronigPenney<Scalar>& p, long k) {
    detail::require_nonzero(k, "q_coeff");
    using C = std::complex<Scalar>;
    const Scalar w = 2 * detail::pi_v<Scalar> * Scalar(k);
    return (p.a() - p.b()) / C(0, w) * (Scalar(1) - detail::turn(-Scalar(k) * p.c()));
}

/// q_k with the q_0 = 0 convention folded in; for internal sums.
template <typename Scalar>
std::complex<Scalar> q_coeff_or_zero(const KronigPenney<Scalar>& p, long k) {
    return k == 0 ? q_coeff_zero<Scalar> : q_coeff(p, k);
}

/// Mean of the primitive Q(x) = int_0^x q: Q_0 = b(c-1)/2.
template <typename Scalar>
Scalar primitive_mean(const KronigPenney<Scalar>& p) {
    return p.b() * (p.c() - Scalar(1)) / Scalar(2);
}

/// Fourier coefficient Q_k of the primitive Q(x); k = 0 gives Q_0.
template <typename Scalar>
std::complex<Scalar> primitive_coeff(const KronigPenney<Scalar>& p, long k) {
    if (k == 0)
        return primitive_mean(p);
    const Scalar w = 2 * detail::pi_v<Scalar> * Scalar(k);
    return (p.a() - p.b()) / (w * w) * (detail::turn(-Scalar(k) * p.c()) - Scalar(1));
}

/// Mean of S(x) = Q(x)^2: S_0 = a^2 c^2 / 3.
template <typename Scalar>
Scalar primitive_sq_mean(const KronigPenney<Scalar>& p) {
    return p.a() * p.a() * p.c() * p.c() / Scalar(3);
}

/// Fourier coefficient S_k of S(x) = Q(x)^2, k != 0.
template <typename Scalar>
std::complex<Scalar> primitive_sq_coeff(const KronigPenney<Scalar>& p, long k) {
    detail::require_nonzero(k, "primitive_sq_coeff");
    using C = std::complex<Scalar>;
    const Scalar pi = detail::pi_v<Scalar>;
    const Scalar w = 2 * pi * Scalar(k);
    const C e = detail::turn(-Scalar(k) * p.c());
    const C pik(0, pi * Scalar(k));  // pi k i
    const C wi(0, w);                // 2 pi i k
    const Scalar a2 = p.a() * p.a(), b2 = p.b() * p.b(), c = p.c();
    return a2 / pik * ((e - Scalar(1)) / (w * w) - c * e / wi) +
           b2 / pik * ((Scalar(1) - e) / (w * w) + (c * e - Scalar(1)) / wi) -
           b2 / pik * ((e - Scalar(1)) / wi);
}

/// Twisted primitive Q(x,k) = int_0^x q(t) e^{2 pi i k t} dt - q_{-k} x on
/// [0,1], k != 0. Vanishes at both ends.
template <typename Scalar>
std::complex<Scalar> twisted_primitive(const KronigPenney<Scalar>& p, Scalar x, long k) {
    detail::require_nonzero(k, "twisted_primitive");
    using C = std::complex<Scalar>;
    const Scalar w = 2 * detail::pi_v<Scalar> * Scalar(k);
    const C qm = q_coeff(p, -k);
    const C rise = (detail::expi(w * x) - Scalar(1)) / C(0, w);
    if (x <= p.c())
        return p.a() * rise - qm * x;
    return p.b() * rise - qm * x + qm;
}

/// Q_{k,0} = int_0^1 Q(x,k) dx in closed form, k != 0.
template <typename Scalar>
std::complex<Scalar> twisted_primitive_mean(const KronigPenney<Scalar>& p, long k) {
    detail::require_nonzero(k, "twisted_primitive_mean");
    using C = std::complex<Scalar>;
    const Scalar pi = detail::pi_v<Scalar>;
    const Scalar kk = Scalar(k);
    const C rot = detail::turn(kk * p.c()) - Scalar(1);
    return (p.b() - p.a()) * rot / (4 * pi * pi * kk * kk) +
           (p.a() + p.b()) * rot / C(0, 4 * pi * kk);
}

/// D(k) = i/(2 pi k) int_0^1 q(x) (Q(x,k) - Q_{k,0}) e^{-2 pi i k x} dx,
/// evaluated piecewise in closed form. D is real; an imaginary part above
/// 1e-8 (1 + |Re|) signals a broken evaluation.
template <typename Scalar>
Scalar diagonal_correction(const KronigPenney<Scalar>& p, long k) {
    detail::require_nonzero(k, "diagonal_correction");
    using C = std::complex<Scalar>;
    const Scalar w = 2 * detail::pi_v<Scalar> * Scalar(k);
    const C t(0, w);  // i 2 pi k
    const C e = detail::turn(-Scalar(k) * p.c());
    const C qm = q_coeff(p, -k);
    const Scalar a = p.a(), b = p.b(), c = p.c();

    const C left = a * a / t * (c + (e - Scalar(1)) / t) +
                   a * qm / t * (c * e + (e - Scalar(1)) / t);
    const C right = b * b / t * (Scalar(1) - c - (e - Scalar(1)) / t) +
                    b * qm / t * (Scalar(1) - c * e - (e - Scalar(1)) / t) +
                    b * qm / t * (e - Scalar(1));
    const C i_over = C(0, 1) / w;
    const C d = i_over * (left + right) - i_over * twisted_primitive_mean(p, k) * q_coeff(p, k);

    if (std::abs(d.imag()) > Scalar(1e-8) * (Scalar(1) + std::abs(d.real())))
        throw RealityViolation("D(" + std::to_string(k) + ") has imaginary part " +
                               detail::show(static_cast<double>(d.imag())));
    return d.real();
}

}  // namespace kpbloch
