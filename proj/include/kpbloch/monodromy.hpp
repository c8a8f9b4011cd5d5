#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/LU>  // determinant()

#include "kpbloch/potential.hpp"

namespace kpbloch {

/// Transfer matrix mapping (y, y') at the start of an interval to (y, y') at
/// its end, for solutions of -y'' + q y = lambda y.
template <typename Scalar>
using Monodromy = Eigen::Matrix<Scalar, 2, 2>;

/// Below this |lambda - V| the propagator switches to its Taylor form, so
/// the discriminant stays smooth through the turning energy.
inline constexpr double turning_window = 1e-6;

/// Propagator across a constant piece of value V and length L:
///   [[cos kL, sin kL / k], [-k sin kL, cos kL]],  k^2 = lambda - V,
/// with cosh/sinh when lambda < V.
template <typename Scalar>
Monodromy<Scalar> propagator(Scalar V, Scalar L, Scalar lambda) {
    const Scalar z = lambda - V;
    Monodromy<Scalar> P;
    if (std::abs(z) < Scalar(turning_window)) {
        const Scalar L2 = L * L;
        P(0, 0) = 1 - z * L2 / 2 + z * z * L2 * L2 / 24;
        P(0, 1) = L - z * L2 * L / 6 + z * z * L2 * L2 * L / 120;
        P(1, 0) = -z * L + z * z * L2 * L / 6;
    } else if (z > 0) {
        const Scalar k = std::sqrt(z);
        P(0, 0) = std::cos(k * L);
        P(0, 1) = std::sin(k * L) / k;
        P(1, 0) = -k * std::sin(k * L);
    } else {
        const Scalar k = std::sqrt(-z);
        P(0, 0) = std::cosh(k * L);
        P(0, 1) = std::sinh(k * L) / k;
        P(1, 0) = k * std::sinh(k * L);
    }
    P(1, 1) = P(0, 0);
    return P;
}

/// One period [0,1]: the a-piece on [0,c] followed by the b-piece.
template <typename Scalar>
Monodromy<Scalar> monodromy(const KronigPenney<Scalar>& p, Scalar lambda) {
    return propagator(p.b(), 1 - p.c(), lambda) * propagator(p.a(), p.c(), lambda);
}

/// Hill discriminant: trace of the monodromy. |D| <= 2 on the spectrum;
/// D = 2 at periodic and D = -2 at antiperiodic eigenvalues.
template <typename Scalar>
Scalar discriminant(const KronigPenney<Scalar>& p, Scalar lambda) {
    return monodromy(p, lambda).trace();
}

/// Propagator from the middle of the a-piece to the middle of the b-piece.
///
/// Started at x = c/2 the period is A B B A with A, B the half-piece
/// propagators, which is symmetric. For H = B A this gives
///   D - 2 = 4 h12 h21,   D + 2 = 4 h11 h22,
/// so periodic eigenvalues are the zeros of h12 and h21 and antiperiodic ones
/// the zeros of h11 and h22, all simple even where two eigenvalues nearly
/// coincide.
template <typename Scalar>
Monodromy<Scalar> half_cell(const KronigPenney<Scalar>& p, Scalar lambda) {
    return propagator(p.b(), (1 - p.c()) / 2, lambda) * propagator(p.a(), p.c() / 2, lambda);
}

}  // namespace kpbloch
