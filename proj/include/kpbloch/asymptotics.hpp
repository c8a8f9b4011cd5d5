#pragma once

#include <cmath>
#include <complex>

#include "kpbloch/errors.hpp"
#include "kpbloch/potential.hpp"
#include "kpbloch/series.hpp"

namespace kpbloch {

/// Leading-order predictions for the length of gap k.
template <typename Scalar>
struct GapPrediction {
    int k = 0;
    Scalar first_order = 0;   ///< 2|q_k|, error o(1/k)
    Scalar second_order = 0;  ///< 2|q_k - S_k + 2 Q_0 Q_k|, error o(1/k^2)
    Scalar theta = 0;         ///< phase in [0, 2pi) used by condition_c
};

namespace detail {

template <typename Scalar>
std::complex<Scalar> second_order_coupling(const KronigPenney<Scalar>& p, long k) {
    return q_coeff(p, k) - primitive_sq_coeff(p, k) + 2 * primitive_mean(p) * primitive_coeff(p, k);
}

/// theta with cos/sin proportional to alpha = (a-b)/(pi k), beta = ab/(2 pi^2 k^2).
template <typename Scalar>
Scalar gap_phase(const KronigPenney<Scalar>& p, int k) {
    const Scalar pi = pi_v<Scalar>;
    const Scalar kk = Scalar(k);
    const Scalar alpha = (p.a() - p.b()) / (pi * kk);
    const Scalar beta = p.a() * p.b() / (2 * pi * pi * kk * kk);
    Scalar theta = std::atan2(beta, alpha);
    if (theta < 0)
        theta += 2 * pi;
    return theta;
}

}  // namespace detail

template <typename Scalar>
GapPrediction<Scalar> gap_prediction(const KronigPenney<Scalar>& p, int k) {
    if (k < 1)
        throw InvalidArgument("gap index k must be >= 1");
    GapPrediction<Scalar> g;
    g.k = k;
    g.first_order = 2 * std::abs(q_coeff(p, k));
    g.second_order = 2 * std::abs(detail::second_order_coupling(p, k));
    g.theta = detail::gap_phase(p, k);
    return g;
}

/// Large-n approximation of lambda_{n,j} (Periodic) or mu_{n,j} (Antiperiodic):
///   center - ab / (4 pi^2 h^2) + (-1)^j |q_h - S_h + 2 Q_0 Q_h|,  h = 2n or 2n-1.
/// With `exact_diagonal` the middle term is replaced by D(h).
template <typename Scalar>
Scalar eigen_asym(const KronigPenney<Scalar>& p, SectorIndex sector, bool exact_diagonal = false) {
    sector.validate();
    if (sector.kind == SectorKind::Ground)
        throw InvalidArgument("eigen_asym needs a periodic or antiperiodic sector");
    const Scalar pi = detail::pi_v<Scalar>;
    const long h = harmonic_index(sector.kind, sector.n);
    const Scalar hh = Scalar(h);
    const Scalar shift = exact_diagonal ? diagonal_correction(p, h) : -p.a() * p.b() / (4 * pi * pi * hh * hh);
    const Scalar half_gap = std::abs(detail::second_order_coupling(p, h));
    const Scalar sign = sector.j == 1 ? Scalar(-1) : Scalar(1);
    return sector_center<Scalar>(sector.kind, sector.n) + shift + sign * half_gap;
}

/// |sin(pi k c + theta_k)|, the quantity bounded below in condition_c.
template <typename Scalar>
Scalar phase_margin(const KronigPenney<Scalar>& p, int k) {
    if (k < 1)
        throw InvalidArgument("gap index k must be >= 1");
    return std::abs(std::sin(detail::pi_v<Scalar> * Scalar(k) * p.c() + detail::gap_phase(p, k)));
}

/// |sin(pi k c + theta_k)| > eps / k.
template <typename Scalar>
bool condition_c(const KronigPenney<Scalar>& p, int k, Scalar eps) {
    if (!(eps > 0))
        throw InvalidArgument("eps must be positive");
    return phase_margin(p, k) > eps / Scalar(k);
}

}  // namespace kpbloch
