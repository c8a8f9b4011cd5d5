#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "kpbloch/compensated_sum.hpp"
#include "kpbloch/errors.hpp"
#include "kpbloch/potential.hpp"

namespace kpbloch {

/// Which boundary problem a sector belongs to. Ground is the lowest periodic
/// eigenvalue lambda_0 (n = 0); Periodic n >= 1 targets lambda_{n,j};
/// Antiperiodic n >= 1 targets mu_{n,j}.
enum class SectorKind { Ground, Periodic, Antiperiodic };

inline const char* to_string(SectorKind kind) {
    switch (kind) {
    case SectorKind::Ground: return "ground";
    case SectorKind::Periodic: return "periodic";
    case SectorKind::Antiperiodic: return "antiperiodic";
    }
    return "?";
}

struct SectorIndex {
    SectorKind kind = SectorKind::Ground;
    int n = 0;
    int j = 1;  ///< 1 = lower root of the pair, 2 = upper; unused for Ground

    static SectorIndex ground() { return {SectorKind::Ground, 0, 1}; }
    static SectorIndex periodic(int n, int j) { return {SectorKind::Periodic, n, j}; }
    static SectorIndex antiperiodic(int n, int j) { return {SectorKind::Antiperiodic, n, j}; }

    void validate() const {
        if (kind == SectorKind::Ground) {
            if (n != 0)
                throw InvalidArgument("ground sector requires n = 0");
            return;
        }
        if (n < 1)
            throw InvalidArgument("periodic/antiperiodic sectors require n >= 1");
        if (j != 1 && j != 2)
            throw InvalidArgument("j must be 1 or 2");
    }

    friend bool operator==(const SectorIndex&, const SectorIndex&) = default;
};

/// Series truncation: `depth` terms (r) of the a/b expansion, each summed over
/// the index window [-window, window] (s). `tolerance` and `max_iter` drive
/// the fixed-point iteration.
struct TruncationParams {
    int depth = 5;
    int window = 5;
    double tolerance = 1e-14;
    int max_iter = 100;

    void validate() const {
        if (depth < 1)
            throw InvalidArgument("r (series depth) must be >= 1");
        if (window < 1)
            throw InvalidArgument("s (index window) must be >= 1");
        if (!(tolerance > 0 && tolerance < 1))
            throw InvalidArgument("tol must be in (0,1)");
        if (max_iter < 1)
            throw InvalidArgument("max_iter must be >= 1");
    }
};

/// Index of the Fourier coefficient that couples the two unperturbed modes of
/// a sector: 2n (periodic), 2n-1 (antiperiodic), 0 (ground). The partial sums
/// of every admissible index tuple avoid {0, harmonic}.
inline long harmonic_index(SectorKind kind, int n) {
    switch (kind) {
    case SectorKind::Ground: return 0;
    case SectorKind::Periodic: return 2L * n;
    case SectorKind::Antiperiodic: return 2L * n - 1;
    }
    return 0;
}

/// Free energy of the mode reached after shifting by `partial_sum`:
/// (2 pi (n - P))^2 for periodic/ground, ((2(n - P) - 1) pi)^2 for antiperiodic.
template <typename Scalar>
Scalar free_level(SectorKind kind, int n, long partial_sum) {
    const Scalar pi = detail::pi_v<Scalar>;
    if (kind == SectorKind::Antiperiodic) {
        const Scalar m = Scalar(2 * (n - partial_sum) - 1) * pi;
        return m * m;
    }
    const Scalar m = 2 * pi * Scalar(n - partial_sum);
    return m * m;
}

/// Unperturbed eigenvalue of a sector: (2 pi n)^2, ((2n-1) pi)^2 or 0.
template <typename Scalar>
Scalar sector_center(SectorKind kind, int n) {
    return free_level<Scalar>(kind, n, 0);
}

/// Absolute threshold below which a series denominator counts as degenerate.
inline constexpr double degenerate_denominator = 1e-8;
/// Relative threshold for the imaginary parts of quantities that must be real.
inline constexpr double reality_tolerance = 1e-9;

/// Truncated series terms of one sector at energy lambda: diagonal[k-1] is
/// a_{s,k,n} (eta for antiperiodic) and coupling[k-1] is b_{s,k,n} (nu).
template <typename Scalar>
struct SeriesTerms {
    std::vector<std::complex<Scalar>> diagonal;
    std::vector<std::complex<Scalar>> coupling;
};

/// Evaluates every truncated term k = 1..depth at once.
///
/// Sums over (n_1..n_k) in [-s,s]^k with n_i != 0 and every partial sum
/// n_1+..+n_l outside {0, harmonic}. Instead of enumerating (2s)^k tuples the
/// sum is carried as a vector indexed by the current partial sum P:
///   W_1(P)     = q_P / (lambda - level(P))
///   W_{l+1}(P) = sum_{m != 0} W_l(P - m) q_m / (lambda - level(P))
/// so that a_l = sum_P W_l(P) q_{-P} and b_l = sum_P W_l(P) q_{harmonic - P}.
/// Reductions run in ascending index order with compensated accumulation.
template <typename Scalar>
SeriesTerms<Scalar> series_terms(const KronigPenney<Scalar>& p, int depth, int window,
                                 SectorKind kind, int n, Scalar lambda) {
    using C = std::complex<Scalar>;
    using Vec = Eigen::Matrix<C, Eigen::Dynamic, 1>;
    if (depth < 1 || window < 1)
        throw InvalidArgument("series depth and window must be >= 1");

    const long s = window;
    const long harmonic = harmonic_index(kind, n);
    const long span = depth * s;  // |P| never exceeds depth * s
    const long qreach = span + std::abs(harmonic);

    Vec qtab(2 * qreach + 1);
    for (long m = -qreach; m <= qreach; ++m)
        qtab(m + qreach) = q_coeff_or_zero(p, m);
    auto q = [&](long m) { return qtab(m + qreach); };

    auto excluded = [&](long P) { return P == 0 || P == harmonic; };
    auto denominator = [&](int level, long P) {
        const Scalar d = lambda - free_level<Scalar>(kind, n, P);
        if (std::abs(d) < Scalar(degenerate_denominator))
            throw DegenerateDenominator(level, P, static_cast<double>(d));
        return d;
    };

    // state(P + span) = W_l(P)
    Vec state = Vec::Zero(2 * span + 1);
    for (long P = -s; P <= s; ++P)
        if (!excluded(P))
            state(P + span) = q(P) / denominator(1, P);

    SeriesTerms<Scalar> out;
    out.diagonal.reserve(depth);
    out.coupling.reserve(depth);
    long reach = s;
    for (int level = 1;; ++level) {
        CompensatedSum<C> diag, coup;
        for (long P = -reach; P <= reach; ++P) {
            const C w = state(P + span);
            diag += w * q(-P);
            coup += w * q(harmonic - P);
        }
        out.diagonal.push_back(diag.value());
        out.coupling.push_back(coup.value());
        if (level == depth)
            break;

        const long next_reach = reach + s;
        Vec next = Vec::Zero(2 * span + 1);
        for (long P = -next_reach; P <= next_reach; ++P) {
            if (excluded(P))
                continue;
            CompensatedSum<C> acc;
            for (long m = -s; m <= s; ++m) {
                const long from = P - m;
                if (m == 0 || from < -reach || from > reach)
                    continue;
                acc += state(from + span) * q(m);
            }
            next(P + span) = acc.value() / denominator(level + 1, P);
        }
        state = std::move(next);
        reach = next_reach;
    }
    return out;
}

namespace detail {

template <typename Scalar>
void require_real(std::complex<Scalar> z, const std::string& what) {
    if (std::abs(z.imag()) > Scalar(reality_tolerance) * (Scalar(1) + std::abs(z.real())))
        throw RealityViolation(what + " has imaginary part " +
                               detail::show(static_cast<double>(z.imag())));
}

inline void require_term_index(const TruncationParams& t, int k) {
    t.validate();
    if (k < 1 || k > t.depth)
        throw InvalidArgument("term index k must lie in [1, r]");
}

}  // namespace detail

/// a_{s,k,n}(lambda) for the periodic problem (n = 0 gives the ground sector).
template <typename Scalar>
Scalar a_term(const KronigPenney<Scalar>& p, const TruncationParams& t, int n, int k, Scalar lambda) {
    detail::require_term_index(t, k);
    const auto kind = n == 0 ? SectorKind::Ground : SectorKind::Periodic;
    const auto z = series_terms(p, k, t.window, kind, n, lambda).diagonal.back();
    detail::require_real(z, "a_" + std::to_string(k));
    return z.real();
}

/// b_{s,k,n}(lambda); complex, real only after the e^{2 pi i n c} rotation.
template <typename Scalar>
std::complex<Scalar> b_term(const KronigPenney<Scalar>& p, const TruncationParams& t, int n, int k,
                            Scalar lambda) {
    detail::require_term_index(t, k);
    if (n < 1)
        throw InvalidArgument("b_term requires n >= 1");
    return series_terms(p, k, t.window, SectorKind::Periodic, n, lambda).coupling.back();
}

/// Antiperiodic analogue eta_{s,k,n}(mu) of a_term.
template <typename Scalar>
Scalar eta_term(const KronigPenney<Scalar>& p, const TruncationParams& t, int n, int k, Scalar mu) {
    detail::require_term_index(t, k);
    if (n < 1)
        throw InvalidArgument("eta_term requires n >= 1");
    const auto z = series_terms(p, k, t.window, SectorKind::Antiperiodic, n, mu).diagonal.back();
    detail::require_real(z, "eta_" + std::to_string(k));
    return z.real();
}

/// Antiperiodic analogue nu_{s,k,n}(mu) of b_term.
template <typename Scalar>
std::complex<Scalar> nu_term(const KronigPenney<Scalar>& p, const TruncationParams& t, int n, int k,
                             Scalar mu) {
    detail::require_term_index(t, k);
    if (n < 1)
        throw InvalidArgument("nu_term requires n >= 1");
    return series_terms(p, k, t.window, SectorKind::Antiperiodic, n, mu).coupling.back();
}

/// Phase e^{i pi h c} (h = harmonic index) that turns q_h + sum of coupling
/// terms into a real number.
template <typename Scalar>
std::complex<Scalar> coupling_rotation(const KronigPenney<Scalar>& p, SectorKind kind, int n) {
    return detail::turn(Scalar(harmonic_index(kind, n)) * p.c() / 2);
}

/// The two real pieces of the truncated map at lambda: the diagonal sum
/// sum_k a_k and the rotated coupling e^{i pi h c}(q_h + sum_k b_k).
template <typename Scalar>
struct MapParts {
    Scalar diagonal = 0;
    Scalar coupling = 0;
};

template <typename Scalar>
MapParts<Scalar> map_parts(const KronigPenney<Scalar>& p, const TruncationParams& t, SectorKind kind,
                           int n, Scalar lambda) {
    using C = std::complex<Scalar>;
    const auto terms = series_terms(p, t.depth, t.window, kind, n, lambda);
    CompensatedSum<C> diag, coup;
    for (const auto& z : terms.diagonal)
        diag += z;
    MapParts<Scalar> out;
    detail::require_real(diag.value(), "diagonal sum");
    out.diagonal = diag.value().real();
    if (kind == SectorKind::Ground)
        return out;

    const long h = harmonic_index(kind, n);
    coup += q_coeff(p, h);
    for (const auto& z : terms.coupling)
        coup += z;
    const C rotated = coupling_rotation(p, kind, n) * coup.value();
    detail::require_real(rotated, "rotated coupling sum");
    out.coupling = rotated.real();
    return out;
}

/// Truncated contraction map g. With branch = +1 it is sum a + R, with
/// branch = -1 it is sum a - R, where R is the rotated coupling. The fixed
/// points of lambda = center + g(lambda) approximate the sector's eigenvalues.
/// For the ground sector the branch is ignored and g = sum a.
template <typename Scalar>
Scalar g_map(const KronigPenney<Scalar>& p, const TruncationParams& t, SectorKind kind, int n,
             int branch, Scalar lambda) {
    const auto parts = map_parts(p, t, kind, n, lambda);
    if (kind == SectorKind::Ground)
        return parts.diagonal;
    return parts.diagonal + Scalar(branch) * parts.coupling;
}

/// Closed forms of the first-order pieces at lambda = (2 pi n)^2:
/// first = a_1((2 pi n)^2), second = e^{2 pi i n c}(q_{2n} + b_1((2 pi n)^2)).
template <typename Scalar>
std::pair<Scalar, Scalar> closed_first_order(const KronigPenney<Scalar>& p, int n) {
    if (n < 1)
        throw InvalidArgument("closed_first_order requires n >= 1");
    const Scalar pi = detail::pi_v<Scalar>;
    const Scalar a = p.a(), b = p.b(), c = p.c();
    const Scalar nn = Scalar(n);
    const Scalar pn = pi * nn;
    const Scalar a1 = -a * b / (16 * pn * pn) +
                      (b * b - a * a) * std::sin(4 * pn * c) / (64 * pn * pn * pn) +
                      3 * (b - a) * (b - a) * (std::cos(4 * pn * c) - 1) / (128 * pn * pn * pn * pn);
    const Scalar rotated = (a - b) * std::sin(2 * pn * c) / (2 * pn) +
                           a * b * std::cos(2 * pn * c) / (8 * pn * pn) +
                           (a * a - b * b) * std::sin(2 * pn * c) / (16 * pn * pn * pn);
    return {a1, rotated};
}

}  // namespace kpbloch
