#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "kpbloch/errors.hpp"
#include "kpbloch/potential.hpp"
#include "kpbloch/series.hpp"

namespace kpbloch {

enum class Applicability { Strict, Relaxed, Violated };

inline const char* to_string(Applicability a) {
    switch (a) {
    case Applicability::Strict: return "strict";
    case Applicability::Relaxed: return "relaxed";
    case Applicability::Violated: return "violated";
    }
    return "?";
}

/// Whether the contraction estimates cover a sector.
///
/// Strict bounds on M = max(|a|, b):
///   ground M <= 4pi^2/3, periodic M <= 4pi^2(2n-1)/3,
///   antiperiodic M <= 8pi^2/3 (n = 1), M <= 8pi^2(n-1)/3 (n >= 2).
/// Relaxed (empirical) bounds, honoured only when `relaxed` is set:
///   ground M < 2pi^2, periodic M < 2pi^2(2n-1),
///   antiperiodic M < 4pi^2 (n = 1), M < 4pi^2(n-1) (n >= 2).
template <typename Scalar>
Applicability check_applicability(const KronigPenney<Scalar>& p, SectorKind kind, int n, bool relaxed) {
    const Scalar pi2 = detail::pi_v<Scalar> * detail::pi_v<Scalar>;
    Scalar strict = 0, loose = 0;
    switch (kind) {
    case SectorKind::Ground:
        strict = 4 * pi2 / 3;
        loose = 2 * pi2;
        break;
    case SectorKind::Periodic:
        strict = 4 * pi2 * Scalar(2 * n - 1) / 3;
        loose = 2 * pi2 * Scalar(2 * n - 1);
        break;
    case SectorKind::Antiperiodic:
        strict = n == 1 ? 8 * pi2 / 3 : 8 * pi2 * Scalar(n - 1) / 3;
        loose = n == 1 ? 4 * pi2 : 4 * pi2 * Scalar(n - 1);
        break;
    }
    const Scalar M = p.M();
    if (M <= strict)
        return Applicability::Strict;
    if (relaxed && M < loose)
        return Applicability::Relaxed;
    return Applicability::Violated;
}

/// [center - M, center + M]; contains the sector's eigenvalue pair.
template <typename Scalar>
struct LocalizationInterval {
    Scalar center = 0;
    Scalar half_width = 0;

    Scalar lower() const { return center - half_width; }
    Scalar upper() const { return center + half_width; }
    bool contains(Scalar x) const { return x >= lower() && x <= upper(); }
};

template <typename Scalar>
LocalizationInterval<Scalar> localization(const KronigPenney<Scalar>& p, SectorKind kind, int n) {
    return {sector_center<Scalar>(kind, n), p.M()};
}

namespace detail {

/// Distance from a sector's free level to the nearest other free level:
/// 4pi^2(2n-1) periodic, 8pi^2 antiperiodic n = 1, 4pi^2(2n-2) antiperiodic n >= 2.
template <typename Scalar>
Scalar level_separation(SectorKind kind, int n) {
    const Scalar pi2 = pi_v<Scalar> * pi_v<Scalar>;
    if (kind == SectorKind::Periodic)
        return 4 * pi2 * Scalar(2 * n - 1);
    return n == 1 ? 8 * pi2 : 4 * pi2 * Scalar(2 * n - 2);
}

/// min |P| |h - P| over |P| >= s + 1, P not in {0, h}: the smallest
/// denominator factor among the dropped first indices.
inline double tail_gap(long harmonic, long window) {
    const long s1 = window + 1;
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](long P) {
        if (P == 0 || P == harmonic)
            return;
        best = std::min(best, double(std::abs(P)) * double(std::abs(harmonic - P)));
    };
    consider(-s1);
    consider(s1);
    // |P||h - P| dips near P = h when h lies beyond the window.
    for (long P = harmonic - 1; P <= harmonic + 1; ++P)
        if (std::abs(P) >= s1)
            consider(P);
    return best;
}

template <typename Scalar>
Scalar positive_or_inf(Scalar denominator, Scalar numerator) {
    if (!(denominator > 0))
        return std::numeric_limits<Scalar>::infinity();
    return numerator / denominator;
}

}  // namespace detail

/// Lipschitz constant of g on the localization interval.
///   n >= 1:  4(b-a)^2 / (pi D [pi D - (b-a)]),  D = separation - M
///   ground:  3(b-a)^2 / (4pi (2pi^2 - M) [pi (4pi^2 - M) - (b-a)])
/// Throws HypothesisFailure when the constant is not in [0, 1).
template <typename Scalar>
Scalar lipschitz_constant(const KronigPenney<Scalar>& p, SectorKind kind, int n) {
    const Scalar pi = detail::pi_v<Scalar>;
    const Scalar w = p.b() - p.a();
    const Scalar M = p.M();
    Scalar denom;
    Scalar numer;
    if (kind == SectorKind::Ground) {
        numer = 3 * w * w;
        denom = 4 * pi * (2 * pi * pi - M) * (pi * (4 * pi * pi - M) - w);
    } else {
        const Scalar D = detail::level_separation<Scalar>(kind, n) - M;
        numer = 4 * w * w;
        denom = pi * D * (pi * D - w);
    }
    const Scalar C = numer / denom;
    if (!(denom > 0) || !(C < 1))
        throw HypothesisFailure("contraction constant " + detail::show(static_cast<double>(C)) +
                                " is not below 1 for " + to_string(kind) + " n = " + std::to_string(n));
    return C;
}

/// A-priori distance between the true eigenvalue and the fixed point of the
/// truncated map: a depth (r) tail plus a window (s) tail, each divided by
/// 1 - C. Returns +inf when a denominator of the estimate is not positive.
template <typename Scalar>
Scalar truncation_bound(const KronigPenney<Scalar>& p, const TruncationParams& t, SectorKind kind, int n) {
    t.validate();
    const Scalar pi = detail::pi_v<Scalar>;
    const Scalar pi2 = pi * pi;
    const Scalar w = p.b() - p.a();
    const Scalar M = p.M();
    const Scalar C = lipschitz_constant(p, kind, n);
    const int r = t.depth;
    const Scalar s1 = Scalar(t.window + 1);

    if (kind == SectorKind::Ground) {
        const Scalar depth_tail = detail::positive_or_inf<Scalar>(
            16 * std::pow(pi, Scalar(r + 1)) * std::pow(4 * pi2 - M, Scalar(r - 1)) * (2 * pi2 - M) *
                (pi * (4 * pi2 - M) - w) * (1 - C),
            9 * std::pow(w, Scalar(r + 2)));
        const Scalar window_tail = detail::positive_or_inf<Scalar>(
            pi2 * s1 * s1 * (4 * pi2 * s1 * s1 - M) * (1 - C), 3 * w * w);
        return depth_tail + window_tail;
    }

    const Scalar D = detail::level_separation<Scalar>(kind, n) - M;
    const Scalar depth_tail = detail::positive_or_inf<Scalar>(
        2 * std::pow(pi, Scalar(r + 1)) * std::pow(D, Scalar(r)) * (pi * D - w) * (1 - C),
        3 * std::pow(w, Scalar(r + 2)));
    const Scalar gap = Scalar(detail::tail_gap(harmonic_index(kind, n), t.window));
    const Scalar window_tail = detail::positive_or_inf<Scalar>(
        pi2 * s1 * s1 * (4 * pi2 * gap - M) * (1 - C), 6 * w * w);
    return depth_tail + window_tail;
}

/// Bound on |x_i - rho| for the i-th fixed-point iterate started at the
/// sector center: C^i times the distance estimate of the starting point.
template <typename Scalar>
Scalar iteration_bound(const KronigPenney<Scalar>& p, SectorKind kind, int n, int i) {
    const Scalar pi = detail::pi_v<Scalar>;
    const Scalar w = p.b() - p.a();
    const Scalar C = lipschitz_constant(p, kind, n);
    Scalar prefactor;
    if (kind == SectorKind::Ground) {
        prefactor = detail::positive_or_inf<Scalar>(2 * pi * (2 * pi * pi * pi - w) * (1 - C), w * w);
    } else {
        const Scalar h = Scalar(harmonic_index(kind, n));
        const Scalar sep = detail::level_separation<Scalar>(kind, n);
        prefactor = w / (pi * h * (1 - C)) +
                    detail::positive_or_inf<Scalar>(2 * pi * (pi * sep - w) * (1 - C), 3 * w * w);
    }
    return std::pow(C, Scalar(i)) * prefactor;
}

/// One computed eigenvalue with its certificate.
template <typename Scalar>
struct EigenSolution {
    SectorIndex sector;
    int branch = 0;  ///< sign in g = sum a + branch * R; 0 for the ground sector
    Scalar value = 0;
    int iterations = 0;
    Scalar last_step = 0;
    Scalar lipschitz = std::numeric_limits<Scalar>::quiet_NaN();
    /// NaN when the sector is only Relaxed (uncertified).
    Scalar truncation_bound = std::numeric_limits<Scalar>::quiet_NaN();
    Scalar iteration_bound = std::numeric_limits<Scalar>::quiet_NaN();
    Scalar total_bound = std::numeric_limits<Scalar>::quiet_NaN();
    Applicability condition = Applicability::Violated;

    bool certified() const { return condition == Applicability::Strict; }
};

/// Thrown when max_iter is reached before the step drops below tolerance;
/// carries the last iterate.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, EigenSolution<double> last)
        : Error(what), last_(last) {}
    const EigenSolution<double>& last() const noexcept { return last_; }

private:
    EigenSolution<double> last_;
};

namespace detail {

/// Step size at which the iteration stops: the requested tolerance, floored
/// at two ulps of the iterate (below that the map can only cycle).
template <typename Scalar>
Scalar step_floor(Scalar tol, Scalar x) {
    const Scalar ulp = std::nextafter(std::abs(x), std::numeric_limits<Scalar>::infinity()) - std::abs(x);
    return std::max(tol, 2 * ulp);
}

template <typename Scalar>
EigenSolution<Scalar> iterate_branch(const KronigPenney<Scalar>& p, const TruncationParams& t, SectorKind kind,
                                     int n, int branch, Applicability condition) {
    const auto box = localization(p, kind, n);
    EigenSolution<Scalar> sol;
    sol.sector = {kind, n, 1};
    sol.branch = branch;
    sol.condition = condition;

    Scalar x = box.center;
    for (int i = 1; i <= t.max_iter; ++i) {
        const Scalar next = box.center + g_map(p, t, kind, n, branch, x);
        if (!box.contains(next))
            throw LocalizationEscape(std::string(to_string(kind)) + " n = " + std::to_string(n) +
                                     ": iterate " + detail::show(static_cast<double>(next)) +
                                     " left [" + detail::show(static_cast<double>(box.lower())) + ", " +
                                     detail::show(static_cast<double>(box.upper())) + "]");
        sol.last_step = std::abs(next - x);
        sol.iterations = i;
        x = next;
        if (sol.last_step <= step_floor(Scalar(t.tolerance), x))
            break;
    }
    sol.value = x;
    return sol;
}

template <typename Scalar>
void attach_bounds(const KronigPenney<Scalar>& p, const TruncationParams& t, EigenSolution<Scalar>& sol) {
    if (!sol.certified())
        return;
    const auto kind = sol.sector.kind;
    const int n = sol.sector.n;
    sol.lipschitz = lipschitz_constant(p, kind, n);
    sol.truncation_bound = truncation_bound(p, t, kind, n);
    sol.iteration_bound = iteration_bound(p, kind, n, sol.iterations);
    sol.total_bound = sol.truncation_bound + sol.iteration_bound;
}

template <typename Scalar>
void require_converged(const TruncationParams& t, const EigenSolution<Scalar>& sol) {
    if (sol.last_step <= step_floor(Scalar(t.tolerance), sol.value))
        return;
    EigenSolution<double> last;
    last.sector = sol.sector;
    last.branch = sol.branch;
    last.value = static_cast<double>(sol.value);
    last.iterations = sol.iterations;
    last.last_step = static_cast<double>(sol.last_step);
    last.condition = sol.condition;
    throw NonConvergence(std::string(to_string(sol.sector.kind)) + " n = " + std::to_string(sol.sector.n) +
                             " did not converge in " + std::to_string(t.max_iter) +
                             " iterations (last step " + detail::show(static_cast<double>(sol.last_step)) + ")",
                         last);
}

template <typename Scalar>
Applicability admit(const KronigPenney<Scalar>& p, SectorKind kind, int n, bool relaxed) {
    const auto condition = check_applicability(p, kind, n, relaxed);
    if (condition == Applicability::Violated)
        throw HypothesisFailure(std::string(to_string(kind)) + " n = " + std::to_string(n) +
                                ": M = " + detail::show(static_cast<double>(p.M())) +
                                " violates the applicability condition");
    if (condition == Applicability::Strict)
        lipschitz_constant(p, kind, n);  // throws if C >= 1
    return condition;
}

}  // namespace detail

/// Solves both roots of a periodic or antiperiodic pair. Each sign branch of
/// g is iterated from the sector center; the results are ordered so that
/// element 0 is j = 1 (lower) and element 1 is j = 2.
template <typename Scalar>
std::array<EigenSolution<Scalar>, 2> solve_pair(const KronigPenney<Scalar>& p, const TruncationParams& t,
                                                SectorKind kind, int n, bool relaxed = false) {
    t.validate();
    if (kind == SectorKind::Ground || n < 1)
        throw InvalidArgument("solve_pair needs a periodic or antiperiodic sector with n >= 1");
    const auto condition = detail::admit(p, kind, n, relaxed);

    std::array<EigenSolution<Scalar>, 2> pair{
        detail::iterate_branch(p, t, kind, n, +1, condition),
        detail::iterate_branch(p, t, kind, n, -1, condition)};
    if (pair[1].value < pair[0].value)
        std::swap(pair[0], pair[1]);
    for (int j = 0; j < 2; ++j) {
        pair[j].sector.j = j + 1;
        detail::require_converged(t, pair[j]);
        detail::attach_bounds(p, t, pair[j]);
    }
    return pair;
}

/// Solves one sector by fixed-point iteration of lambda = center + g(lambda).
template <typename Scalar>
EigenSolution<Scalar> solve(const KronigPenney<Scalar>& p, const TruncationParams& t, SectorIndex sector,
                            bool relaxed = false) {
    sector.validate();
    t.validate();
    if (sector.kind != SectorKind::Ground)
        return solve_pair(p, t, sector.kind, sector.n, relaxed)[sector.j - 1];

    const auto condition = detail::admit(p, SectorKind::Ground, 0, relaxed);
    auto sol = detail::iterate_branch(p, t, SectorKind::Ground, 0, 0, condition);
    detail::require_converged(t, sol);
    detail::attach_bounds(p, t, sol);
    return sol;
}

}  // namespace kpbloch
