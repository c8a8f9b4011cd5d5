#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kpbloch/errors.hpp"
#include "kpbloch/monodromy.hpp"
#include "kpbloch/potential.hpp"

namespace kpbloch {

enum class BoundaryKind { Periodic, Antiperiodic };

template <typename Scalar>
struct EigenPair {
    int n = 0;
    Scalar lower = 0;  ///< j = 1
    Scalar upper = 0;  ///< j = 2
};

template <typename Scalar>
struct Interval {
    int index = 0;
    Scalar left = 0;
    Scalar right = 0;
    Scalar length() const { return right - left; }
};

/// Periodic and antiperiodic eigenvalues with the bands and gaps they bound:
///   bands  G_1 = [l0, m11], G_2 = [m12, l11], G_3 = [l12, m21], G_4 = [m22, l21], ...
///   gaps   D_1 = (m11, m12), D_2 = (l11, l12), D_3 = (m21, m22), D_4 = (l21, l22), ...
template <typename Scalar>
struct SpectralTable {
    Scalar lambda0 = 0;
    std::vector<EigenPair<Scalar>> periodic;      ///< n = 1..N
    std::vector<EigenPair<Scalar>> antiperiodic;  ///< n = 1..N
    std::vector<Interval<Scalar>> bands;
    std::vector<Interval<Scalar>> gaps;

    /// Every eigenvalue in spectral order: l0, m11, m12, l11, l12, m21, ...
    std::vector<Scalar> ordered() const {
        std::vector<Scalar> out{lambda0};
        for (std::size_t i = 0; i < periodic.size(); ++i) {
            out.push_back(antiperiodic[i].lower);
            out.push_back(antiperiodic[i].upper);
            out.push_back(periodic[i].lower);
            out.push_back(periodic[i].upper);
        }
        return out;
    }
};

/// Builds bands and gaps from lambda_0 and N periodic/antiperiodic pairs.
template <typename Scalar>
SpectralTable<Scalar> assemble(Scalar lambda0, std::vector<EigenPair<Scalar>> periodic,
                               std::vector<EigenPair<Scalar>> antiperiodic) {
    if (periodic.size() != antiperiodic.size())
        throw InvalidArgument("periodic and antiperiodic lists must have equal length");
    SpectralTable<Scalar> t;
    t.lambda0 = lambda0;
    t.periodic = std::move(periodic);
    t.antiperiodic = std::move(antiperiodic);

    Scalar left = lambda0;
    int k = 0;
    for (std::size_t i = 0; i < t.periodic.size(); ++i) {
        const auto& mu = t.antiperiodic[i];
        const auto& la = t.periodic[i];
        ++k;
        t.bands.push_back({k, left, mu.lower});
        t.gaps.push_back({k, mu.lower, mu.upper});
        ++k;
        t.bands.push_back({k, mu.upper, la.lower});
        t.gaps.push_back({k, la.lower, la.upper});
        left = la.upper;
    }
    return t;
}

namespace detail {

template <typename Scalar>
Scalar root_tolerance(Scalar x) {
    const Scalar ax = std::abs(x);
    const Scalar ulp = std::nextafter(ax, std::numeric_limits<Scalar>::infinity()) - ax;
    return std::max(Scalar(1e-12), 4 * ulp);
}

template <typename Scalar>
Scalar bisect(const std::function<Scalar(Scalar)>& f, Scalar lo, Scalar hi, Scalar flo) {
    while (hi - lo > root_tolerance(hi)) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi)
            break;
        const Scalar fm = f(mid);
        if (fm == 0)
            return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return lo + (hi - lo) / 2;
}

/// Sign-change brackets of every factor on [lo, hi] at the given step, refined
/// by bisection. The returned roots are sorted.
template <typename Scalar>
std::vector<Scalar> scan_roots(const std::vector<std::function<Scalar(Scalar)>>& factors, Scalar lo, Scalar hi,
                               Scalar step) {
    std::vector<Scalar> roots;
    for (const auto& f : factors) {
        Scalar x0 = lo;
        Scalar f0 = f(x0);
        for (long i = 1;; ++i) {
            const Scalar x1 = std::min(hi, lo + Scalar(i) * step);
            const Scalar f1 = f(x1);
            if (f0 == 0)
                roots.push_back(x0);
            else if ((f0 < 0) != (f1 < 0) && f1 != 0)
                roots.push_back(bisect(f, x0, x1, f0));
            x0 = x1;
            f0 = f1;
            if (x1 >= hi)
                break;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace detail

/// The first `count` periodic (D = 2) or antiperiodic (D = -2) eigenvalues in
/// increasing order, double eigenvalues repeated.
///
/// Scans the half-cell factors from -M - 1 with step pi^2/8, then halves the
/// step until the number of roots below the last one found stops changing.
/// Roots are bisected to max(1e-12, 4 ulp). Throws BracketExhaustion if the
/// scan passes the ceiling (pi (count + 2))^2 + M + 100 first.
template <typename Scalar>
std::vector<Scalar> find_eigen(const KronigPenney<Scalar>& p, BoundaryKind kind, int count) {
    if (count < 1)
        throw InvalidArgument("count must be >= 1");
    std::vector<std::function<Scalar(Scalar)>> factors;
    if (kind == BoundaryKind::Periodic) {
        factors.push_back([&p](Scalar x) { return half_cell(p, x)(0, 1); });
        factors.push_back([&p](Scalar x) { return half_cell(p, x)(1, 0); });
    } else {
        factors.push_back([&p](Scalar x) { return half_cell(p, x)(0, 0); });
        factors.push_back([&p](Scalar x) { return half_cell(p, x)(1, 1); });
    }

    const Scalar pi = detail::pi_v<Scalar>;
    const Scalar lo = -p.M() - 1;
    const Scalar ceiling = pi * pi * Scalar(count + 2) * Scalar(count + 2) + p.M() + 100;
    Scalar step = pi * pi / 8;

    // Grow the window until it holds `count` roots.
    std::vector<Scalar> roots;
    Scalar hi = lo;
    while (true) {
        const Scalar next = std::min(ceiling, hi + 64 * step);
        if (next <= hi)
            break;
        hi = next;
        roots = detail::scan_roots(factors, lo, hi, step);
        if (static_cast<int>(roots.size()) >= count || hi >= ceiling)
            break;
    }
    if (static_cast<int>(roots.size()) < count)
        throw BracketExhaustion(std::string(kind == BoundaryKind::Periodic ? "periodic" : "antiperiodic") +
                                    " scan reached " + detail::show(static_cast<double>(ceiling)),
                                static_cast<int>(roots.size()));

    // Refine until the count on [lo, hi] is stable under step halving.
    hi = roots[count - 1] + step;
    roots = detail::scan_roots(factors, lo, hi, step);
    for (int pass = 0; pass < 20; ++pass) {
        step /= 2;
        auto finer = detail::scan_roots(factors, lo, hi, step);
        const bool stable = finer.size() == roots.size();
        roots = std::move(finer);
        if (stable)
            break;
    }
    roots.resize(count);
    return roots;
}

/// lambda_0 and n = 1..pairs periodic and antiperiodic pairs from the
/// monodromy oracle, giving gaps D_1..D_{2 pairs}.
template <typename Scalar>
SpectralTable<Scalar> bands_and_gaps(const KronigPenney<Scalar>& p, int pairs) {
    if (pairs < 1)
        throw InvalidArgument("pairs must be >= 1");
    const auto per = find_eigen(p, BoundaryKind::Periodic, 2 * pairs + 1);
    const auto anti = find_eigen(p, BoundaryKind::Antiperiodic, 2 * pairs);
    std::vector<EigenPair<Scalar>> P, A;
    for (int n = 1; n <= pairs; ++n) {
        P.push_back({n, per[2 * n - 1], per[2 * n]});
        A.push_back({n, anti[2 * n - 2], anti[2 * n - 1]});
    }
    return assemble(per[0], std::move(P), std::move(A));
}

}  // namespace kpbloch
