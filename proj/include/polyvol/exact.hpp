#pragma once

#include "polyvol/polytope.hpp"

#include <cmath>
#include <vector>

namespace polyvol {

namespace detail {

inline double binomial(Index n, Index k)
{
    if (k < 0 || k > n) return 0;
    return std::exp(std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) - std::lgamma(double(n - k) + 1));
}

}  // namespace detail

/// 2^d Σ_S |det G_S| over all d-row subsets S, in lexicographic order.
template <typename Scalar>
Scalar exact_vol(const Zonotope<Scalar>& Z)
{
    const Index k = Z.num_generators(), d = Z.dimension();
    if (k < d) return 0;
    if (detail::binomial(k, d) > 1e7 + 0.5)
        throw InputError("exact_vol: more than 1e7 generator subsets, use a randomized estimate");
    std::vector<Index> idx(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) idx[std::size_t(i)] = i;
    Mat<Scalar> S(d, d);
    Scalar total = 0;
    while (true) {
        for (Index i = 0; i < d; ++i) S.row(i) = Z.G.row(idx[std::size_t(i)]);
        total += std::abs(S.partialPivLu().determinant());
        Index pos = d - 1;
        while (pos >= 0 && idx[std::size_t(pos)] == k - d + pos) --pos;
        if (pos < 0) break;
        ++idx[std::size_t(pos)];
        for (Index i = pos + 1; i < d; ++i) idx[std::size_t(i)] = idx[std::size_t(i - 1)] + 1;
    }
    return std::pow(Scalar(2), Scalar(d)) * total;
}

template <typename Body>
auto exact_vol(const Body& P) -> std::decay_t<decltype(*P.known_volume)>
{
    if (!P.known_volume) throw VolumeUnknownError();
    return *P.known_volume;
}

template <typename Scalar>
Scalar exact_vol(const Polytope<Scalar>& P)
{
    return std::visit([](const auto& q) -> Scalar { return exact_vol(q); }, P);
}

/// vol(Δ ∩ {a·x <= z0}) / vol(Δ) for the canonical simplex Δ = {x >= 0, Σx = 1}.
///
/// With u_i = a_i - z0 this is Pr[Σ x_i u_i <= 0] for x uniform on Δ. Varsi's
/// recurrence folds in one positive gap at a time and keeps only convex
/// combinations, so there is no cancellation: O(d^2) time, O(d) memory.
template <typename Scalar>
Scalar frustum_of_simplex(const Vec<Scalar>& a, Scalar z0)
{
    const Index d = a.size();
    require(d >= 2, "frustum_of_simplex: dimension must be at least 2");
    if ((a.array() == a(0)).all()) return z0 < a(0) ? Scalar(0) : Scalar(1);
    std::vector<Scalar> pos, neg;
    for (Index i = 0; i < d; ++i) {
        Scalar u = a(i) - z0;
        if (u > Scalar(0))
            pos.push_back(u);
        else
            neg.push_back(u);
    }
    if (pos.empty()) return 1;
    if (neg.empty()) return 0;
    const std::size_t K = neg.size();
    std::vector<Scalar> A(K + 1, Scalar(1));
    A[0] = 0;
    for (Scalar x : pos)
        for (std::size_t k = 1; k <= K; ++k) A[k] = (x * A[k - 1] - neg[k - 1] * A[k]) / (x - neg[k - 1]);
    return std::min(std::max(A[K], Scalar(0)), Scalar(1));
}

}  // namespace polyvol
