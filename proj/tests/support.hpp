#pragma once

#include "polyvol/polyvol.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

namespace testing {

using namespace polyvol;

inline Vec<double> vec(std::initializer_list<double> xs)
{
    Vec<double> v(Index(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline Mat<double> mat(std::initializer_list<std::initializer_list<double>> rows)
{
    Mat<double> M(Index(rows.size()), Index(rows.begin()->size()));
    Index i = 0;
    for (auto& r : rows) {
        Index j = 0;
        for (double x : r) M(i, j++) = x;
        ++i;
    }
    return M;
}

inline HPolytope<double> square_h() { return std::get<HPolytope<double>>(gen_cube<double>(2, Representation::H)); }

/// Upper critical value of χ²(dof) at level alpha.
inline double chi2_critical(int dof, double alpha)
{
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

/// Pearson statistic of occupancy counts against equal expected counts.
inline double chi2_uniform(const std::vector<long>& counts)
{
    const double total = double(std::accumulate(counts.begin(), counts.end(), 0L));
    const double e = total / double(counts.size());
    double s = 0;
    for (long c : counts) s += (double(c) - e) * (double(c) - e) / e;
    return s;
}

/// Kolmogorov-Smirnov distance of a sample to Uniform(lo, hi).
inline double ks_uniform(std::vector<double> xs, double lo, double hi)
{
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double D = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = (xs[i] - lo) / (hi - lo);
        D = std::max({D, double(i + 1) / n - F, F - double(i) / n});
    }
    return D;
}

/// Permutations π with pos(i) > pos(j) for every edge (i, j).
inline std::uint64_t brute_force_linear_extensions(const Dag& g)
{
    std::vector<Index> perm(static_cast<std::size_t>(g.n));
    std::iota(perm.begin(), perm.end(), Index(0));
    std::vector<Index> pos(perm.size());
    std::uint64_t count = 0;
    do {
        for (std::size_t k = 0; k < perm.size(); ++k) pos[std::size_t(perm[k])] = Index(k);
        bool ok = true;
        for (auto [i, j] : g.edges)
            if (pos[std::size_t(i)] <= pos[std::size_t(j)]) ok = false;
        count += ok;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

/// Random DAG: edges only from lower to higher index of a random relabeling.
inline Dag random_dag(Index n, double density, Rng& rng)
{
    std::vector<Index> label(static_cast<std::size_t>(n));
    std::iota(label.begin(), label.end(), Index(0));
    std::shuffle(label.begin(), label.end(), rng.engine());
    Dag g;
    g.n = n;
    for (Index a = 0; a < n; ++a)
        for (Index b = a + 1; b < n; ++b)
            if (rng.uniform() < density) g.edges.emplace_back(label[std::size_t(a)], label[std::size_t(b)]);
    return g;
}

}  // namespace testing
