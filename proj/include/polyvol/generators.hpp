#pragma once

#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>

namespace polyvol {

enum class Representation { H, V };
enum class StandardKind { cube, cross, simplex, prod_simplex, skinny_cube };
enum class RandomKind { rand_vpoly, rand_zonotope, rand_hpoly };
enum class SubGenerator { cube, sphere, uniform, gaussian, exponential };

namespace detail {

inline double factorial(Index d)
{
    return std::tgamma(double(d) + 1.0);
}

inline void require_dim_for_vertices(Index d, const char* what)
{
    require(d <= 24, std::string(what) + ": V-representation needs 2^d rows, d <= 24 supported");
}

}  // namespace detail

/// [-1, 1]^d.
template <typename Scalar = double>
Polytope<Scalar> gen_cube(Index d, Representation rep)
{
    require(d >= 1, "gen_cube: dimension must be positive");
    Scalar vol = std::pow(Scalar(2), Scalar(d));
    if (rep == Representation::H) {
        Mat<Scalar> A(2 * d, d);
        A << Mat<Scalar>::Identity(d, d), -Mat<Scalar>::Identity(d, d);
        return HPolytope<Scalar>(A, Vec<Scalar>::Ones(2 * d), vol);
    }
    detail::require_dim_for_vertices(d, "gen_cube");
    const Index n = Index(1) << d;
    Mat<Scalar> V(n, d);
    for (Index r = 0; r < n; ++r)
        for (Index j = 0; j < d; ++j) V(r, j) = (r >> j) & 1 ? Scalar(1) : Scalar(-1);
    return VPolytope<Scalar>(V, vol);
}

/// conv{±e_i}.
template <typename Scalar = double>
Polytope<Scalar> gen_cross(Index d, Representation rep)
{
    require(d >= 1, "gen_cross: dimension must be positive");
    Scalar vol = std::pow(Scalar(2), Scalar(d)) / Scalar(detail::factorial(d));
    if (rep == Representation::V) {
        Mat<Scalar> V(2 * d, d);
        V << Mat<Scalar>::Identity(d, d), -Mat<Scalar>::Identity(d, d);
        return VPolytope<Scalar>(V, vol);
    }
    detail::require_dim_for_vertices(d, "gen_cross");
    const Index m = Index(1) << d;
    Mat<Scalar> A(m, d);
    for (Index r = 0; r < m; ++r)
        for (Index j = 0; j < d; ++j) A(r, j) = (r >> j) & 1 ? Scalar(1) : Scalar(-1);
    return HPolytope<Scalar>(A, Vec<Scalar>::Ones(m), vol);
}

/// H: {x >= 0, Σx <= 1} with volume 1/d!.  V: conv{e_1..e_d}, a (d-1)-dimensional
/// face, so no volume is attached.
template <typename Scalar = double>
Polytope<Scalar> gen_simplex(Index d, Representation rep)
{
    require(d >= 1, "gen_simplex: dimension must be positive");
    if (rep == Representation::V) return VPolytope<Scalar>(Mat<Scalar>::Identity(d, d));
    Mat<Scalar> A(d + 1, d);
    A << -Mat<Scalar>::Identity(d, d), Mat<Scalar>::Ones(1, d);
    Vec<Scalar> b = Vec<Scalar>::Zero(d + 1);
    b(d) = 1;
    return HPolytope<Scalar>(A, b, Scalar(1) / Scalar(detail::factorial(d)));
}

/// Δ^d × Δ^d in R^{2d}; volume 1/d!^2.
template <typename Scalar = double>
Polytope<Scalar> gen_prod_simplex(Index d, Representation rep = Representation::H)
{
    require(d >= 1, "gen_prod_simplex: dimension must be positive");
    require(rep == Representation::H, "gen_prod_simplex: available only in H-representation");
    Mat<Scalar> A = Mat<Scalar>::Zero(2 * d + 2, 2 * d);
    Vec<Scalar> b = Vec<Scalar>::Zero(2 * d + 2);
    A.topLeftCorner(2 * d, 2 * d) = -Mat<Scalar>::Identity(2 * d, 2 * d);
    A.row(2 * d).head(d).setOnes();
    A.row(2 * d + 1).tail(d).setOnes();
    b(2 * d) = 1;
    b(2 * d + 1) = 1;
    Scalar f = Scalar(detail::factorial(d));
    return HPolytope<Scalar>(A, b, Scalar(1) / (f * f));
}

/// [-1, 1]^{d-1} × [-100, 100]; the last axis is the long one.
template <typename Scalar = double>
Polytope<Scalar> gen_skinny_cube(Index d, Representation rep = Representation::H)
{
    require(d >= 1, "gen_skinny_cube: dimension must be positive");
    require(rep == Representation::H, "gen_skinny_cube: available only in H-representation");
    Mat<Scalar> A(2 * d, d);
    A << Mat<Scalar>::Identity(d, d), -Mat<Scalar>::Identity(d, d);
    Vec<Scalar> b = Vec<Scalar>::Ones(2 * d);
    b(d - 1) = 100;
    b(2 * d - 1) = 100;
    return HPolytope<Scalar>(A, b, Scalar(100) * std::pow(Scalar(2), Scalar(d)));
}

template <typename Scalar = double>
Polytope<Scalar> generate_standard(StandardKind kind, Index d, Representation rep)
{
    switch (kind) {
    case StandardKind::cube: return gen_cube<Scalar>(d, rep);
    case StandardKind::cross: return gen_cross<Scalar>(d, rep);
    case StandardKind::simplex: return gen_simplex<Scalar>(d, rep);
    case StandardKind::prod_simplex: return gen_prod_simplex<Scalar>(d, rep);
    case StandardKind::skinny_cube: return gen_skinny_cube<Scalar>(d, rep);
    }
    throw InputError("generate_standard: unknown kind");
}

/// n vertices uniform in [-1,1]^d (cube) or on the unit sphere (sphere).
template <typename Scalar = double>
VPolytope<Scalar> gen_rand_vpoly(Index d, Index n, SubGenerator gen, std::uint64_t seed)
{
    require(d >= 1 && n >= 1, "gen_rand_vpoly: dimension and vertex count must be positive");
    require(gen == SubGenerator::cube || gen == SubGenerator::sphere, "gen_rand_vpoly: generator must be cube or sphere");
    Rng rng(seed);
    Mat<Scalar> V(n, d);
    for (Index i = 0; i < n; ++i) {
        if (gen == SubGenerator::cube)
            for (Index j = 0; j < d; ++j) V(i, j) = Scalar(rng.uniform(-1.0, 1.0));
        else
            V.row(i) = rng.direction<Scalar>(d).transpose();
    }
    return VPolytope<Scalar>(V);
}

/// k generators with uniform directions; lengths from U[0,100],
/// N(50, (50/3)^2) or Exp(rate 1/30), the last two truncated to [0, 100].
template <typename Scalar = double>
Zonotope<Scalar> gen_rand_zonotope(Index d, Index k, SubGenerator gen, std::uint64_t seed)
{
    require(d >= 1 && k >= 1, "gen_rand_zonotope: dimension and generator count must be positive");
    Rng rng(seed);
    Mat<Scalar> G(k, d);
    for (Index i = 0; i < k; ++i) {
        double len = 0;
        switch (gen) {
        case SubGenerator::uniform: len = rng.uniform(0.0, 100.0); break;
        case SubGenerator::gaussian:
            do {
                len = 50.0 + (50.0 / 3.0) * rng.normal();
            } while (len < 0.0 || len > 100.0);
            break;
        case SubGenerator::exponential:
            do {
                len = -30.0 * std::log(rng.uniform_open());
            } while (len > 100.0);
            break;
        default: throw InputError("gen_rand_zonotope: generator must be uniform, gaussian or exponential");
        }
        G.row(i) = (Scalar(len) * rng.direction<Scalar>(d)).transpose();
    }
    return Zonotope<Scalar>(G);
}

/// m halfspaces tangent to the radius-10 sphere, each containing the origin.
template <typename Scalar = double>
HPolytope<Scalar> gen_rand_hpoly(Index d, Index m, std::uint64_t seed)
{
    require(d >= 1 && m >= 1, "gen_rand_hpoly: dimension and facet count must be positive");
    Rng rng(seed);
    Mat<Scalar> A(m, d);
    for (Index i = 0; i < m; ++i) A.row(i) = rng.direction<Scalar>(d).transpose();
    return HPolytope<Scalar>(A, Vec<Scalar>::Constant(m, Scalar(10)));
}

template <typename Scalar = double>
Polytope<Scalar> generate_random(RandomKind kind, Index d, Index count, SubGenerator gen, std::uint64_t seed)
{
    switch (kind) {
    case RandomKind::rand_vpoly: return gen_rand_vpoly<Scalar>(d, count, gen, seed);
    case RandomKind::rand_zonotope: return gen_rand_zonotope<Scalar>(d, count, gen, seed);
    case RandomKind::rand_hpoly: return gen_rand_hpoly<Scalar>(d, count, seed);
    }
    throw InputError("generate_random: unknown kind");
}

}  // namespace polyvol
