#pragma once

#include "polyvol/lp.hpp"
#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"

#include <cmath>
#include <vector>

namespace polyvol {

template <typename Scalar>
struct Ball {
    Vec<Scalar> center;
    Scalar radius;

    Ball() = default;
    Ball(Vec<Scalar> c, Scalar r) : center(std::move(c)), radius(r)
    {
        if (!(radius > Scalar(0))) throw DegenerateError("Ball: radius must be positive");
    }

    Index dimension() const { return center.size(); }
};

/// Chebyshev ball: maximize r s.t. a_i·x + r‖a_i‖ <= b_i.
template <typename Scalar>
Ball<Scalar> inner_ball(const HPolytope<Scalar>& P)
{
    const Index d = P.dimension();
    const Index m = P.num_facets();
    LinearProgram<Scalar> lp(d + 1);
    lp.objective(d) = 1;
    lp.ineq_rows.resize(m, d + 1);
    lp.ineq_rows.leftCols(d) = P.A;
    lp.ineq_rows.col(d) = P.A.rowwise().norm();
    lp.ineq_rhs = P.b;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    lp.lower = Vec<Scalar>::Constant(d + 1, -inf);
    lp.upper = Vec<Scalar>::Constant(d + 1, inf);
    lp.lower(d) = 0;
    LPResult<Scalar> r = solve_lp(lp);
    if (r.status == LPStatus::infeasible) throw InfeasibleError("inner_ball: polytope is empty");
    if (r.status == LPStatus::unbounded) throw UnboundedError("inner_ball: polytope is unbounded");
    Scalar radius = r.solution(d);
    if (!(radius > Scalar(0))) throw DegenerateError("inner_ball: polytope is not full-dimensional");
    return Ball<Scalar>(r.solution.head(d), radius);
}

namespace detail {

// Exit distance from c along direction u by bisection on membership.
template <typename Body, typename Scalar>
Scalar exit_distance_bisect(const Body& P, const Vec<Scalar>& c, const Vec<Scalar>& u, Scalar hi)
{
    Scalar lo = 0;
    if (membership(P, Vec<Scalar>(c + hi * u))) return hi;
    for (int it = 0; it < 40; ++it) {
        Scalar mid = Scalar(0.5) * (lo + hi);
        if (membership(P, Vec<Scalar>(c + mid * u)))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

template <typename Body, typename Scalar>
Ball<Scalar> axis_search_ball(const Body& P, const Vec<Scalar>& c, Scalar bound)
{
    const Index d = c.size();
    if (!membership(P, c)) throw DegenerateError("inner_ball: search center is not inside the polytope");
    Scalar r = bound;
    for (Index i = 0; i < d; ++i) {
        Vec<Scalar> e = Vec<Scalar>::Unit(d, i);
        r = std::min(r, exit_distance_bisect<Body, Scalar>(P, c, e, r));
        r = std::min(r, exit_distance_bisect<Body, Scalar>(P, c, Vec<Scalar>(-e), r));
    }
    if (!(r > Scalar(0))) throw DegenerateError("inner_ball: polytope is not full-dimensional");
    return Ball<Scalar>(c, r / std::sqrt(Scalar(d)));
}

}  // namespace detail

/// V-polytopes: the largest r with c ± r e_i inside, searched from the
/// vertex barycenter; the cross-polytope of radius r holds a ball of r/√d.
template <typename Scalar>
Ball<Scalar> inner_ball(const VPolytope<Scalar>& P)
{
    Vec<Scalar> c = P.V.colwise().mean().transpose();
    Scalar bound = (P.V.rowwise() - c.transpose()).rowwise().norm().maxCoeff();
    if (!(bound > Scalar(0))) throw DegenerateError("inner_ball: polytope is a single point");
    return detail::axis_search_ball(P, c, bound);
}

/// Zonotopes are origin symmetric; search from the origin.
template <typename Scalar>
Ball<Scalar> inner_ball(const Zonotope<Scalar>& P)
{
    Vec<Scalar> c = Vec<Scalar>::Zero(P.dimension());
    Scalar bound = P.G.rowwise().norm().sum();
    return detail::axis_search_ball(P, c, bound);
}

/// Incenter of the simplex spanned by the rows of S ((d+1) x d).
/// Barycentric coordinates λ = M^{-1}[x; 1]; facet i is λ_i >= 0 and the
/// distance to it is λ_i / ‖∇λ_i‖, so the inradius is 1 / Σ‖∇λ_i‖.
template <typename Scalar>
Ball<Scalar> simplex_inscribed_ball(const Mat<Scalar>& S)
{
    const Index d = S.cols();
    require(S.rows() == d + 1, "simplex_inscribed_ball: need d+1 vertices");
    Mat<Scalar> M(d + 1, d + 1);
    M.topRows(d) = S.transpose();
    M.row(d).setOnes();
    Eigen::FullPivLU<Mat<Scalar>> lu(M);
    if (!lu.isInvertible()) throw DegenerateError("simplex_inscribed_ball: vertices are affinely dependent");
    Mat<Scalar> Minv = lu.inverse();
    Vec<Scalar> grad_norm = Minv.leftCols(d).rowwise().norm();
    Scalar radius = Scalar(1) / grad_norm.sum();
    Vec<Scalar> lambda = radius * grad_norm;
    Vec<Scalar> center = S.transpose() * lambda;
    return Ball<Scalar>(center, radius);
}

namespace detail {

// The system [V1^T | -V2^T] λ = 0, Σλ1 = 1, Σλ2 = 1, λ >= 0.
template <typename Scalar>
LinearProgram<Scalar> intersection_lp(const VPolyIntersection<Scalar>& Q)
{
    const Index n1 = Q.V1.rows(), n2 = Q.V2.rows(), d = Q.dimension();
    LinearProgram<Scalar> lp(n1 + n2);
    lp.eq_rows = Mat<Scalar>::Zero(d + 2, n1 + n2);
    lp.eq_rows.topLeftCorner(d, n1) = Q.V1.transpose();
    lp.eq_rows.topRightCorner(d, n2) = -Q.V2.transpose();
    lp.eq_rows.row(d).head(n1).setOnes();
    lp.eq_rows.row(d + 1).tail(n2).setOnes();
    lp.eq_rhs = Vec<Scalar>::Zero(d + 2);
    lp.eq_rhs(d) = 1;
    lp.eq_rhs(d + 1) = 1;
    lp.set_bounds(Scalar(0), std::numeric_limits<Scalar>::infinity());
    return lp;
}

}  // namespace detail

template <typename Scalar>
bool intersection_nonempty(const VPolyIntersection<Scalar>& Q)
{
    return feasible_point(detail::intersection_lp(Q)).feasible;
}

/// Harvests d+1 affinely independent vertices of Q by optimizing linear
/// functionals over the intersection system, each new functional orthogonal
/// to the affine span found so far, then returns the simplex incenter.
template <typename Scalar>
Ball<Scalar> intersection_inner_ball(const VPolyIntersection<Scalar>& Q, Rng& rng)
{
    const Index d = Q.dimension();
    const Index n1 = Q.V1.rows();
    LinearProgram<Scalar> lp = detail::intersection_lp(Q);
    if (!feasible_point(lp).feasible) throw InfeasibleError("intersection_inner_ball: empty intersection");

    auto optimum = [&](const Vec<Scalar>& u) {
        lp.objective.setZero();
        lp.objective.head(n1) = Q.V1 * u;  // u·x with x = V1^T λ1
        LPResult<Scalar> r = solve_lp(lp);
        if (!r.optimal()) throw NumericalError("intersection_inner_ball: vertex LP failed");
        return Vec<Scalar>(Q.V1.transpose() * r.solution.head(n1));
    };

    for (int attempt = 0; attempt < 10; ++attempt) {
        std::vector<Vec<Scalar>> verts;
        verts.push_back(optimum(rng.direction<Scalar>(d)));
        Mat<Scalar> basis(d, 0);  // orthonormal basis of the affine span directions
        bool failed = false;
        while (static_cast<Index>(verts.size()) < d + 1 && !failed) {
            Vec<Scalar> u = rng.gaussian_vector<Scalar>(d);
            if (basis.cols()) u -= basis * (basis.transpose() * u);
            if (u.norm() < Scalar(1e-12)) continue;
            u.normalize();
            const Scalar level = u.dot(verts.front());
            const Scalar scale = std::max(Scalar(1), std::abs(level));
            Vec<Scalar> cand = optimum(u);
            if (u.dot(cand) - level <= Scalar(1e-9) * scale) cand = optimum(Vec<Scalar>(-u));
            if (std::abs(u.dot(cand) - level) <= Scalar(1e-9) * scale) {
                failed = true;
                break;
            }
            Vec<Scalar> dir = cand - verts.front();
            if (basis.cols()) dir -= basis * (basis.transpose() * dir);
            dir.normalize();
            basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
            basis.col(basis.cols() - 1) = dir;
            verts.push_back(cand);
        }
        if (failed) continue;
        Mat<Scalar> S(d + 1, d);
        for (Index i = 0; i <= d; ++i) S.row(i) = verts[i].transpose();
        try {
            return simplex_inscribed_ball(S);
        } catch (const DegenerateError&) {
            continue;
        }
    }
    throw DegenerateError("intersection_inner_ball: intersection is not full-dimensional");
}

template <typename Scalar>
Ball<Scalar> inner_ball(const VPolyIntersection<Scalar>& Q, Rng& rng)
{
    return intersection_inner_ball(Q, rng);
}

template <typename Body>
auto inner_ball(const Body& P, Rng&)
{
    return inner_ball(P);
}

template <typename Scalar>
Ball<Scalar> inner_ball(const Polytope<Scalar>& P, Rng& rng)
{
    return std::visit([&](const auto& p) { return inner_ball(p, rng); }, P);
}

}  // namespace polyvol
