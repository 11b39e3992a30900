#pragma once

// Polytope representations and their membership / boundary oracles.
//
//   H: {x : A x <= b}
//   V: conv(rows of V)
//   Z: {G^T y : y in [-1, 1]^k}, rows of G are the generators
//   V-intersection: conv(V1) ∩ conv(V2)
//
// Oracles are free functions overloaded per representation so the walks and
// volume engines can be written once against any of them.

#include "polyvol/core.hpp"
#include "polyvol/lp.hpp"

#include <algorithm>
#include <vector>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <variant>

namespace polyvol {

template <typename Scalar>
struct HPolytope {
    Mat<Scalar> A;
    Vec<Scalar> b;
    std::optional<Scalar> known_volume;

    HPolytope() = default;
    HPolytope(Mat<Scalar> A_, Vec<Scalar> b_, std::optional<Scalar> vol = std::nullopt)
        : A(std::move(A_)), b(std::move(b_)), known_volume(vol)
    {
        require(A.rows() == b.size(), "HPolytope: A and b disagree on the number of facets");
        for (Index i = 0; i < A.rows(); ++i)
            require(A.row(i).squaredNorm() > Scalar(0), "HPolytope: zero row in A");
    }

    Index dimension() const { return A.cols(); }
    Index num_facets() const { return A.rows(); }
};

template <typename Scalar>
struct VPolytope {
    Mat<Scalar> V;
    std::optional<Scalar> known_volume;

    VPolytope() = default;
    explicit VPolytope(Mat<Scalar> V_, std::optional<Scalar> vol = std::nullopt)
        : V(std::move(V_)), known_volume(vol)
    {
        require(V.rows() >= 1, "VPolytope: needs at least one vertex");
        require(V.allFinite(), "VPolytope: non-finite vertex coordinates");
    }

    Index dimension() const { return V.cols(); }
    Index num_vertices() const { return V.rows(); }
};

template <typename Scalar>
struct Zonotope {
    Mat<Scalar> G;
    std::optional<Scalar> known_volume;

    Zonotope() = default;
    explicit Zonotope(Mat<Scalar> G_, std::optional<Scalar> vol = std::nullopt)
        : G(std::move(G_)), known_volume(vol)
    {
        require(G.rows() >= 1, "Zonotope: needs at least one generator");
    }

    Index dimension() const { return G.cols(); }
    Index num_generators() const { return G.rows(); }
    double order() const { return double(G.rows()) / double(G.cols()); }
};

template <typename Scalar>
struct VPolyIntersection {
    Mat<Scalar> V1;
    Mat<Scalar> V2;
    std::optional<Scalar> known_volume;

    VPolyIntersection() = default;
    VPolyIntersection(Mat<Scalar> a, Mat<Scalar> b, std::optional<Scalar> vol = std::nullopt)
        : V1(std::move(a)), V2(std::move(b)), known_volume(vol)
    {
        require(V1.cols() == V2.cols(), "VPolyIntersection: vertex sets live in different dimensions");
        require(V1.rows() >= 1 && V2.rows() >= 1, "VPolyIntersection: empty vertex set");
    }

    Index dimension() const { return V1.cols(); }
    VPolytope<Scalar> first() const { return VPolytope<Scalar>(V1); }
    VPolytope<Scalar> second() const { return VPolytope<Scalar>(V2); }
};

template <typename Scalar>
using Polytope = std::variant<HPolytope<Scalar>, VPolytope<Scalar>, Zonotope<Scalar>, VPolyIntersection<Scalar>>;

using HPolytopeXd = HPolytope<double>;
using VPolytopeXd = VPolytope<double>;
using ZonotopeXd = Zonotope<double>;
using VPolyIntersectionXd = VPolyIntersection<double>;
using PolytopeXd = Polytope<double>;

template <typename Scalar>
Index dimension(const Polytope<Scalar>& P)
{
    return std::visit([](const auto& p) { return p.dimension(); }, P);
}

template <typename Scalar>
struct Chord {
    Scalar t_neg;
    Scalar t_pos;
};

template <typename Scalar>
struct BoundaryHit {
    Vec<Scalar> point;
    Vec<Scalar> inner_normal;
    Scalar t;
};

inline constexpr double kMembershipTol = 1e-9;

// ---------------------------------------------------------------------------
// H-polytopes: ratio tests.

template <typename Scalar>
bool membership(const HPolytope<Scalar>& P, const Vec<Scalar>& x)
{
    require_dim(x, P.dimension(), "membership");
    return ((P.A * x - P.b).array() <= Scalar(kMembershipTol)).all();
}

namespace detail {

// Ratio test on residuals s = b - A p with slopes a_i·v. Returns the chord
// and the index of the first blocking facet in the positive direction.
template <typename Scalar, typename Res, typename Slope>
std::pair<Chord<Scalar>, Index> ratio_test(const Res& residual, const Slope& slope)
{
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    Scalar lo = -inf, hi = inf;
    Index hit = -1;
    for (Index i = 0; i < residual.size(); ++i) {
        Scalar s = slope(i);
        if (s > Scalar(0)) {
            Scalar t = residual(i) / s;
            // ties within 1e-9 relative keep the earlier facet
            if (hit < 0 || t < hi - Scalar(1e-9) * std::max(Scalar(1), std::abs(hi))) {
                hi = t;
                hit = i;
            } else if (t < hi) {
                hi = t;
            }
        } else if (s < Scalar(0)) {
            Scalar t = residual(i) / s;
            if (t > lo) lo = t;
        }
    }
    if (!std::isfinite(hi) || !std::isfinite(lo))
        throw UnboundedError("line_intersect: unbounded chord, polytope is not bounded in this direction");
    return {Chord<Scalar>{std::min(lo, Scalar(0)), std::max(hi, Scalar(0))}, hit};
}

}  // namespace detail

template <typename Scalar>
Chord<Scalar> line_intersect(const HPolytope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "line_intersect");
    require_dim(v, P.dimension(), "line_intersect");
    require(v.squaredNorm() > Scalar(0), "line_intersect: zero direction");
    Vec<Scalar> residual = P.b - P.A * p;
    if (residual.minCoeff() < -Scalar(kMembershipTol))
        throw InputError("line_intersect: point is not inside the polytope");
    Vec<Scalar> slope = P.A * v;
    return detail::ratio_test<Scalar>(residual, slope).first;
}

template <typename Scalar>
BoundaryHit<Scalar> boundary_hit_with_normal(const HPolytope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "boundary_hit_with_normal");
    require_dim(v, P.dimension(), "boundary_hit_with_normal");
    Vec<Scalar> residual = P.b - P.A * p;
    Vec<Scalar> slope = P.A * v;
    auto [chord, facet] = detail::ratio_test<Scalar>(residual, slope);
    Vec<Scalar> n = -P.A.row(facet).transpose();
    n.normalize();
    return {p + chord.t_pos * v, n, chord.t_pos};
}

/// Residual cache for coordinate moves: holds A·p.
template <typename Scalar>
struct CoordinateCache {
    Vec<Scalar> Ap;
};

template <typename Scalar>
CoordinateCache<Scalar> make_coordinate_cache(const HPolytope<Scalar>& P, const Vec<Scalar>& p)
{
    return {P.A * p};
}

/// Chord along axis i in O(m) using the cached residuals. After moving to
/// p + t e_i call `update_coordinate_cache` (adds t times column i).
template <typename Scalar>
Chord<Scalar> line_intersect_coordinate(const HPolytope<Scalar>& P, const Vec<Scalar>& p, Index i,
                                        const CoordinateCache<Scalar>& cache)
{
    require(i >= 0 && i < P.dimension(), "line_intersect_coordinate: axis out of range");
#ifndef NDEBUG
    if ((cache.Ap - P.A * p).cwiseAbs().maxCoeff() > Scalar(1e-9) * (Scalar(1) + cache.Ap.cwiseAbs().maxCoeff()))
        throw NumericalError("line_intersect_coordinate: stale residual cache");
#else
    (void)p;
#endif
    Vec<Scalar> residual = P.b - cache.Ap;
    return detail::ratio_test<Scalar>(residual, P.A.col(i)).first;
}

template <typename Scalar>
void update_coordinate_cache(const HPolytope<Scalar>& P, CoordinateCache<Scalar>& cache, Index i, Scalar t)
{
    cache.Ap += t * P.A.col(i);
}

// ---------------------------------------------------------------------------
// V- and Z-polytopes: one LP per query.

namespace detail {

// Variables (y, t); constraints  M^T y - t v = p  plus the representation
// specific conditions on y. Maximizes sense * t.
template <typename Scalar>
LinearProgram<Scalar> ray_lp(const Mat<Scalar>& M, bool simplex_weights, const Vec<Scalar>& p,
                             const Vec<Scalar>& v, Scalar sense)
{
    const Index n = M.rows();
    const Index d = M.cols();
    LinearProgram<Scalar> lp(n + 1);
    lp.objective(n) = sense;
    lp.eq_rows = Mat<Scalar>::Zero(d + (simplex_weights ? 1 : 0), n + 1);
    lp.eq_rows.topLeftCorner(d, n) = M.transpose();
    lp.eq_rows.col(n).head(d) = -v;
    lp.eq_rhs = Vec<Scalar>::Zero(lp.eq_rows.rows());
    lp.eq_rhs.head(d) = p;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    lp.lower.resize(n + 1);
    lp.upper.resize(n + 1);
    if (simplex_weights) {
        lp.eq_rows.row(d).head(n).setOnes();
        lp.eq_rhs(d) = 1;
        lp.lower.head(n).setZero();
        lp.upper.head(n).setConstant(inf);
    } else {
        lp.lower.head(n).setConstant(Scalar(-1));
        lp.upper.head(n).setConstant(Scalar(1));
        // crash basis: generators pointing along the ray start at +1
        if (sense != Scalar(0)) {
            lp.start_at_upper.assign(static_cast<std::size_t>(n + 1), false);
            Vec<Scalar> proj = M * v;
            for (Index i = 0; i < n; ++i) lp.start_at_upper[std::size_t(i)] = sense * proj(i) > Scalar(0);
        }
    }
    lp.lower(n) = -inf;
    lp.upper(n) = inf;
    return lp;
}

template <typename Scalar>
bool lp_membership(const Mat<Scalar>& M, bool simplex_weights, const Vec<Scalar>& x)
{
    LinearProgram<Scalar> lp = ray_lp<Scalar>(M, simplex_weights, x, Vec<Scalar>::Zero(x.size()), Scalar(0));
    // pin t = 0
    lp.lower(M.rows()) = 0;
    lp.upper(M.rows()) = 0;
    return feasible_point(lp).feasible;
}

template <typename Scalar>
std::pair<Scalar, Vec<Scalar>> lp_ray(const Mat<Scalar>& M, bool simplex_weights, const Vec<Scalar>& p,
                                      const Vec<Scalar>& v, Scalar sense)
{
    LPResult<Scalar> r = solve_lp(ray_lp<Scalar>(M, simplex_weights, p, v, sense));
    if (r.status == LPStatus::infeasible)
        throw InputError("line_intersect: point is not inside the polytope");
    if (r.status == LPStatus::unbounded) throw UnboundedError("line_intersect: unbounded chord");
    Vec<Scalar> w = r.eq_dual_values.head(M.cols());
    return {sense * r.objective_value, w};
}

template <typename Scalar>
Chord<Scalar> lp_chord(const Mat<Scalar>& M, bool simplex_weights, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    Scalar hi = lp_ray<Scalar>(M, simplex_weights, p, v, Scalar(1)).first;
    Scalar lo = lp_ray<Scalar>(M, simplex_weights, p, v, Scalar(-1)).first;
    return {std::min(lo, Scalar(0)), std::max(hi, Scalar(0))};
}

// Supporting hyperplane at the exit point from the equality duals of the
// ray LP; the sign is fixed so the normal points back into the body.
template <typename Scalar>
BoundaryHit<Scalar> lp_boundary_hit(const Mat<Scalar>& M, bool simplex_weights, const Vec<Scalar>& p,
                                    const Vec<Scalar>& v)
{
    auto [t, w] = lp_ray<Scalar>(M, simplex_weights, p, v, Scalar(1));
    t = std::max(t, Scalar(0));
    Scalar nrm = w.norm();
    Vec<Scalar> n;
    if (nrm > Scalar(0)) {
        n = w / nrm;
        if (n.dot(v) > Scalar(0)) n = -n;
    } else {
        n = -v.normalized();
    }
    return {p + t * v, n, t};
}

// Ray shooting in a zonotope Z = {G^T y : |y| <= 1} through the dual
//
//   t* = max{t : p + t v in Z} = min{ |G w|_1 - p.w : v.w = 1 },
//
// a convex piecewise-linear problem over the arrangement of the hyperplanes
// g_i.w = 0. The walk moves between vertices of the arrangement (d-1 active
// generators plus v.w = 1) with an exact line search along each edge, so one
// step may cross many breakpoints. The minimizer w is the outward normal of
// the exit facet. Returns nullopt when the walk does not settle (degenerate
// input); callers then fall back to the general LP.
template <typename Scalar>
struct ZonotopeRay {
    Scalar t;
    Vec<Scalar> w;
};

// Quantities of G reused by every ray through the same zonotope.
template <typename Scalar>
struct ZonotopeShape {
    const Scalar* data = nullptr;
    Index k = 0, d = 0;
    Eigen::LLT<Mat<Scalar>> gram;  // G^T G
    Vec<Scalar> norms;
};

template <typename Scalar>
const ZonotopeShape<Scalar>* zonotope_shape(const Mat<Scalar>& G)
{
    thread_local ZonotopeShape<Scalar> cache;
    if (cache.data != G.data() || cache.k != G.rows() || cache.d != G.cols()) {
        cache.data = G.data();
        cache.k = G.rows();
        cache.d = G.cols();
        cache.gram.compute(G.transpose() * G);
        cache.norms = G.rowwise().norm();
        if (cache.gram.info() != Eigen::Success) {
            cache.data = nullptr;
            return nullptr;
        }
    }
    return &cache;
}

// Starting vertex for the ray walk. Z is stood in for by the ellipsoid
// x^T (κ G^T G)^{-1} x <= 1 with κ matching the support of Z along v; the
// generators most nearly orthogonal to the ellipsoid normal at its exit
// point span a facet close to the exit facet of Z.
template <typename Scalar>
std::optional<std::vector<Index>> zonotope_start_set(const Mat<Scalar>& G, const Vec<Scalar>& p,
                                                     const Vec<Scalar>& v)
{
    const Index k = G.rows(), d = G.cols();
    const ZonotopeShape<Scalar>* shape = zonotope_shape(G);
    if (!shape) return std::nullopt;
    Vec<Scalar> n = v;
    {
        const Vec<Scalar> Cv = shape->gram.solve(v);
        const Scalar h = (G * v).cwiseAbs().sum();      // support of Z along v
        const Scalar gv = (G * v).squaredNorm();         // v^T G^T G v
        if (gv > Scalar(0) && h > Scalar(0)) {
            const Scalar kappa = h * h / gv;
            // (p + t v)^T C^{-1} (p + t v) = 1 with C = κ G^T G
            const Vec<Scalar> Cp = shape->gram.solve(p);
            const Scalar a2 = v.dot(Cv) / kappa, b2 = p.dot(Cv) / kappa, c2 = p.dot(Cp) / kappa - 1;
            const Scalar disc = b2 * b2 - a2 * c2;
            if (a2 > Scalar(0) && disc >= Scalar(0)) {
                const Scalar t = (-b2 + std::sqrt(disc)) / a2;
                n = Cp + t * Cv;
            }
        }
    }
    Vec<Scalar> score = (G * n).cwiseAbs().cwiseQuotient(shape->norms.cwiseMax(std::numeric_limits<Scalar>::min()));
    std::vector<Index> order(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) order[std::size_t(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index x, Index y) { return score(x) < score(y); });
    // take them in that order while they stay independent of v and each other
    std::vector<Index> S;
    Mat<Scalar> Q(d, d);
    Q.col(0) = v.normalized();
    Index filled = 1;
    for (Index i : order) {
        if (filled == d) break;
        if (shape->norms(i) == Scalar(0)) continue;
        Vec<Scalar> r = G.row(i).transpose();
        r -= Q.leftCols(filled) * (Q.leftCols(filled).transpose() * r);
        if (r.norm() <= Scalar(1e-6) * shape->norms(i)) continue;
        Q.col(filled++) = r.normalized();
        S.push_back(i);
    }
    if (filled < d) return std::nullopt;
    return S;
}

// Inverse of [g_S; v^T], or nullopt when it is (nearly) singular.
template <typename Scalar>
std::optional<Mat<Scalar>> zonotope_vertex_inverse(const Mat<Scalar>& G, const std::vector<Index>& S,
                                                    const Vec<Scalar>& v)
{
    const Index d = G.cols();
    Mat<Scalar> M(d, d);
    for (Index r = 0; r + 1 < d; ++r) M.row(r) = G.row(S[std::size_t(r)]);
    M.row(d - 1) = v.transpose();
    Eigen::FullPivLU<Mat<Scalar>> lu(M);
    lu.setThreshold(Scalar(1e-10));
    if (!lu.isInvertible()) return std::nullopt;
    return lu.inverse();
}

template <typename Scalar>
std::optional<ZonotopeRay<Scalar>> zonotope_ray(const Mat<Scalar>& G, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    const Index k = G.rows(), d = G.cols();
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    if (!(v.norm() > Scalar(0))) return std::nullopt;

    auto start = zonotope_start_set(G, p, v);
    if (!start) return std::nullopt;
    std::vector<Index> S = std::move(*start);
    std::optional<Mat<Scalar>> inv = zonotope_vertex_inverse(G, S, v);
    if (!inv) return std::nullopt;
    Mat<Scalar> Minv = std::move(*inv);

    Vec<Scalar> w = Minv.col(d - 1);
    std::vector<char> in_S(std::size_t(k), 0);
    for (Index i : S) in_S[std::size_t(i)] = 1;
    Vec<Scalar> c = G * w;  // g_i.w, kept in step with w
    Vec<Scalar> sgn(k);
    for (Index i = 0; i < k; ++i) sgn(i) = c(i) >= Scalar(0) ? Scalar(1) : Scalar(-1);
    // r = p - Σ_{i∉S} s_i g_i, kept in step with the signs
    Vec<Scalar> r = p;
    {
        Vec<Scalar> sg = sgn;
        for (Index i : S) sg(i) = 0;
        r.noalias() -= G.transpose() * sg;
    }

    const Scalar lam_tol = Scalar(1e-9);
    const int max_iter = static_cast<int>(20 * (k + d));
    std::vector<std::pair<Scalar, Index>> cross;
    auto later = [](const std::pair<Scalar, Index>& x, const std::pair<Scalar, Index>& y) { return x > y; };
    for (int it = 0; it < max_iter; ++it) {
        if (it > 0 && it % 64 == 0) {
            // refresh against drift of the rank-one updates
            inv = zonotope_vertex_inverse(G, S, v);
            if (!inv) return std::nullopt;
            Minv = std::move(*inv);
            w = Minv.col(d - 1);
            c.noalias() = G * w;
            Vec<Scalar> sg = sgn;
            for (Index i : S) sg(i) = 0;
            r = p;
            r.noalias() -= G.transpose() * sg;
        }
        // M^T [λ; -μ] = r
        Vec<Scalar> lm = Minv.transpose() * r;
        Index jpos = -1;
        Scalar worst = 1 + lam_tol;
        for (Index a = 0; a + 1 < d; ++a)
            if (std::abs(lm(a)) > worst) {
                worst = std::abs(lm(a));
                jpos = a;
            }
        if (jpos < 0) return ZonotopeRay<Scalar>{-lm(d - 1), w};

        // edge direction: g_j.δ = sign(λ_j), the other active constraints kept
        const Scalar sj = lm(jpos) > Scalar(0) ? Scalar(1) : Scalar(-1);
        Vec<Scalar> delta = sj * Minv.col(jpos);
        Vec<Scalar> q = G * delta;
        cross.clear();
        for (Index i = 0; i < k; ++i)
            if (!in_S[std::size_t(i)] && sgn(i) * q(i) < Scalar(0))
                cross.emplace_back(std::max(Scalar(0), -c(i) / q(i)), i);
        std::make_heap(cross.begin(), cross.end(), later);
        // exact line search: the slope rises by 2|q_i| at each breakpoint
        Scalar slope = 1 - worst;
        Index enter = -1;
        Scalar theta = 0;
        const Index leave = S[std::size_t(jpos)];
        while (!cross.empty()) {
            std::pop_heap(cross.begin(), cross.end(), later);
            auto [th, i] = cross.back();
            cross.pop_back();
            slope += 2 * std::abs(q(i));
            if (slope >= -eps * worst) {
                enter = i;
                theta = th;
                break;
            }
            // crossed: the sign of g_i.w flips
            r += (2 * sgn(i)) * G.row(i).transpose();
            sgn(i) = -sgn(i);
        }
        if (enter < 0) return std::nullopt;

        w += theta * delta;
        c += theta * q;
        // the leaving generator joins the signed sum, the entering one leaves it
        sgn(leave) = sj;
        r -= sj * G.row(leave).transpose();
        r += sgn(enter) * G.row(enter).transpose();
        // replace row jpos of M by g_enter (Sherman-Morrison)
        Vec<Scalar> u = G.row(enter).transpose() - G.row(leave).transpose();
        Vec<Scalar> mcol = Minv.col(jpos);
        const Scalar denom = 1 + u.dot(mcol);
        if (std::abs(denom) < Scalar(1e-12)) return std::nullopt;
        Eigen::Matrix<Scalar, 1, Eigen::Dynamic> urow = u.transpose() * Minv;
        Minv.noalias() -= (mcol / denom) * urow;
        S[std::size_t(jpos)] = enter;
        in_S[std::size_t(enter)] = 1;
        in_S[std::size_t(leave)] = 0;
    }
    return std::nullopt;
}

// Zonotope ray with the LP as a safety net; returns (t*, outward normal).
template <typename Scalar>
std::pair<Scalar, Vec<Scalar>> zonotope_shoot(const Mat<Scalar>& G, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    if (auto r = zonotope_ray<Scalar>(G, p, v)) return {r->t, r->w};
    return lp_ray<Scalar>(G, false, p, v, Scalar(1));
}

}  // namespace detail

template <typename Scalar>
bool membership(const VPolytope<Scalar>& P, const Vec<Scalar>& x)
{
    require_dim(x, P.dimension(), "membership");
    return detail::lp_membership<Scalar>(P.V, true, x);
}

template <typename Scalar>
bool membership(const Zonotope<Scalar>& P, const Vec<Scalar>& x)
{
    require_dim(x, P.dimension(), "membership");
    if (x.isZero()) return true;
    // Z is origin-symmetric: x is inside iff the ray from 0 through x exits at t >= 1
    return detail::zonotope_shoot<Scalar>(P.G, Vec<Scalar>(Vec<Scalar>::Zero(x.size())), x).first >=
           1 - Scalar(kMembershipTol);
}

template <typename Scalar>
bool membership(const VPolyIntersection<Scalar>& P, const Vec<Scalar>& x)
{
    require_dim(x, P.dimension(), "membership");
    return detail::lp_membership<Scalar>(P.V1, true, x) && detail::lp_membership<Scalar>(P.V2, true, x);
}

template <typename Scalar>
Chord<Scalar> line_intersect(const VPolytope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "line_intersect");
    require_dim(v, P.dimension(), "line_intersect");
    require(v.squaredNorm() > Scalar(0), "line_intersect: zero direction");
    return detail::lp_chord<Scalar>(P.V, true, p, v);
}

template <typename Scalar>
Chord<Scalar> line_intersect(const Zonotope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "line_intersect");
    require_dim(v, P.dimension(), "line_intersect");
    require(v.squaredNorm() > Scalar(0), "line_intersect: zero direction");
    const Scalar hi = detail::zonotope_shoot<Scalar>(P.G, p, v).first;
    const Scalar lo = -detail::zonotope_shoot<Scalar>(P.G, p, Vec<Scalar>(-v)).first;
    const Scalar slack = Scalar(kMembershipTol) * (1 + std::abs(hi) + std::abs(lo));
    if (hi < -slack || lo > slack) throw InputError("line_intersect: point is not inside the polytope");
    return {std::min(lo, Scalar(0)), std::max(hi, Scalar(0))};
}

template <typename Scalar>
Chord<Scalar> line_intersect(const VPolyIntersection<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "line_intersect");
    require_dim(v, P.dimension(), "line_intersect");
    require(v.squaredNorm() > Scalar(0), "line_intersect: zero direction");
    Chord<Scalar> a = detail::lp_chord<Scalar>(P.V1, true, p, v);
    Chord<Scalar> b = detail::lp_chord<Scalar>(P.V2, true, p, v);
    return {std::max(a.t_neg, b.t_neg), std::min(a.t_pos, b.t_pos)};
}

template <typename Scalar>
BoundaryHit<Scalar> boundary_hit_with_normal(const VPolytope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "boundary_hit_with_normal");
    return detail::lp_boundary_hit<Scalar>(P.V, true, p, v);
}

template <typename Scalar>
BoundaryHit<Scalar> boundary_hit_with_normal(const Zonotope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "boundary_hit_with_normal");
    auto [t, w] = detail::zonotope_shoot<Scalar>(P.G, p, v);
    t = std::max(t, Scalar(0));
    Vec<Scalar> n = -w.normalized();
    return {p + t * v, n, t};
}

template <typename Scalar>
BoundaryHit<Scalar> boundary_hit_with_normal(const VPolyIntersection<Scalar>& P, const Vec<Scalar>& p,
                                             const Vec<Scalar>& v)
{
    require_dim(p, P.dimension(), "boundary_hit_with_normal");
    BoundaryHit<Scalar> a = detail::lp_boundary_hit<Scalar>(P.V1, true, p, v);
    BoundaryHit<Scalar> b = detail::lp_boundary_hit<Scalar>(P.V2, true, p, v);
    // ties go to the first body
    return b.t < a.t - Scalar(1e-9) * std::max(Scalar(1), a.t) ? b : a;
}

// Coordinate chords for LP-backed bodies have no cheap cache.
struct NoCache {};

template <typename Body, typename Scalar>
NoCache make_coordinate_cache(const Body&, const Vec<Scalar>&)
{
    return {};
}

template <typename Body, typename Scalar>
Chord<Scalar> line_intersect_coordinate(const Body& P, const Vec<Scalar>& p, Index i, const NoCache&)
{
    return line_intersect(P, p, Vec<Scalar>(Vec<Scalar>::Unit(p.size(), i)));
}

template <typename Body, typename Scalar>
void update_coordinate_cache(const Body&, NoCache&, Index, Scalar)
{
}

// ---------------------------------------------------------------------------
// Variant dispatch.

template <typename Scalar>
bool membership(const Polytope<Scalar>& P, const Vec<Scalar>& x)
{
    return std::visit([&](const auto& p) { return membership(p, x); }, P);
}

template <typename Scalar>
Chord<Scalar> line_intersect(const Polytope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    return std::visit([&](const auto& q) { return line_intersect(q, p, v); }, P);
}

template <typename Scalar>
BoundaryHit<Scalar> boundary_hit_with_normal(const Polytope<Scalar>& P, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    return std::visit([&](const auto& q) { return boundary_hit_with_normal(q, p, v); }, P);
}

/// Strict interiority: positive room along every coordinate direction.
template <typename Body, typename Scalar>
bool is_interior(const Body& P, const Vec<Scalar>& p, Scalar margin = Scalar(1e-12))
{
    if (!membership(P, p)) return false;
    const Index d = p.size();
    for (Index i = 0; i < d; ++i) {
        Chord<Scalar> c;
        try {
            c = line_intersect(P, p, Vec<Scalar>(Vec<Scalar>::Unit(d, i)));
        } catch (const InputError&) {
            return false;
        }
        if (c.t_pos <= margin || -c.t_neg <= margin) return false;
    }
    return true;
}

template <typename Scalar>
bool is_interior(const HPolytope<Scalar>& P, const Vec<Scalar>& p, Scalar margin = Scalar(1e-12))
{
    require_dim(p, P.dimension(), "is_interior");
    Vec<Scalar> slack = P.b - P.A * p;
    for (Index i = 0; i < slack.size(); ++i)
        if (slack(i) <= margin * P.A.row(i).norm()) return false;
    return true;
}

}  // namespace polyvol
