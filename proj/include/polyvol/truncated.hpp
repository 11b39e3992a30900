#pragma once

// Bodies of the form P ∩ G(s), where G(s) is a ball of radius s or a box
// scaled by s about its center. These are the phase bodies of the ball and
// box multiphase schemes; they expose the same oracle free functions as the
// polytopes so every walk runs on them unchanged.

#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"

#include <cmath>
#include <type_traits>

namespace polyvol {

template <typename Scalar>
Scalar log_unit_ball_volume(Index d)
{
    const Scalar half = Scalar(d) / 2;
    return half * std::log(Scalar(M_PI)) - std::lgamma(half + 1);
}

template <typename Scalar>
struct BallGauge {
    Vec<Scalar> center;
    Scalar radius;

    Index dimension() const { return center.size(); }
    Scalar value(const Vec<Scalar>& x) const { return (x - center).norm(); }
    bool contains(const Vec<Scalar>& x) const { return value(x) <= radius * (1 + Scalar(kMembershipTol)); }
    BallGauge scaled(Scalar s) const { return {center, s}; }
    Scalar scale() const { return radius; }
    Scalar log_volume() const { return log_unit_ball_volume<Scalar>(dimension()) + Scalar(dimension()) * std::log(radius); }

    Chord<Scalar> chord(const Vec<Scalar>& p, const Vec<Scalar>& v) const
    {
        // |p - c + t v|^2 = R^2
        Vec<Scalar> w = p - center;
        const Scalar a = v.squaredNorm(), b = w.dot(v), c = w.squaredNorm() - radius * radius;
        const Scalar disc = std::max(b * b - a * c, Scalar(0));
        const Scalar s = std::sqrt(disc);
        // stable roots
        Scalar t_pos, t_neg;
        if (b >= 0) {
            Scalar q = -(b + s);
            t_neg = q / a;
            t_pos = q != Scalar(0) ? c / q : Scalar(0);
        } else {
            Scalar q = -b + s;
            t_pos = q / a;
            t_neg = q != Scalar(0) ? c / q : Scalar(0);
        }
        return {std::min(t_neg, Scalar(0)), std::max(t_pos, Scalar(0))};
    }

    BoundaryHit<Scalar> hit(const Vec<Scalar>& p, const Vec<Scalar>& v) const
    {
        Scalar t = chord(p, v).t_pos;
        Vec<Scalar> x = p + t * v;
        Vec<Scalar> n = (center - x).normalized();
        return {x, n, t};
    }

    Vec<Scalar> sample(Rng& rng) const
    {
        const Index d = dimension();
        Scalar rho = radius * Scalar(std::pow(rng.uniform(), 1.0 / double(d)));
        return center + rho * rng.direction<Scalar>(d);
    }
};

/// {x : |U_i·(x - c)| <= s h_i for all i}, U with orthonormal columns.
template <typename Scalar>
struct BoxGauge {
    Vec<Scalar> center;
    Mat<Scalar> U;
    Vec<Scalar> half_widths;
    Scalar s = 1;

    Index dimension() const { return center.size(); }
    Scalar value(const Vec<Scalar>& x) const
    {
        return (U.transpose() * (x - center)).cwiseAbs().cwiseQuotient(half_widths).maxCoeff();
    }
    bool contains(const Vec<Scalar>& x) const { return value(x) <= s * (1 + Scalar(kMembershipTol)); }
    BoxGauge scaled(Scalar t) const { return {center, U, half_widths, t}; }
    Scalar scale() const { return s; }
    Scalar log_volume() const
    {
        return Scalar(dimension()) * std::log(2 * s) + half_widths.array().log().sum();
    }

    Chord<Scalar> chord(const Vec<Scalar>& p, const Vec<Scalar>& v) const { return chord_and_face(p, v).first; }

    BoundaryHit<Scalar> hit(const Vec<Scalar>& p, const Vec<Scalar>& v) const
    {
        auto [c, face] = chord_and_face(p, v);
        Vec<Scalar> n = -face.second * U.col(face.first);
        return {p + c.t_pos * v, n, c.t_pos};
    }

    Vec<Scalar> sample(Rng& rng) const
    {
        const Index d = dimension();
        Vec<Scalar> y(d);
        for (Index i = 0; i < d; ++i) y(i) = s * half_widths(i) * Scalar(rng.uniform(-1.0, 1.0));
        return center + U * y;
    }

private:
    // chord plus the (axis, sign) of the face hit in the positive direction
    std::pair<Chord<Scalar>, std::pair<Index, Scalar>> chord_and_face(const Vec<Scalar>& p, const Vec<Scalar>& v) const
    {
        Vec<Scalar> y = U.transpose() * (p - center);
        Vec<Scalar> w = U.transpose() * v;
        Scalar lo = -std::numeric_limits<Scalar>::infinity(), hi = std::numeric_limits<Scalar>::infinity();
        std::pair<Index, Scalar> face{0, 1};
        for (Index i = 0; i < y.size(); ++i) {
            if (w(i) == Scalar(0)) continue;
            const Scalar bound = s * half_widths(i);
            Scalar t1 = (bound - y(i)) / w(i), t2 = (-bound - y(i)) / w(i);
            Scalar tp = std::max(t1, t2), tn = std::min(t1, t2);
            if (tp < hi) {
                hi = tp;
                face = {i, w(i) > 0 ? Scalar(1) : Scalar(-1)};
            }
            lo = std::max(lo, tn);
        }
        return {{std::min(lo, Scalar(0)), std::max(hi, Scalar(0))}, face};
    }
};

/// Interval hull of a zonotope in its principal frame: U from the SVD of
/// X^T X with X = [G; -G], half-widths h_i = Σ_j |g_j·U_i|.
template <typename Scalar>
BoxGauge<Scalar> pca_box(const Zonotope<Scalar>& Z)
{
    const Index d = Z.dimension();
    Mat<Scalar> XtX = 2 * Z.G.transpose() * Z.G;
    Eigen::JacobiSVD<Mat<Scalar>> svd(XtX, Eigen::ComputeFullU);
    if (svd.rank() < d) throw DegenerateError("pca_box: generators do not span the space");
    Mat<Scalar> U = svd.matrixU();
    Vec<Scalar> h = (Z.G * U).cwiseAbs().colwise().sum().transpose();
    return {Vec<Scalar>::Zero(d), U, h, Scalar(1)};
}

template <typename Body, typename Gauge>
struct Truncated {
    const Body* body;
    Gauge gauge;

    Index dimension() const { return body->dimension(); }
};

template <typename Body, typename Gauge>
Truncated<Body, Gauge> truncate(const Body& P, Gauge g)
{
    return {&P, std::move(g)};
}

template <typename Body, typename Gauge, typename Scalar>
bool membership(const Truncated<Body, Gauge>& T, const Vec<Scalar>& x)
{
    return T.gauge.contains(x) && membership(*T.body, x);
}

template <typename Body, typename Gauge, typename Scalar>
Chord<Scalar> line_intersect(const Truncated<Body, Gauge>& T, const Vec<Scalar>& p, const Vec<Scalar>& v)
{
    Chord<Scalar> a = line_intersect(*T.body, p, v);
    Chord<Scalar> b = T.gauge.chord(p, v);
    return {std::max(a.t_neg, b.t_neg), std::min(a.t_pos, b.t_pos)};
}

template <typename Body, typename Gauge, typename Scalar>
BoundaryHit<Scalar> boundary_hit_with_normal(const Truncated<Body, Gauge>& T, const Vec<Scalar>& p,
                                             const Vec<Scalar>& v)
{
    BoundaryHit<Scalar> g = T.gauge.hit(p, v);
    BoundaryHit<Scalar> h = boundary_hit_with_normal(*T.body, p, v);
    return g.t < h.t ? g : h;
}

template <typename Body, typename Gauge, typename Scalar>
auto make_coordinate_cache(const Truncated<Body, Gauge>& T, const Vec<Scalar>& p)
{
    return make_coordinate_cache(*T.body, p);
}

template <typename Body, typename Gauge, typename Scalar, typename Cache>
    requires(!std::is_same_v<std::remove_const_t<Cache>, NoCache>)
Chord<Scalar> line_intersect_coordinate(const Truncated<Body, Gauge>& T, const Vec<Scalar>& p, Index i, Cache& cache)
{
    Chord<Scalar> a = line_intersect_coordinate(*T.body, p, i, cache);
    Chord<Scalar> b = T.gauge.chord(p, Vec<Scalar>(Vec<Scalar>::Unit(p.size(), i)));
    return {std::max(a.t_neg, b.t_neg), std::min(a.t_pos, b.t_pos)};
}

template <typename Body, typename Gauge, typename Scalar, typename Cache>
    requires(!std::is_same_v<Cache, NoCache>)
void update_coordinate_cache(const Truncated<Body, Gauge>& T, Cache& cache, Index i, Scalar t)
{
    update_coordinate_cache(*T.body, cache, i, t);
}

}  // namespace polyvol
