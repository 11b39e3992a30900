#pragma once

// Geometric random walks over any body exposing the oracle free functions
// (membership, line_intersect, boundary_hit_with_normal and the coordinate
// cache trio) plus the O(d) direct samplers.

#include "polyvol/inner_ball.hpp"
#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

namespace polyvol {

enum class WalkKind { CDHR, RDHR, BiW, BaW, BRDHR, BCDHR };

inline std::string to_string(WalkKind w)
{
    switch (w) {
    case WalkKind::CDHR: return "CDHR";
    case WalkKind::RDHR: return "RDHR";
    case WalkKind::BiW: return "BiW";
    case WalkKind::BaW: return "BaW";
    case WalkKind::BRDHR: return "BRDHR";
    case WalkKind::BCDHR: return "BCDHR";
    }
    return "?";
}

inline bool is_boundary_walk(WalkKind w) { return w == WalkKind::BRDHR || w == WalkKind::BCDHR; }

template <typename Scalar>
struct TargetDistribution {
    enum class Kind { uniform, gaussian };
    Kind kind = Kind::uniform;
    Vec<Scalar> mode;       // gaussian only; empty means "inner ball center"
    Scalar variance = 1;    // gaussian only

    static TargetDistribution uniform() { return {}; }
    static TargetDistribution gaussian(Vec<Scalar> mode, Scalar variance = 1)
    {
        require(variance > Scalar(0), "TargetDistribution: variance must be positive");
        TargetDistribution t;
        t.kind = Kind::gaussian;
        t.mode = std::move(mode);
        t.variance = variance;
        return t;
    }
    bool is_gaussian() const { return kind == Kind::gaussian; }

    Scalar log_density(const Vec<Scalar>& x) const
    {
        if (!is_gaussian()) return 0;
        return -(x - mode).squaredNorm() / (2 * variance);
    }
};

template <typename Scalar>
struct WalkParams {
    WalkKind walk = WalkKind::BiW;
    int walk_length = 1;
    Vec<Scalar> starting_point;
    int nburns = 0;
    Scalar baw_radius = 1;
    Scalar biw_max_length = 1;   // τ: trajectory lengths are -τ ln η
    int biw_reflection_bound = 1;
};

template <typename Scalar>
struct SampleMatrix {
    Mat<Scalar> points;  // one sample per row
    WalkKind walk = WalkKind::BiW;
    int walk_length = 1;
    std::uint64_t seed = 0;

    Index size() const { return points.rows(); }
};

// ---------------------------------------------------------------------------
// One-dimensional truncated normal.

/// Draw from N(mu, sigma²) restricted to [a, b] (finite, a <= b).
/// Inverse CDF on the tail closest to the mean; when the whole interval is
/// more than 6σ out, Rayleigh-tail rejection instead.
template <typename Scalar>
Scalar sample_truncated_normal(Scalar mu, Scalar sigma, Scalar a, Scalar b, Rng& rng)
{
    if (!(a < b)) return a;
    double alpha = double((a - mu) / sigma);
    double beta = double((b - mu) / sigma);
    bool mirrored = false;
    if (beta < 0.0) {  // work on the right-hand side of the mean
        std::swap(alpha, beta);
        alpha = -alpha;
        beta = -beta;
        mirrored = true;
    }
    double z;
    if (alpha > 6.0) {
        if (beta - alpha < 1.0 / alpha) {
            // narrow band: uniform proposal, density ratio >= e^-1.5
            do {
                z = rng.uniform(alpha, beta);
            } while (rng.uniform() > std::exp(-0.5 * (z * z - alpha * alpha)));
        } else {
            do {
                z = std::sqrt(alpha * alpha - 2.0 * std::log(rng.uniform_open()));
            } while (z > beta || rng.uniform() * z > alpha);
        }
    } else {
        static const boost::math::normal_distribution<double> standard;
        if (alpha >= 0.0) {
            double qa = cdf(complement(standard, alpha));
            double qb = cdf(complement(standard, beta));
            double u = qb + (qa - qb) * rng.uniform();
            z = u <= 0.0 ? beta : quantile(complement(standard, u));
        } else {
            double pa = cdf(standard, alpha);
            double pb = cdf(standard, beta);
            double u = pa + (pb - pa) * rng.uniform();
            z = u <= 0.0 ? alpha : (u >= 1.0 ? beta : quantile(standard, u));
        }
        z = std::min(std::max(z, alpha), beta);
    }
    if (mirrored) z = -z;
    Scalar t = mu + sigma * Scalar(z);
    return std::min(std::max(t, a), b);
}

template <typename Scalar>
Scalar sample_on_chord(const Chord<Scalar>& c, const TargetDistribution<Scalar>& dist, Scalar mean_offset, Rng& rng)
{
    if (!dist.is_gaussian()) return c.t_neg + (c.t_pos - c.t_neg) * Scalar(rng.uniform());
    return sample_truncated_normal(mean_offset, std::sqrt(dist.variance), c.t_neg, c.t_pos, rng);
}

// ---------------------------------------------------------------------------
// Single steps.

template <typename Body, typename Scalar>
Vec<Scalar> rdhr_step(const Body& P, const Vec<Scalar>& p, const TargetDistribution<Scalar>& dist, Rng& rng)
{
    Vec<Scalar> v = rng.direction<Scalar>(p.size());
    Chord<Scalar> c = line_intersect(P, p, v);
    Scalar mu = dist.is_gaussian() ? v.dot(dist.mode - p) : Scalar(0);
    return p + sample_on_chord(c, dist, mu, rng) * v;
}

template <typename Body, typename Scalar, typename Cache>
Vec<Scalar> cdhr_step(const Body& P, const Vec<Scalar>& p, const TargetDistribution<Scalar>& dist, Rng& rng,
                      Cache& cache)
{
    Index i = static_cast<Index>(rng.index(static_cast<std::size_t>(p.size())));
    Chord<Scalar> c = line_intersect_coordinate(P, p, i, cache);
    Scalar mu = dist.is_gaussian() ? dist.mode(i) - p(i) : Scalar(0);
    Scalar t = sample_on_chord(c, dist, mu, rng);
    Vec<Scalar> q = p;
    q(i) += t;
    update_coordinate_cache(P, cache, i, t);
    return q;
}

/// Uniform point in the ball B(0, radius).
template <typename Scalar>
Vec<Scalar> uniform_in_ball(Index d, Scalar radius, Rng& rng)
{
    Scalar rho = radius * Scalar(std::pow(rng.uniform(), 1.0 / double(d)));
    return rho * rng.direction<Scalar>(d);
}

template <typename Body, typename Scalar>
Vec<Scalar> ball_walk_step(const Body& P, const Vec<Scalar>& p, Scalar delta, const TargetDistribution<Scalar>& dist,
                           Rng& rng)
{
    Vec<Scalar> x = p + uniform_in_ball<Scalar>(p.size(), delta, rng);
    if (dist.is_gaussian()) {
        Scalar log_ratio = dist.log_density(x) - dist.log_density(p);
        if (log_ratio < Scalar(0) && Scalar(rng.uniform()) >= std::exp(log_ratio)) return p;
    }
    if (!membership(P, x)) return p;
    return x;
}

template <typename Scalar>
struct BilliardTrace {
    int reflections = 0;
    bool aborted = false;
};

/// Billiard walk with an explicit trajectory length and direction; the random
/// version below draws both.
template <typename Body, typename Scalar>
Vec<Scalar> billiard_trajectory(const Body& P, const Vec<Scalar>& p0, Vec<Scalar> v, Scalar L, int R,
                                BilliardTrace<Scalar>* trace = nullptr)
{
    Vec<Scalar> p = p0;
    int n = 0;
    while (true) {
        if (++n > R) {
            if (trace) trace->aborted = true;
            return p0;
        }
        BoundaryHit<Scalar> hit = boundary_hit_with_normal(P, p, v);
        if (hit.t >= L) return p + L * v;
        p = hit.point;
        L -= hit.t;
        v -= 2 * v.dot(hit.inner_normal) * hit.inner_normal;
        v.normalize();
        p += Scalar(1e-10) * hit.t * v;
        if (trace) trace->reflections++;
    }
}

template <typename Body, typename Scalar>
Vec<Scalar> billiard_step(const Body& P, const Vec<Scalar>& p, Scalar tau, int R, Rng& rng)
{
    Scalar L = -tau * Scalar(std::log(rng.uniform_open()));
    Vec<Scalar> v = rng.direction<Scalar>(p.size());
    return billiard_trajectory(P, p, v, L, R);
}

// ---------------------------------------------------------------------------
// Defaults and chains.

template <typename Body>
constexpr bool is_hpolytope_v = false;
template <typename Scalar>
constexpr bool is_hpolytope_v<HPolytope<Scalar>> = true;

template <typename Scalar>
WalkParams<Scalar> default_walk_params(Index d, bool h_representation, const Ball<Scalar>& ball,
                                       const TargetDistribution<Scalar>& dist)
{
    WalkParams<Scalar> w;
    const Scalar r = ball.radius;
    if (dist.is_gaussian()) {
        w.walk = h_representation ? WalkKind::CDHR : WalkKind::RDHR;
        w.walk_length = static_cast<int>(std::floor(10.0 + double(d) / 10.0));
        Scalar scale = std::max(Scalar(1), Scalar(1) / (2 * dist.variance));
        w.baw_radius = 4 * r / std::sqrt(scale * Scalar(d));
    } else {
        w.walk = WalkKind::BiW;
        w.walk_length = 5;
        w.baw_radius = 4 * r / std::sqrt(Scalar(d));
    }
    w.starting_point = ball.center;
    w.nburns = 0;
    w.biw_max_length = 2 * Scalar(d) * r;
    w.biw_reflection_bound = static_cast<int>(10 * d);
    return w;
}

template <typename Body, typename Scalar>
WalkParams<Scalar> default_walk_params(const Body& P, const TargetDistribution<Scalar>& dist, Rng& rng)
{
    Ball<Scalar> ball = inner_ball(P, rng);
    return default_walk_params<Scalar>(P.dimension(), is_hpolytope_v<Body>, ball, dist);
}

/// One Markov chain: position, oracle cache and parameters.
template <typename Body, typename Scalar>
class RandomWalk {
public:
    RandomWalk(const Body& P, WalkParams<Scalar> params, TargetDistribution<Scalar> dist, Vec<Scalar> start)
        : P_(P), params_(std::move(params)), dist_(std::move(dist)), p_(std::move(start)),
          cache_(make_coordinate_cache(P_, p_))
    {
    }

    const Vec<Scalar>& position() const { return p_; }
    const WalkParams<Scalar>& params() const { return params_; }

    void set_position(const Vec<Scalar>& p)
    {
        p_ = p;
        cache_ = make_coordinate_cache(P_, p_);
    }

    void step(Rng& rng)
    {
        switch (params_.walk) {
        case WalkKind::CDHR:
        case WalkKind::BCDHR:
            p_ = cdhr_step(P_, p_, dist_, rng, cache_);
            // incremental residuals drift; rebuild them now and then
            if (++coordinate_moves_ % 4096 == 0) cache_ = make_coordinate_cache(P_, p_);
            return;
        case WalkKind::RDHR:
        case WalkKind::BRDHR: p_ = rdhr_step(P_, p_, dist_, rng); break;
        case WalkKind::BaW: p_ = ball_walk_step(P_, p_, params_.baw_radius, dist_, rng); break;
        case WalkKind::BiW:
            if (dist_.is_gaussian()) throw InputError("BiW samples only the uniform distribution");
            p_ = billiard_step(P_, p_, params_.biw_max_length, params_.biw_reflection_bound, rng);
            break;
        }
        if constexpr (!std::is_same_v<decltype(cache_), NoCache>) cache_ = make_coordinate_cache(P_, p_);
    }

    void advance(int steps, Rng& rng)
    {
        for (int i = 0; i < steps; ++i) step(rng);
    }

private:
    const Body& P_;
    WalkParams<Scalar> params_;
    TargetDistribution<Scalar> dist_;
    Vec<Scalar> p_;
    std::size_t coordinate_moves_ = 0;
    decltype(make_coordinate_cache(std::declval<const Body&>(), std::declval<const Vec<Scalar>&>())) cache_;
};

namespace detail {

template <typename Body, typename Scalar>
void check_start(const Body& P, const Vec<Scalar>& start)
{
    require_dim(start, P.dimension(), "sample_points: starting point");
    if (!is_interior(P, start)) throw InputError("sample_points: starting point is not strictly inside the polytope");
}

}  // namespace detail

/// Boundary sampling: every Hit-and-Run step records both chord endpoints
/// (lower t first), then moves uniformly along the chord.
template <typename Body, typename Scalar>
SampleMatrix<Scalar> boundary_sample(const Body& P, Index n, const WalkParams<Scalar>& params, Rng& rng)
{
    require(n >= 0, "boundary_sample: negative sample count");
    require(is_boundary_walk(params.walk), "boundary_sample: walk must be BRDHR or BCDHR");
    detail::check_start(P, params.starting_point);
    const Index d = P.dimension();
    SampleMatrix<Scalar> out;
    out.points.resize(n, d);
    out.walk = params.walk;
    out.walk_length = params.walk_length;
    out.seed = rng.seed();

    TargetDistribution<Scalar> uniform;
    RandomWalk<Body, Scalar> chain(P, params, uniform, params.starting_point);
    chain.advance(params.nburns * params.walk_length, rng);
    Index filled = 0;
    while (filled < n) {
        chain.advance(params.walk_length - 1, rng);
        const Vec<Scalar>& p = chain.position();
        Vec<Scalar> v;
        Chord<Scalar> c;
        if (params.walk == WalkKind::BCDHR) {
            Index i = static_cast<Index>(rng.index(static_cast<std::size_t>(d)));
            v = Vec<Scalar>::Unit(d, i);
        } else {
            v = rng.direction<Scalar>(d);
        }
        c = line_intersect(P, p, v);
        out.points.row(filled++) = (p + c.t_neg * v).transpose();
        if (filled < n) out.points.row(filled++) = (p + c.t_pos * v).transpose();
        chain.set_position(p + (c.t_neg + (c.t_pos - c.t_neg) * Scalar(rng.uniform())) * v);
    }
    return out;
}

/// n samples; nburns samples are discarded first and one sample is recorded
/// every walk_length steps.
template <typename Body, typename Scalar>
SampleMatrix<Scalar> sample_points(const Body& P, Index n, const TargetDistribution<Scalar>& dist,
                                   const WalkParams<Scalar>& params, Rng& rng)
{
    require(n >= 0, "sample_points: negative sample count");
    require(params.walk_length >= 1, "sample_points: walk_length must be positive");
    if (is_boundary_walk(params.walk)) return boundary_sample(P, n, params, rng);
    detail::check_start(P, params.starting_point);
    if (params.walk == WalkKind::BiW && dist.is_gaussian())
        throw InputError("sample_points: BiW samples only the uniform distribution");
    TargetDistribution<Scalar> target = dist;
    if (target.is_gaussian() && target.mode.size() == 0) target.mode = params.starting_point;
    if (target.is_gaussian()) require_dim(target.mode, P.dimension(), "sample_points: mode");

    SampleMatrix<Scalar> out;
    out.points.resize(n, P.dimension());
    out.walk = params.walk;
    out.walk_length = params.walk_length;
    out.seed = rng.seed();
    if (n == 0) return out;
    RandomWalk<Body, Scalar> chain(P, params, target, params.starting_point);
    chain.advance(params.nburns * params.walk_length, rng);
    for (Index i = 0; i < n; ++i) {
        chain.advance(params.walk_length, rng);
        out.points.row(i) = chain.position().transpose();
    }
    return out;
}

/// Samples with every default filled in from the inner ball.
template <typename Body, typename Scalar>
SampleMatrix<Scalar> sample_points(const Body& P, Index n, const TargetDistribution<Scalar>& dist, Rng& rng)
{
    WalkParams<Scalar> params = default_walk_params(P, dist, rng);
    TargetDistribution<Scalar> target = dist;
    if (target.is_gaussian() && target.mode.size() == 0) target.mode = params.starting_point;
    return sample_points(P, n, target, params, rng);
}

template <typename Scalar>
SampleMatrix<Scalar> sample_points(const Polytope<Scalar>& P, Index n, const TargetDistribution<Scalar>& dist,
                                   const WalkParams<Scalar>& params, Rng& rng)
{
    return std::visit([&](const auto& q) { return sample_points(q, n, dist, params, rng); }, P);
}

// ---------------------------------------------------------------------------
// Direct samplers.

enum class DirectBody { unit_simplex, canonical_simplex, ball, hypersphere };

/// x_i = E_i / ΣE_j with E_i ~ Exp(1): uniform on {x >= 0, Σx = 1}.
template <typename Scalar>
Vec<Scalar> uniform_canonical_simplex(Index d, Rng& rng)
{
    Vec<Scalar> x(d);
    for (Index i = 0; i < d; ++i) x(i) = Scalar(-std::log(rng.uniform_open()));
    x /= x.sum();
    return x;
}

template <typename Scalar>
SampleMatrix<Scalar> direct_sampling(DirectBody body, Index d, Scalar radius, Index n, Rng& rng)
{
    require(d >= 1, "direct_sampling: dimension must be positive");
    require(n >= 0, "direct_sampling: negative sample count");
    require(radius > Scalar(0), "direct_sampling: radius must be positive");
    SampleMatrix<Scalar> out;
    out.points.resize(n, d);
    out.seed = rng.seed();
    out.walk_length = 0;
    for (Index i = 0; i < n; ++i) {
        switch (body) {
        case DirectBody::canonical_simplex: out.points.row(i) = uniform_canonical_simplex<Scalar>(d, rng).transpose(); break;
        case DirectBody::unit_simplex:
            out.points.row(i) = uniform_canonical_simplex<Scalar>(d + 1, rng).head(d).transpose();
            break;
        case DirectBody::ball: out.points.row(i) = uniform_in_ball<Scalar>(d, radius, rng).transpose(); break;
        case DirectBody::hypersphere: out.points.row(i) = (radius * rng.direction<Scalar>(d)).transpose(); break;
        }
    }
    return out;
}

}  // namespace polyvol
