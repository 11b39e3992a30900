#pragma once

// Multiphase Monte Carlo volume estimation.
//
//   vol(P) = base · Π factor_i
//
// SoB: concentric balls r·2^{i/d}, ratios by counting.
// CG:  Gaussians exp(-|x-c|^2 / 2σ_i^2) with σ_i increasing, then uniform.
// CB:  balls (or the PCA box of a zonotope) shrunk by annealing so each
//      consecutive ratio lies in [0.8, 0.85].

#include "polyvol/exact.hpp"
#include "polyvol/inner_ball.hpp"
#include "polyvol/lp.hpp"
#include "polyvol/polytope.hpp"
#include "polyvol/rng.hpp"
#include "polyvol/transforms.hpp"
#include "polyvol/truncated.hpp"
#include "polyvol/walks.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace polyvol {

enum class VolumeAlgorithm { SOB, CG, CB };

inline std::string to_string(VolumeAlgorithm a)
{
    switch (a) {
    case VolumeAlgorithm::SOB: return "SOB";
    case VolumeAlgorithm::CG: return "CG";
    case VolumeAlgorithm::CB: return "CB";
    }
    return "?";
}

/// Unset fields take their per-algorithm defaults.
template <typename Scalar>
struct VolumeSettings {
    std::optional<VolumeAlgorithm> algorithm;
    std::optional<Scalar> error;
    std::optional<WalkKind> walk;
    std::optional<int> walk_length;
    std::optional<int> win_len;
    std::optional<bool> hpoly;
    bool rounding = false;
    std::uint64_t seed = 0;
};

template <typename Scalar>
struct VolumeEstimate {
    Scalar value = 0;
    Scalar base = 0;               // closed-form measure of the innermost phase
    std::vector<Scalar> factors;   // value == base * Π factors
    std::vector<Scalar> schedule;  // radii, standard deviations or box scales
    std::size_t samples = 0;
    VolumeAlgorithm algorithm = VolumeAlgorithm::CB;
};

namespace detail {

template <typename Scalar>
Scalar telescope(Scalar base, const std::vector<Scalar>& factors)
{
    Scalar v = base;
    for (Scalar f : factors) v *= f;
    return v;
}

template <typename Body>
constexpr bool is_zonotope_v = false;
template <typename Scalar>
constexpr bool is_zonotope_v<Zonotope<Scalar>> = true;

}  // namespace detail

// ---------------------------------------------------------------------------
// Enclosing radius: P ⊆ B(center, ρ).

/// H: the LP bounding box (2d LPs) gives the farthest corner from the
/// center, so the bound is certified rather than probed.
template <typename Scalar>
Scalar enclosing_radius(const HPolytope<Scalar>& P, const Vec<Scalar>& center)
{
    const Index d = P.dimension();
    LinearProgram<Scalar> lp(d);
    lp.ineq_rows = P.A;
    lp.ineq_rhs = P.b;
    Vec<Scalar> far(d);
    for (Index i = 0; i < d; ++i) {
        Scalar ext[2];
        for (int s = 0; s < 2; ++s) {
            lp.objective.setZero();
            lp.objective(i) = s == 0 ? Scalar(1) : Scalar(-1);
            LPResult<Scalar> r = solve_lp(lp);
            if (r.status == LPStatus::unbounded) throw UnboundedError("enclosing_radius: polytope is unbounded");
            if (r.status == LPStatus::infeasible) throw InfeasibleError("enclosing_radius: polytope is empty");
            ext[s] = r.objective_value;
        }
        far(i) = std::max(std::abs(ext[0] - center(i)), std::abs(-ext[1] - center(i)));
    }
    return far.norm();
}

template <typename Scalar>
Scalar enclosing_radius(const VPolytope<Scalar>& P, const Vec<Scalar>& center)
{
    return (P.V.rowwise() - center.transpose()).rowwise().norm().maxCoeff();
}

template <typename Scalar>
Scalar enclosing_radius(const Zonotope<Scalar>& P, const Vec<Scalar>& center)
{
    return center.norm() + P.G.rowwise().norm().sum();
}

template <typename Scalar>
Scalar enclosing_radius(const VPolyIntersection<Scalar>& P, const Vec<Scalar>& center)
{
    return std::min(enclosing_radius(P.first(), center), enclosing_radius(P.second(), center));
}

template <typename Scalar>
Scalar enclosing_radius(const Polytope<Scalar>& P, const Vec<Scalar>& center)
{
    return std::visit([&](const auto& q) { return enclosing_radius(q, center); }, P);
}

// ---------------------------------------------------------------------------
// Convergence helpers.

/// Running mean with the sliding-window stopping rule: converged once the
/// last `window` running means span at most 2·tol·mean.
template <typename Scalar>
class WindowedMean {
public:
    WindowedMean(int window, Scalar tol) : window_(std::max(window, 1)), tol_(tol) {}

    void add(Scalar x)
    {
        ++n_;
        sum_ += x;
        const Scalar m = sum_ / Scalar(n_);
        // monotone deques of (index, mean) give the window extrema in O(1)
        while (!lo_.empty() && lo_.back().second >= m) lo_.pop_back();
        while (!hi_.empty() && hi_.back().second <= m) hi_.pop_back();
        lo_.emplace_back(n_, m);
        hi_.emplace_back(n_, m);
        const std::size_t first = n_ > std::size_t(window_) ? n_ - std::size_t(window_) + 1 : 1;
        while (lo_.front().first < first) lo_.pop_front();
        while (hi_.front().first < first) hi_.pop_front();
    }

    Scalar mean() const { return n_ ? sum_ / Scalar(n_) : Scalar(0); }
    std::size_t count() const { return n_; }

    bool converged() const
    {
        if (n_ < std::size_t(window_)) return false;
        return (hi_.front().second - lo_.front().second) / 2 <= tol_ * std::abs(mean());
    }

private:
    int window_;
    Scalar tol_;
    std::size_t n_ = 0;
    Scalar sum_ = 0;
    std::deque<std::pair<std::size_t, Scalar>> lo_, hi_;
};

/// Student-t 95% interval over batch means.
template <typename Scalar>
std::pair<Scalar, Scalar> t_interval(const std::vector<Scalar>& batch_means, std::size_t batch_size)
{
    const std::size_t B = batch_means.size();
    Scalar mean = 0;
    for (Scalar m : batch_means) mean += m;
    mean /= Scalar(B);
    Scalar var = 0;
    for (Scalar m : batch_means) var += (m - mean) * (m - mean);
    var = B > 1 ? var / Scalar(B - 1) : Scalar(0);
    // degenerate spread (e.g. every batch fully inside): fall back to the
    // binomial variance of a batch with a half-count continuity correction
    Scalar p = std::clamp(mean, Scalar(0.5) / Scalar(batch_size), 1 - Scalar(0.5) / Scalar(batch_size));
    var = std::max(var, p * (1 - p) / Scalar(batch_size));
    thread_local std::vector<double> quantiles;
    double q = 1.96;
    if (B > 1) {
        if (quantiles.size() < B) quantiles.resize(B, 0.0);
        if (quantiles[B - 1] == 0.0)
            quantiles[B - 1] = quantile(boost::math::students_t_distribution<double>(double(B - 1)), 0.975);
        q = quantiles[B - 1];
    }
    Scalar half = Scalar(q) * std::sqrt(var / Scalar(B));
    return {mean - half, mean + half};
}

namespace detail {

template <typename Scalar>
WalkParams<Scalar> engine_walk(WalkKind walk, int walk_length, Index d, const Ball<Scalar>& ball)
{
    WalkParams<Scalar> w = default_walk_params<Scalar>(d, false, ball, TargetDistribution<Scalar>::uniform());
    w.walk = walk;
    w.walk_length = walk_length;
    return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sequence of balls.

/// Points per phase: 400·d·ln d / ε². The d ln d factor keeps the product of q ~ d log(ρ/r) ratios within ε.
inline std::size_t sob_points_per_phase(Index d, double eps)
{
    double dl = d > 2 ? double(d) * std::log(double(d)) : 1.0;
    return static_cast<std::size_t>(std::ceil(400.0 * dl / (eps * eps)));
}

template <typename Body, typename Scalar>
VolumeEstimate<Scalar> volume_sob(const Body& P, Scalar eps, WalkKind walk, int walk_length, Rng& rng)
{
    require(eps > Scalar(0), "volume_sob: error must be positive");
    if (is_boundary_walk(walk)) throw InputError("volume_sob: boundary walks cannot drive a volume estimate");
    const Index d = P.dimension();
    Ball<Scalar> ball = inner_ball(P, rng);
    const Vec<Scalar>& c = ball.center;
    const Scalar r = ball.radius;
    const Scalar rho = enclosing_radius(P, c);

    VolumeEstimate<Scalar> est;
    est.algorithm = VolumeAlgorithm::SOB;
    est.base = std::exp(BallGauge<Scalar>{c, r}.log_volume());
    const Index q = rho > r ? static_cast<Index>(std::ceil(Scalar(d) * std::log2(rho / r))) : 0;
    std::vector<Scalar> radii(std::size_t(q + 1));
    for (Index i = 0; i <= q; ++i) radii[std::size_t(i)] = r * std::pow(Scalar(2), Scalar(i) / Scalar(d));
    est.schedule = radii;

    const std::size_t N = sob_points_per_phase(d, double(eps));
    WalkParams<Scalar> wp = detail::engine_walk(walk, walk_length, d, ball);
    std::vector<Vec<Scalar>> pts;
    Vec<Scalar> start = c;
    for (Index i = q; i >= 1; --i) {
        auto body = truncate(P, BallGauge<Scalar>{c, radii[std::size_t(i)]});
        RandomWalk<decltype(body), Scalar> chain(body, wp, TargetDistribution<Scalar>::uniform(), start);
        if (i == q) chain.advance(10 * walk_length, rng);
        while (pts.size() < N) {
            chain.advance(walk_length, rng);
            pts.push_back(chain.position());
        }
        est.samples += N;
        const Scalar inner = radii[std::size_t(i - 1)];
        std::vector<Vec<Scalar>> kept;
        for (const auto& x : pts)
            if ((x - c).norm() <= inner) kept.push_back(x);
        if (kept.empty()) throw NumericalError("volume_sob: no sample fell into the next ball");
        est.factors.push_back(Scalar(N) / Scalar(kept.size()));
        start = kept.back();
        pts = std::move(kept);
    }
    est.value = detail::telescope(est.base, est.factors);
    return est;
}

// ---------------------------------------------------------------------------
// Cooling Gaussians.

/// σ0 with Σ_i Q(dist_i / σ0) = ε, Q the standard normal tail; the
/// union bound then keeps the mass of N(c, σ0²) outside P below ε.
template <typename Scalar>
Scalar cg_initial_sigma(const HPolytope<Scalar>& P, const Vec<Scalar>& c, Scalar eps, Scalar hi)
{
    Vec<Scalar> dist = (P.b - P.A * c).cwiseQuotient(P.A.rowwise().norm());
    static const boost::math::normal_distribution<double> standard;
    auto leak = [&](Scalar s) {
        double tot = 0;
        for (Index i = 0; i < dist.size(); ++i) tot += cdf(complement(standard, double(dist(i) / s)));
        return Scalar(tot);
    };
    if (leak(hi) <= eps) return hi;
    Scalar lo = dist.minCoeff() * Scalar(1e-3);
    for (int it = 0; it < 200 && hi - lo > Scalar(1e-12) * hi; ++it) {
        Scalar mid = Scalar(0.5) * (lo + hi);
        if (leak(mid) > eps)
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

template <typename Scalar>
VolumeEstimate<Scalar> volume_cg(const HPolytope<Scalar>& P, Scalar eps, WalkKind walk, int walk_length, int win_len,
                                 Rng& rng)
{
    require(eps > Scalar(0), "volume_cg: error must be positive");
    if (walk == WalkKind::BiW) throw InputError("volume_cg: BiW samples only uniform targets, choose CDHR, RDHR or BaW");
    if (is_boundary_walk(walk)) throw InputError("volume_cg: boundary walks cannot drive a volume estimate");
    const Index d = P.dimension();
    Ball<Scalar> ball = inner_ball(P);
    const Vec<Scalar>& c = ball.center;
    const Scalar rho = enclosing_radius(P, c);

    VolumeEstimate<Scalar> est;
    est.algorithm = VolumeAlgorithm::CG;
    const Scalar sigma0 = cg_initial_sigma(P, c, eps, rho);
    std::vector<Scalar> var{sigma0 * sigma0};
    const Scalar growth = 1 + 1 / std::sqrt(Scalar(d));
    while (std::sqrt(var.back()) <= rho) var.push_back(var.back() * growth);
    for (Scalar v : var) est.schedule.push_back(std::sqrt(v));

    // ∫_P f0 = (2πσ0²)^{d/2} · Pr[N(c, σ0²) ∈ P]
    const std::size_t n_direct = 20000;
    std::size_t inside = 0;
    for (std::size_t k = 0; k < n_direct; ++k)
        if (membership(P, Vec<Scalar>(c + sigma0 * rng.gaussian_vector<Scalar>(d)))) ++inside;
    est.samples += n_direct;
    est.base = std::pow(2 * Scalar(M_PI) * var.front(), Scalar(d) / 2) * Scalar(inside) / Scalar(n_direct);

    const std::size_t phases = var.size();  // q Gaussian ratios plus the uniform one
    const Scalar tol = eps / std::sqrt(Scalar(phases));
    WalkParams<Scalar> wp = detail::engine_walk(walk, walk_length, d, ball);
    Vec<Scalar> pos = c;
    const std::size_t cap = 20000000;
    for (std::size_t i = 0; i < phases; ++i) {
        const Scalar a_i = 1 / (2 * var[i]);
        const Scalar a_next = i + 1 < phases ? 1 / (2 * var[i + 1]) : Scalar(0);
        TargetDistribution<Scalar> target = TargetDistribution<Scalar>::gaussian(c, var[i]);
        wp.baw_radius = 4 * ball.radius / std::sqrt(std::max(Scalar(1), a_i) * Scalar(d));
        RandomWalk<HPolytope<Scalar>, Scalar> chain(P, wp, target, pos);
        chain.advance(static_cast<int>(d) * walk_length, rng);
        WindowedMean<Scalar> acc(win_len, tol);
        while (!acc.converged()) {
            if (acc.count() >= cap) throw NumericalError("volume_cg: ratio estimate did not settle");
            chain.advance(walk_length, rng);
            acc.add(std::exp((a_i - a_next) * (chain.position() - c).squaredNorm()));
        }
        est.samples += acc.count();
        est.factors.push_back(acc.mean());
        pos = chain.position();
    }
    est.value = detail::telescope(est.base, est.factors);
    return est;
}

template <typename Body, typename Scalar>
VolumeEstimate<Scalar> volume_cg(const Body&, Scalar, WalkKind, int, int, Rng&)
{
    throw InputError("volume_cg: the initial Gaussian needs facet normals; convert to an H-polytope or use CB");
}

// ---------------------------------------------------------------------------
// Cooling bodies.

template <typename Scalar>
struct CoolingOptions {
    Scalar ratio_lo = Scalar(0.8);
    Scalar ratio_hi = Scalar(0.85);
    std::size_t batch = 125;
    int max_bisections = 100;
    std::size_t max_batches = 400;
};

namespace detail {

// Gauge values of a chain, kept sorted within each batch so the fraction at
// or below a scale costs O(B log batch).
template <typename Scalar>
class BatchedValues {
public:
    explicit BatchedValues(std::size_t batch) : batch_(batch) {}

    void add_batch(std::vector<Scalar> values)
    {
        std::sort(values.begin(), values.end());
        batches_.push_back(std::move(values));
    }

    std::size_t batches() const { return batches_.size(); }
    std::size_t size() const { return batches_.size() * batch_; }

    std::pair<Scalar, Scalar> fraction_interval(Scalar s) const
    {
        std::vector<Scalar> means;
        means.reserve(batches_.size());
        for (const auto& b : batches_)
            means.push_back(Scalar(std::upper_bound(b.begin(), b.end(), s) - b.begin()) / Scalar(batch_));
        return t_interval(means, batch_);
    }

private:
    std::size_t batch_;
    std::vector<std::vector<Scalar>> batches_;
};

enum class Verdict { inside, too_big, too_small, undecided };

template <typename Scalar>
Verdict judge(std::pair<Scalar, Scalar> ci, const CoolingOptions<Scalar>& o)
{
    if (ci.first >= o.ratio_lo && ci.second <= o.ratio_hi) return Verdict::inside;
    if (ci.first > o.ratio_hi) return Verdict::too_big;    // fraction too high: shrink further
    if (ci.second < o.ratio_lo) return Verdict::too_small;
    return Verdict::undecided;
}

// Bisection on the scale until the interval of the fraction at or below s
// fits the ratio window. Returns nullopt when max_bisections steps do not
// produce a fit, i.e. more points are needed.
template <typename Scalar>
std::optional<Scalar> bisect_scale(const BatchedValues<Scalar>& values, Scalar s_lo, Scalar s_hi,
                                   const CoolingOptions<Scalar>& o)
{
    const Scalar target = (o.ratio_lo + o.ratio_hi) / 2;
    std::pair<Scalar, Scalar> ci{0, 1};
    for (int steps = 0; steps < o.max_bisections; ++steps) {
        Scalar mid = Scalar(0.5) * (s_lo + s_hi);
        ci = values.fraction_interval(mid);
        if (judge(ci, o) == Verdict::inside) return mid;
        if ((ci.first + ci.second) / 2 > target)
            s_hi = mid;
        else
            s_lo = mid;
    }
    // the crossing is pinned down to the resolution of the sample; the
    // interval there is still too wide or off-center
    return std::nullopt;
}

}  // namespace detail

/// Cooling bodies over a gauge family G(s) with P ⊆ G(s_max).
template <typename Body, typename Gauge, typename Scalar>
VolumeEstimate<Scalar> cooling_bodies(const Body& P, const Gauge& family, Scalar s_min, Scalar s_max,
                                      const Vec<Scalar>& start, const Ball<Scalar>& ball, Scalar eps, WalkKind walk,
                                      int walk_length, int win_len, Rng& rng, const CoolingOptions<Scalar>& o = {})
{
    const Index d = P.dimension();
    VolumeEstimate<Scalar> est;
    est.algorithm = VolumeAlgorithm::CB;

    // Innermost body G(s0): a fraction of G(s0) in [r, r+δ] lies in P.
    auto direct_fraction = [&](Scalar s, std::vector<Scalar>& batch_means) {
        Gauge g = family.scaled(s);
        std::size_t in = 0;
        for (std::size_t j = 0; j < o.batch; ++j) in += membership(P, g.sample(rng));
        est.samples += o.batch;
        batch_means.push_back(Scalar(in) / Scalar(o.batch));
    };
    auto judge_direct = [&](Scalar s) {
        std::vector<Scalar> means;
        for (int k = 0; k < 4; ++k) direct_fraction(s, means);
        while (true) {
            auto ci = t_interval(means, o.batch);
            detail::Verdict v = detail::judge(ci, o);
            if (v != detail::Verdict::undecided || means.size() >= o.max_batches) return std::make_pair(v, ci);
            direct_fraction(s, means);
        }
    };

    Scalar s0;
    {
        auto [v_max, ci_max] = judge_direct(s_max);
        if (v_max == detail::Verdict::inside || v_max == detail::Verdict::too_big ||
            (ci_max.first + ci_max.second) / 2 >= o.ratio_lo) {
            s0 = s_max;
        } else {
            Scalar lo = s_min, hi = s_max;
            int steps = 0;
            while (true) {
                if (++steps > o.max_bisections)
                    throw NumericalError("volume_cb: could not place the innermost body");
                Scalar mid = Scalar(0.5) * (lo + hi);
                auto [v, ci] = judge_direct(mid);
                if (v == detail::Verdict::inside) {
                    s0 = mid;
                    break;
                }
                if (v == detail::Verdict::too_big || (v == detail::Verdict::undecided &&
                                                      (ci.first + ci.second) / 2 > (o.ratio_lo + o.ratio_hi) / 2))
                    lo = mid;
                else
                    hi = mid;
            }
        }
    }

    // Annealing from the outside in: scales s_max = s_0 > s_1 > ... > s0.
    WalkParams<Scalar> wp = detail::engine_walk(walk, walk_length, d, ball);
    std::vector<Scalar> scales{s_max};
    std::vector<Vec<Scalar>> starts{start};
    Vec<Scalar> pos = start;
    bool first = true;
    while (scales.back() > s0) {
        auto body = truncate(P, family.scaled(scales.back()));
        RandomWalk<decltype(body), Scalar> chain(body, wp, TargetDistribution<Scalar>::uniform(), pos);
        if (first) chain.advance(static_cast<int>(10 * d) * walk_length, rng);
        first = false;
        detail::BatchedValues<Scalar> values(o.batch);
        auto add_batch = [&] {
            std::vector<Scalar> v(o.batch);
            for (std::size_t j = 0; j < o.batch; ++j) {
                chain.advance(walk_length, rng);
                v[j] = family.value(chain.position());
            }
            values.add_batch(std::move(v));
            est.samples += o.batch;
        };
        for (int k = 0; k < 8; ++k) add_batch();
        starts.back() = chain.position();

        Scalar next = 0;
        while (true) {
            auto ci0 = values.fraction_interval(s0);
            if ((ci0.first + ci0.second) / 2 >= o.ratio_lo && ci0.second - ci0.first <= o.ratio_hi - o.ratio_lo) {
                next = s0;
                break;
            }
            std::optional<Scalar> s = detail::bisect_scale(values, s0, scales.back(), o);
            if (s) {
                next = *s;
                break;
            }
            if (values.batches() >= o.max_batches)
                throw NumericalError("volume_cb: annealing could not bracket a ratio in [r, r+δ]");
            add_batch();
        }
        // move the chain inside the next body
        pos = chain.position();
        if (family.value(pos) > next) {
            bool found = false;
            for (int k = 0; k < 100000 && !found; ++k) {
                chain.advance(1, rng);
                found = family.value(chain.position()) <= next * (1 - Scalar(1e-9));
            }
            if (!found) throw NumericalError("volume_cb: chain could not enter the next body");
            pos = chain.position();
        }
        scales.push_back(next);
        starts.push_back(pos);
    }
    est.schedule = scales;

    // Ratio estimation.
    const std::size_t n_ratios = scales.size();  // annealing ratios plus the direct one
    const Scalar tol = eps / std::sqrt(Scalar(n_ratios));
    for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
        auto body = truncate(P, family.scaled(scales[i]));
        RandomWalk<decltype(body), Scalar> chain(body, wp, TargetDistribution<Scalar>::uniform(), starts[i]);
        WindowedMean<Scalar> acc(win_len, tol);
        while (!acc.converged()) {
            chain.advance(walk_length, rng);
            acc.add(family.value(chain.position()) <= scales[i + 1] ? Scalar(1) : Scalar(0));
        }
        est.samples += acc.count();
        if (acc.mean() <= Scalar(0)) throw NumericalError("volume_cb: empty ratio estimate");
        est.factors.push_back(1 / acc.mean());
    }
    {
        Gauge g = family.scaled(s0);
        WindowedMean<Scalar> acc(win_len, tol);
        while (!acc.converged()) acc.add(membership(P, g.sample(rng)) ? Scalar(1) : Scalar(0));
        est.samples += acc.count();
        if (acc.mean() <= Scalar(0)) throw NumericalError("volume_cb: innermost body misses the polytope");
        est.factors.push_back(acc.mean());
        est.base = std::exp(g.log_volume());
    }
    est.value = detail::telescope(est.base, est.factors);
    return est;
}

template <typename Body, typename Scalar>
VolumeEstimate<Scalar> volume_cb(const Body& P, Scalar eps, WalkKind walk, int walk_length, int win_len, bool hpoly,
                                 Rng& rng)
{
    require(eps > Scalar(0), "volume_cb: error must be positive");
    if (is_boundary_walk(walk)) throw InputError("volume_cb: boundary walks cannot drive a volume estimate");
    Ball<Scalar> ball = inner_ball(P, rng);
    if (hpoly) {
        if constexpr (detail::is_zonotope_v<Body>) {
            BoxGauge<Scalar> box = pca_box(P);
            // the box scaled by s_min sits inside the inscribed ball
            Scalar s_min = ball.radius / box.half_widths.norm();
            return cooling_bodies(P, box, s_min, Scalar(1), Vec<Scalar>(ball.center), ball, eps, walk, walk_length,
                                  win_len, rng);
        } else {
            throw InputError("volume_cb: hpoly applies to zonotopes only");
        }
    }
    const Scalar rho = enclosing_radius(P, ball.center);
    BallGauge<Scalar> family{ball.center, rho};
    return cooling_bodies(P, family, ball.radius, rho, Vec<Scalar>(ball.center), ball, eps, walk, walk_length,
                          win_len, rng);
}

// ---------------------------------------------------------------------------
// Dispatch.

template <typename Scalar>
struct ResolvedSettings {
    VolumeAlgorithm algorithm;
    Scalar error;
    WalkKind walk;
    int walk_length;
    int win_len;
    bool hpoly;
};

template <typename Body, typename Scalar>
ResolvedSettings<Scalar> resolve_settings(const Body& P, const VolumeSettings<Scalar>& s)
{
    const Index d = P.dimension();
    constexpr bool is_h = is_hpolytope_v<Body>;
    ResolvedSettings<Scalar> r;
    r.algorithm = s.algorithm.value_or(is_h && d > 200 ? VolumeAlgorithm::CG : VolumeAlgorithm::CB);
    const bool sob = r.algorithm == VolumeAlgorithm::SOB;
    r.error = s.error.value_or(sob ? Scalar(1) : Scalar(0.1));
    r.walk = s.walk.value_or(is_h ? WalkKind::CDHR : WalkKind::BiW);
    if (r.algorithm == VolumeAlgorithm::CG && !s.walk) r.walk = is_h ? WalkKind::CDHR : WalkKind::RDHR;
    r.walk_length = s.walk_length.value_or(sob ? static_cast<int>(std::floor(10.0 + double(d) / 10.0)) : 1);
    // the window stop rule has to outlast the chain's autocorrelation, which
    // grows with d and with the aspect ratio of the body
    const int di = static_cast<int>(d);
    r.win_len = s.win_len.value_or(r.algorithm == VolumeAlgorithm::CB ? std::max(40000, 1000 * di) : 250 * di);
    bool hp = false;
    if constexpr (detail::is_zonotope_v<Body>) hp = P.order() < 5;
    r.hpoly = s.hpoly.value_or(hp);
    require(r.error > Scalar(0), "volume: error must be positive");
    require(r.walk_length >= 1, "volume: walk length must be positive");
    require(r.win_len >= 1, "volume: window length must be positive");
    return r;
}

template <typename Body, typename Scalar>
VolumeEstimate<Scalar> run_engine(const Body& P, const ResolvedSettings<Scalar>& r, Rng& rng)
{
    switch (r.algorithm) {
    case VolumeAlgorithm::SOB: return volume_sob(P, r.error, r.walk, r.walk_length, rng);
    case VolumeAlgorithm::CG: return volume_cg(P, r.error, r.walk, r.walk_length, r.win_len, rng);
    case VolumeAlgorithm::CB: return volume_cb(P, r.error, r.walk, r.walk_length, r.win_len, r.hpoly, rng);
    }
    throw InputError("volume: unknown algorithm");
}

/// Full estimate with its telescoping record. With rounding, the engine runs
/// on the rounded body and the value is divided by |det T| once.
template <typename Scalar>
VolumeEstimate<Scalar> volume_estimate(const Polytope<Scalar>& P, const VolumeSettings<Scalar>& settings = {})
{
    Rng rng(settings.seed);
    if (settings.rounding) {
        RoundingResult<Scalar> rr = round_polytope(P, rng);
        VolumeEstimate<Scalar> est = std::visit(
            [&](const auto& q) { return run_engine(q, resolve_settings(q, settings), rng); }, rr.rounded);
        est.factors.push_back(1 / std::abs(rr.det));
        est.value = detail::telescope(est.base, est.factors);
        return est;
    }
    return std::visit([&](const auto& q) { return run_engine(q, resolve_settings(q, settings), rng); }, P);
}

template <typename Scalar>
Scalar volume(const Polytope<Scalar>& P, const VolumeSettings<Scalar>& settings = {})
{
    return volume_estimate(P, settings).value;
}

}  // namespace polyvol
