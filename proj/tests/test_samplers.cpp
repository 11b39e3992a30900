#include "support.hpp"

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

using namespace testing;

namespace {

HPolytope<double> cube(Index d, double half = 1)
{
    auto C = std::get<HPolytope<double>>(gen_cube<double>(d, Representation::H));
    C.b *= half;
    return C;
}

std::vector<long> grid_counts(const Mat<double>& X, double lo, double hi, int bins)
{
    std::vector<long> counts(std::size_t(bins * bins), 0);
    auto cell = [&](double x) { return std::clamp(int((x - lo) / (hi - lo) * bins), 0, bins - 1); };
    for (Index i = 0; i < X.rows(); ++i) counts[std::size_t(cell(X(i, 0)) * bins + cell(X(i, 1)))]++;
    return counts;
}

WalkParams<double> params_for(WalkKind w, int len, Index d)
{
    WalkParams<double> p;
    p.walk = w;
    p.walk_length = len;
    p.starting_point = Vec<double>::Zero(d);
    p.baw_radius = 4 / std::sqrt(double(d));
    p.biw_max_length = 2 * double(d);
    p.biw_reflection_bound = int(10 * d);
    return p;
}

// 1% two-sided KS critical value, asymptotic
double ks_critical(double n) { return 1.628 / std::sqrt(n); }

}  // namespace

TEST_CASE("default walk parameters")
{
    Rng rng(1);
    auto C10 = cube(10);
    auto w = default_walk_params(C10, TargetDistribution<double>::uniform(), rng);
    CHECK(w.walk == WalkKind::BiW);
    CHECK(w.walk_length == 5);
    CHECK(w.biw_max_length == doctest::Approx(20));
    CHECK(w.starting_point.norm() <= 1e-9);
    CHECK(w.nburns == 0);

    auto C100 = cube(100);
    w = default_walk_params(C100, TargetDistribution<double>::gaussian(Vec<double>::Zero(100), 1.0), rng);
    CHECK(w.walk == WalkKind::CDHR);
    CHECK(w.walk_length == 20);
    CHECK(w.baw_radius == doctest::Approx(0.4));

    auto V = std::get<VPolytope<double>>(gen_cross<double>(3, Representation::V));
    w = default_walk_params(V, TargetDistribution<double>::gaussian(Vec<double>::Zero(3)), rng);
    CHECK(w.walk == WalkKind::RDHR);
}

TEST_CASE("RDHR on the segment is uniform")
{
    auto C = cube(1);
    Rng rng(2);
    Vec<double> p = Vec<double>::Zero(1);
    std::vector<double> xs;
    double mean = 0;
    for (int i = 0; i < 100000; ++i) {
        p = rdhr_step(C, p, TargetDistribution<double>::uniform(), rng);
        REQUIRE(membership(C, p));
        xs.push_back(p(0));
        mean += p(0);
    }
    mean /= 1e5;
    CHECK(std::abs(mean) <= 0.02);
    CHECK(ks_uniform(xs, -1, 1) <= ks_critical(1e5));
}

TEST_CASE("a very flat Gaussian target matches the uniform chord law")
{
    auto C = cube(1);
    Rng rng(3);
    auto flat = TargetDistribution<double>::gaussian(Vec<double>::Zero(1), 1e6);
    Vec<double> p = Vec<double>::Zero(1);
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) {
        p = rdhr_step(C, p, flat, rng);
        xs.push_back(p(0));
    }
    CHECK(ks_uniform(xs, -1, 1) <= ks_critical(20000));
}

TEST_CASE("CDHR moves one coordinate and keeps its cache exact")
{
    auto C = cube(2);
    Rng rng(4);
    Vec<double> p = Vec<double>::Zero(2);
    auto cache = make_coordinate_cache(C, p);
    for (int i = 0; i < 1000; ++i) {
        Vec<double> q = cdhr_step(C, p, TargetDistribution<double>::uniform(), rng, cache);
        CHECK(((q - p).array() != 0).count() <= 1);
        CHECK((cache.Ap - C.A * q).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(membership(C, q));
        p = q;
    }
}

TEST_CASE("ball walk")
{
    auto C = cube(2);
    Rng rng(5);
    // proposals from the origin with δ = 0.5 never leave the square
    Vec<double> p = Vec<double>::Zero(2);
    int moved = 0;
    for (int i = 0; i < 1000; ++i) moved += ball_walk_step(C, p, 0.5, TargetDistribution<double>::uniform(), rng) != p;
    CHECK(moved == 1000);

    // uphill proposals toward the mode are never rejected
    auto g = TargetDistribution<double>::gaussian(vec({0, 0}), 0.1);
    Vec<double> q = vec({0.3, 0});
    int uphill = 0;
    for (int i = 0; i < 1000; ++i) {
        Rng replay = rng;
        Vec<double> proposal = q + uniform_in_ball<double>(2, 0.1, replay);
        Vec<double> x = ball_walk_step(C, q, 0.1, g, rng);
        if (g.log_density(proposal) >= g.log_density(q)) {
            ++uphill;
            CHECK(x == proposal);
        }
    }
    CHECK(uphill > 100);
}

TEST_CASE("ball walk reproduces a truncated normal mean")
{
    auto C = cube(1);
    Rng rng(6);
    const double mu = 0.5, sigma = 0.2;
    auto g = TargetDistribution<double>::gaussian(vec({mu}), sigma * sigma);
    boost::math::normal N;
    const double a = (-1 - mu) / sigma, b = (1 - mu) / sigma;
    const double Z = boost::math::cdf(N, b) - boost::math::cdf(N, a);
    const double expected = mu + sigma * (boost::math::pdf(N, a) - boost::math::pdf(N, b)) / Z;
    Vec<double> p = vec({mu});
    double s = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        p = ball_walk_step(C, p, 0.3, g, rng);
        s += p(0);
    }
    CHECK(std::abs(s / n - expected) <= 0.02);
}

TEST_CASE("billiard walk by hand")
{
    auto C = cube(1);
    BilliardTrace<double> trace;
    Vec<double> p = billiard_trajectory(C, vec({0}), vec({1}), 0.5, 10, &trace);
    CHECK(p(0) == doctest::Approx(0.5));
    CHECK(trace.reflections == 0);

    trace = {};
    p = billiard_trajectory(C, vec({0}), vec({1}), 1.6, 10, &trace);
    CHECK(std::abs(p(0) - 0.4) <= 1e-9);
    CHECK(trace.reflections == 1);

    trace = {};
    Vec<double> p0 = vec({0.25});
    p = billiard_trajectory(C, p0, vec({1}), 100.0, 3, &trace);
    CHECK(trace.aborted);
    CHECK(p(0) == p0(0));
}

TEST_CASE("sample_points contracts")
{
    auto C = cube(2);
    Rng rng(7);
    CHECK(sample_points(C, 0, TargetDistribution<double>::uniform(), rng).size() == 0);

    auto S = sample_points(C, 10000, TargetDistribution<double>::uniform(), rng);
    CHECK(S.walk == WalkKind::BiW);
    for (Index i = 0; i < S.size(); ++i) REQUIRE(membership(C, Vec<double>(S.points.row(i).transpose())));
    Vec<double> m = S.points.colwise().mean();
    CHECK(std::abs(m(0)) <= 0.03);
    CHECK(std::abs(m(1)) <= 0.03);

    Rng a(99), b(99);
    auto x = sample_points(C, 50, TargetDistribution<double>::uniform(), a);
    auto y = sample_points(C, 50, TargetDistribution<double>::uniform(), b);
    CHECK(x.points == y.points);

    auto bad = params_for(WalkKind::RDHR, 1, 2);
    bad.starting_point = vec({2, 0});
    CHECK_THROWS_AS(sample_points(C, 5, TargetDistribution<double>::uniform(), bad, rng), InputError);
    auto biw = params_for(WalkKind::BiW, 1, 2);
    CHECK_THROWS_AS(sample_points(C, 5, TargetDistribution<double>::gaussian(vec({0, 0})), biw, rng), InputError);
}

TEST_CASE("every walk samples the square uniformly")
{
    auto C = cube(2);
    const double crit = chi2_critical(99, 0.01);
    const std::pair<WalkKind, int> walks[] = {
        {WalkKind::RDHR, 10}, {WalkKind::CDHR, 10}, {WalkKind::BaW, 20}, {WalkKind::BiW, 5}};
    for (auto [w, len] : walks) {
        Rng rng(8);
        auto S = sample_points(C, 100000, TargetDistribution<double>::uniform(), params_for(w, len, 2), rng);
        const double stat = chi2_uniform(grid_counts(S.points, -1, 1, 10));
        INFO(to_string(w), " chi2 = ", stat);
        CHECK(stat <= crit);
    }
}

TEST_CASE("Gaussian targets reproduce the variance on a large box")
{
    auto B = cube(3, 50);
    const double var = 1.0;
    for (WalkKind w : {WalkKind::RDHR, WalkKind::CDHR, WalkKind::BaW}) {
        Rng rng(9);
        auto p = params_for(w, w == WalkKind::BaW ? 10 : 3, 3);
        p.baw_radius = 1.5;
        p.nburns = 100;
        auto S = sample_points(B, 40000, TargetDistribution<double>::gaussian(Vec<double>::Zero(3), var), p, rng);
        Vec<double> mean = S.points.colwise().mean();
        Mat<double> centered = S.points.rowwise() - mean.transpose();
        Vec<double> v = centered.colwise().squaredNorm() / double(S.size() - 1);
        INFO(to_string(w), " variances ", v.transpose());
        for (Index i = 0; i < 3; ++i) CHECK(std::abs(v(i) / var - 1) <= 0.05);
    }
}

TEST_CASE("boundary samplers")
{
    auto C = cube(2);
    Rng rng(10);
    auto p = params_for(WalkKind::BCDHR, 1, 2);
    auto S = sample_points(C, 100001, TargetDistribution<double>::uniform(), p, rng);
    CHECK(S.size() == 100001);
    std::vector<long> edges(4, 0);
    for (Index i = 0; i < S.size(); ++i) {
        const double x = S.points(i, 0), y = S.points(i, 1);
        const bool on = std::abs(std::abs(x) - 1) <= 1e-7 || std::abs(std::abs(y) - 1) <= 1e-7;
        REQUIRE(on);
        if (std::abs(x - 1) <= 1e-7) edges[0]++;
        else if (std::abs(x + 1) <= 1e-7) edges[1]++;
        else if (std::abs(y - 1) <= 1e-7) edges[2]++;
        else edges[3]++;
    }
    CHECK(chi2_uniform(edges) <= chi2_critical(3, 0.01));

    auto Z = gen_rand_zonotope<double>(3, 6, SubGenerator::uniform, 1);
    auto pr = params_for(WalkKind::BRDHR, 1, 3);
    pr.starting_point = inner_ball(Z).center;
    auto B = sample_points(Z, 21, TargetDistribution<double>::uniform(), pr, rng);
    CHECK(B.size() == 21);
    for (Index i = 0; i < B.size(); ++i) {
        Vec<double> x = B.points.row(i).transpose();
        CHECK(membership(Z, Vec<double>(inner_ball(Z).center + (x - inner_ball(Z).center) * (1 - 1e-6))));
        CHECK_FALSE(membership(Z, Vec<double>(inner_ball(Z).center + (x - inner_ball(Z).center) * (1 + 1e-6))));
    }
}

TEST_CASE("direct samplers")
{
    Rng rng(11);
    auto S = direct_sampling<double>(DirectBody::canonical_simplex, 7, 1.0, 1000, rng);
    for (Index i = 0; i < S.size(); ++i) {
        CHECK(std::abs(S.points.row(i).sum() - 1) <= 1e-12);
        CHECK(S.points.row(i).minCoeff() >= 0);
    }
    S = direct_sampling<double>(DirectBody::unit_simplex, 4, 1.0, 1000, rng);
    for (Index i = 0; i < S.size(); ++i) {
        CHECK(S.points.row(i).sum() <= 1 + 1e-12);
        CHECK(S.points.row(i).minCoeff() >= 0);
    }

    S = direct_sampling<double>(DirectBody::ball, 2, 1.0, 100000, rng);
    const double inner = double((S.points.rowwise().norm().array() < 0.5).count()) / 1e5;
    CHECK(std::abs(inner - 0.25) <= 0.01);

    S = direct_sampling<double>(DirectBody::hypersphere, 2, 1.0, 100000, rng);
    std::vector<long> sectors(20, 0);
    for (Index i = 0; i < S.size(); ++i) {
        CHECK(std::abs(S.points.row(i).norm() - 1) <= 1e-12);
        const double a = std::atan2(S.points(i, 1), S.points(i, 0)) + M_PI;
        sectors[std::size_t(std::min(19, int(a / (2 * M_PI) * 20)))]++;
    }
    CHECK(chi2_uniform(sectors) <= chi2_critical(19, 0.01));

    CHECK_THROWS_AS(direct_sampling<double>(DirectBody::ball, 2, -1.0, 10, rng), InputError);
    CHECK_THROWS_AS(direct_sampling<double>(DirectBody::ball, 0, 1.0, 10, rng), InputError);
}
