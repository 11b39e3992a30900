#include "support.hpp"

#include <doctest.h>

using namespace testing;

namespace {

Polytope<double> cube(Index d) { return gen_cube<double>(d, Representation::H); }

VolumeSettings<double> with(VolumeAlgorithm a, std::uint64_t seed)
{
    VolumeSettings<double> s;
    s.algorithm = a;
    s.seed = seed;
    return s;
}

// fraction of the bounding box [-R, R]^d that lies in Z, times the box volume
std::pair<double, double> box_monte_carlo(const Zonotope<double>& Z, int n, Rng& rng)
{
    const Index d = Z.dimension();
    Vec<double> R = Z.G.cwiseAbs().colwise().sum().transpose();
    long hits = 0;
    for (int i = 0; i < n; ++i) {
        Vec<double> x(d);
        for (Index j = 0; j < d; ++j) x(j) = rng.uniform(-R(j), R(j));
        hits += membership(Z, x);
    }
    const double box = (2 * R).prod();
    const double p = double(hits) / n;
    return {box * p, box * std::sqrt(p * (1 - p) / n)};
}

}  // namespace

TEST_CASE("estimates telescope exactly")
{
    for (auto a : {VolumeAlgorithm::SOB, VolumeAlgorithm::CG, VolumeAlgorithm::CB}) {
        auto s = with(a, 3);
        s.error = a == VolumeAlgorithm::SOB ? 0.5 : 0.2;
        auto e = volume_estimate(cube(4), s);
        double v = e.base;
        for (double f : e.factors) v *= f;
        CHECK(std::abs(v - e.value) <= 1e-12 * e.value);
        CHECK(e.value > 0);
        CHECK(e.algorithm == a);
    }
}

TEST_CASE("the segment has length two")
{
    HPolytope<double> seg(mat({{1}, {-1}}), vec({1, 1}));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        VolumeSettings<double> s;
        s.seed = seed;
        CHECK(std::abs(volume(Polytope<double>(seg), s) - 2) <= 0.2 * 2);
    }
}

TEST_CASE("scale equivariance")
{
    auto P = std::get<HPolytope<double>>(cube(5));
    HPolytope<double> Q(P.A, 2 * P.b);
    double log_ratio = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        VolumeSettings<double> s;
        s.seed = seed;
        const double r = volume(Polytope<double>(Q), s) / volume(Polytope<double>(P), s);
        CHECK(std::abs(r / 32 - 1) <= 3 * 0.1 * std::sqrt(2.0));
        log_ratio += std::log(r);
    }
    CHECK(std::abs(std::exp(log_ratio / 10) / 32 - 1) <= 0.1);
}

TEST_CASE("exact zonotope volumes")
{
    CHECK(exact_vol(Zonotope<double>(Mat<double>::Identity(3, 3))) == 8);
    CHECK(exact_vol(Zonotope<double>(Mat<double>::Identity(6, 6))) == 64);
    CHECK(exact_vol(Zonotope<double>(mat({{1, 0}, {0, 1}, {1, 1}}))) == doctest::Approx(12));
    CHECK(exact_vol(Zonotope<double>(mat({{1, 0}, {2, 0}}))) == 0);

    Rng rng(1);
    auto [mc, se] = box_monte_carlo(Zonotope<double>(mat({{1, 0}, {0, 1}, {1, 1}})), 200000, rng);
    CHECK(std::abs(mc - 12) <= 3 * se);

    CHECK(exact_vol(cube(100)) == doctest::Approx(1.267651e30).epsilon(1e-6));
    CHECK_THROWS_AS(exact_vol(Polytope<double>(gen_rand_hpoly<double>(3, 10, 1))), VolumeUnknownError);
    CHECK_THROWS_AS(exact_vol(gen_rand_zonotope<double>(10, 200, SubGenerator::uniform, 1)), InputError);
}

TEST_CASE("exact zonotope volume against box Monte Carlo")
{
    Rng rng(2);
    for (int t = 0; t < 8; ++t) {
        const Index d = 2 + t % 3;
        const Index k = d + 1 + t % 4;
        auto Z = gen_rand_zonotope<double>(d, k, SubGenerator::uniform, 40 + t);
        auto [mc, se] = box_monte_carlo(Z, 50000, rng);
        CHECK(std::abs(mc - exact_vol(Z)) <= 3 * se);
    }
}

TEST_CASE("frustum closed forms")
{
    CHECK(frustum_of_simplex<double>(vec({1, 0, 0}), 0.5) == doctest::Approx(0.75));
    for (Index d : {3, 10, 100}) {
        Vec<double> a = Vec<double>::Unit(d, 0);
        for (double t : {0.1, 0.5, 0.9})
            CHECK(std::abs(frustum_of_simplex(a, t) - (1 - std::pow(1 - t, double(d - 1)))) <= 1e-12);
    }
    CHECK(frustum_of_simplex<double>(Vec<double>::Ones(4), 0.5) == 0);
    CHECK(frustum_of_simplex<double>(Vec<double>::Ones(4), 1.0) == 1);
    CHECK(frustum_of_simplex<double>(vec({1, -1}), 0.0) == doctest::Approx(0.5));
    // on the segment from (1,0) to (0,1), x1 - x2 <= 1/2 keeps three quarters
    CHECK(frustum_of_simplex<double>(vec({1, -1}), 0.5) == doctest::Approx(0.75));
    CHECK_THROWS_AS(frustum_of_simplex<double>(vec({1}), 0.5), InputError);
}

TEST_CASE("frustum is monotone and complementary")
{
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const Index d = 2 + Index(rng.index(20));
        Vec<double> a = rng.gaussian_vector<double>(d);
        double prev = 0;
        for (double z = -3; z <= 3; z += 0.25) {
            const double f = frustum_of_simplex(a, z);
            CHECK(f >= prev - 1e-12);
            prev = f;
            Vec<double> na = -a;
            CHECK(std::abs(f + frustum_of_simplex(na, -z) - 1) <= 1e-9);
        }
    }
}

TEST_CASE("frustum against rejection sampling")
{
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
        const Index d = 3 + t;
        Vec<double> a = rng.gaussian_vector<double>(d);
        const double z = rng.uniform(-0.5, 0.5);
        long in = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) in += a.dot(uniform_canonical_simplex<double>(d, rng)) <= z;
        CHECK(std::abs(double(in) / n - frustum_of_simplex(a, z)) <= 0.006);
    }
}

TEST_CASE("enclosing radius")
{
    for (Index d : {2, 5, 9}) {
        auto C = std::get<HPolytope<double>>(cube(d));
        const double r = enclosing_radius(C, Vec<double>(Vec<double>::Zero(d)));
        CHECK(r >= std::sqrt(double(d)) - 1e-9);
        CHECK(r <= double(d));
    }
    CHECK(enclosing_radius(Zonotope<double>(Mat<double>::Identity(2, 2)), Vec<double>(Vec<double>::Zero(2))) ==
          doctest::Approx(2));
    auto X = std::get<VPolytope<double>>(gen_cross<double>(4, Representation::V));
    CHECK(enclosing_radius(X, Vec<double>(Vec<double>::Zero(4))) == doctest::Approx(1));
    HPolytope<double> half(mat({{1, 0}, {0, 1}, {0, -1}}), vec({1, 1, 1}));
    CHECK_THROWS_AS(enclosing_radius(half, Vec<double>(Vec<double>::Zero(2))), UnboundedError);
}

TEST_CASE("SoB schedule")
{
    auto e = volume_estimate(cube(10), with(VolumeAlgorithm::SOB, 1));
    const double q = std::ceil(10 * std::log2(enclosing_radius(std::get<HPolytope<double>>(cube(10)),
                                                               Vec<double>(Vec<double>::Zero(10))) / 1.0));
    CHECK(e.factors.size() == std::size_t(q));
    CHECK(e.schedule.size() == std::size_t(q) + 1);
    for (std::size_t i = 1; i < e.schedule.size(); ++i) CHECK(e.schedule[i] > e.schedule[i - 1]);
    for (double f : e.factors) {
        CHECK(f >= 1);
        CHECK(f <= 2.5);
    }
}

TEST_CASE("CG schedule and the initial Gaussian")
{
    auto C = std::get<HPolytope<double>>(cube(10));
    const double eps = 0.1;
    const double rho = enclosing_radius(C, Vec<double>(Vec<double>::Zero(10)));
    const double s0 = cg_initial_sigma(C, Vec<double>(Vec<double>::Zero(10)), eps, rho);
    Rng rng(5);
    long out = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) out += !membership(C, Vec<double>(s0 * rng.gaussian_vector<double>(10)));
    CHECK(double(out) / n <= 2 * eps);

    auto e = volume_estimate(Polytope<double>(C), with(VolumeAlgorithm::CG, 2));
    CHECK(e.schedule.front() == doctest::Approx(s0));
    for (std::size_t i = 1; i < e.schedule.size(); ++i) CHECK(e.schedule[i] > e.schedule[i - 1]);
    CHECK(e.schedule.back() > rho);
    CHECK(std::abs(e.value / 1024 - 1) <= 0.15);
}

TEST_CASE("CG needs facet normals")
{
    auto V = gen_cross<double>(3, Representation::V);
    CHECK_THROWS_AS(volume(V, with(VolumeAlgorithm::CG, 0)), InputError);
}

TEST_CASE("CB on V- and Z-polytopes")
{
    auto X = gen_cross<double>(4, Representation::V);
    CHECK(std::abs(volume(X, with(VolumeAlgorithm::CB, 1)) / (16.0 / 24) - 1) <= 0.3);

    auto Z = gen_rand_zonotope<double>(3, 8, SubGenerator::uniform, 12);
    const double truth = exact_vol(Z);
    for (bool hp : {false, true}) {
        auto s = with(VolumeAlgorithm::CB, 3);
        s.hpoly = hp;
        CHECK(std::abs(volume(Polytope<double>(Z), s) / truth - 1) <= 0.3);
    }
    auto s = with(VolumeAlgorithm::CB, 0);
    s.hpoly = true;
    CHECK_THROWS_AS(volume(cube(3), s), InputError);
}

TEST_CASE("settings are validated")
{
    auto s = with(VolumeAlgorithm::CB, 0);
    s.error = -1.0;
    CHECK_THROWS_AS(volume(cube(3), s), InputError);
    s.error = 0.1;
    s.walk = WalkKind::BRDHR;
    CHECK_THROWS_AS(volume(cube(3), s), InputError);
    s = with(VolumeAlgorithm::CG, 0);
    s.walk = WalkKind::BiW;
    CHECK_THROWS_AS(volume(cube(3), s), InputError);
}

TEST_CASE("defaults follow the representation")
{
    auto H = std::get<HPolytope<double>>(cube(10));
    auto r = resolve_settings(H, VolumeSettings<double>{});
    CHECK(r.algorithm == VolumeAlgorithm::CB);
    CHECK(r.walk == WalkKind::CDHR);
    CHECK(r.walk_length == 1);
    CHECK(r.error == doctest::Approx(0.1));
    auto big = std::get<HPolytope<double>>(cube(201));
    CHECK(resolve_settings(big, VolumeSettings<double>{}).algorithm == VolumeAlgorithm::CG);
    auto V = std::get<VPolytope<double>>(gen_cross<double>(3, Representation::V));
    CHECK(resolve_settings(V, VolumeSettings<double>{}).walk == WalkKind::BiW);
    auto sob = resolve_settings(H, with(VolumeAlgorithm::SOB, 0));
    CHECK(sob.error == doctest::Approx(1));
    CHECK(sob.walk_length == 11);
    auto Z = gen_rand_zonotope<double>(3, 6, SubGenerator::uniform, 1);
    CHECK(resolve_settings(Z, VolumeSettings<double>{}).hpoly);
    auto Z2 = gen_rand_zonotope<double>(3, 15, SubGenerator::uniform, 1);
    CHECK_FALSE(resolve_settings(Z2, VolumeSettings<double>{}).hpoly);
}

TEST_CASE("identical seeds give identical estimates")
{
    auto a = volume(cube(5), with(VolumeAlgorithm::CB, 17));
    auto b = volume(cube(5), with(VolumeAlgorithm::CB, 17));
    CHECK(a == b);
}

TEST_CASE("rounding recovers a rotated skinny box")
{
    auto S = gen_skinny_cube<double>(4);
    auto R = rotate_polytope<double>(S, std::nullopt, 3).rotated;
    auto s = with(VolumeAlgorithm::CB, 4);
    s.rounding = true;
    CHECK(std::abs(volume(R, s) / (100.0 * 16) - 1) <= 0.15);
}
