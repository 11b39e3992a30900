#include "support.hpp"

#include <doctest.h>

using namespace testing;

TEST_CASE("membership")
{
    auto C = std::get<HPolytope<double>>(gen_cube<double>(3, Representation::H));
    CHECK(membership(C, vec({0, 0, 0})));
    CHECK_FALSE(membership(C, vec({1.001, 0, 0})));
    VPolytope<double> S(Mat<double>::Identity(3, 3));
    CHECK(membership(S, vec({1.0 / 3, 1.0 / 3, 1.0 / 3})));
    CHECK_FALSE(membership(S, vec({0.5, 0.5, 0.5})));
    CHECK_THROWS_AS(membership(C, vec({0, 0})), InputError);
}

TEST_CASE("line_intersect on the square")
{
    auto Q = square_h();
    auto c = line_intersect(Q, vec({0, 0}), vec({1, 0}));
    CHECK(c.t_neg == doctest::Approx(-1));
    CHECK(c.t_pos == doctest::Approx(1));
    c = line_intersect(Q, vec({0.5, 0}), vec({1, 0}));
    CHECK(c.t_neg == doctest::Approx(-1.5));
    CHECK(c.t_pos == doctest::Approx(0.5));

    Zonotope<double> Z(Mat<double>::Identity(2, 2));
    c = line_intersect(Z, vec({0, 0}), Vec<double>(vec({1, 1}).normalized()));
    CHECK(c.t_neg == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-9));
    CHECK(c.t_pos == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("unbounded chord is reported")
{
    HPolytope<double> half(mat({{1, 0}}), vec({1}));
    CHECK_THROWS_AS(line_intersect(half, vec({0, 0}), vec({-1, 0})), UnboundedError);
}

TEST_CASE("coordinate chords")
{
    auto Q = square_h();
    Vec<double> p = vec({0, 0});
    auto cache = make_coordinate_cache(Q, p);
    auto c = line_intersect_coordinate(Q, p, 0, cache);
    CHECK(c.t_neg == doctest::Approx(-1));
    CHECK(c.t_pos == doctest::Approx(1));

    auto S = std::get<HPolytope<double>>(gen_skinny_cube<double>(2));
    auto cs = make_coordinate_cache(S, p);
    c = line_intersect_coordinate(S, p, 1, cs);
    CHECK(c.t_neg == doctest::Approx(-100));
    CHECK(c.t_pos == doctest::Approx(100));
}

TEST_CASE("coordinate chords agree with general chords on random H-polytopes")
{
    Rng rng(5);
    for (int k = 0; k < 5; ++k) {
        const Index d = 3 + k;
        HPolytope<double> P = gen_rand_hpoly<double>(d, 4 * d, 100 + k);
        for (int t = 0; t < 20; ++t) {
            // interior point: shrink a random direction well inside the radius-10 tangent sphere
            Vec<double> p = rng.direction<double>(d) * rng.uniform(0, 5);
            auto cache = make_coordinate_cache(P, p);
            for (Index i = 0; i < d; ++i) {
                auto a = line_intersect_coordinate(P, p, i, cache);
                auto b = line_intersect(P, p, Vec<double>(Vec<double>::Unit(d, i)));
                CHECK(std::abs(a.t_neg - b.t_neg) <= 1e-9);
                CHECK(std::abs(a.t_pos - b.t_pos) <= 1e-9);
            }
        }
    }
}

TEST_CASE("boundary hits and normals")
{
    auto Q = square_h();
    auto h = boundary_hit_with_normal(Q, vec({0, 0}), vec({1, 0}));
    CHECK(h.t == doctest::Approx(1));
    CHECK(h.point(0) == doctest::Approx(1));
    CHECK(h.inner_normal(0) == doctest::Approx(-1));

    // exact corner: both facets tie, the lower index (x1 <= 1) wins
    Vec<double> v = vec({1, 1}).normalized();
    h = boundary_hit_with_normal(Q, vec({0, 0}), v);
    CHECK(h.inner_normal(0) == doctest::Approx(-1));
    CHECK(h.inner_normal(1) == doctest::Approx(0));

    VPolytope<double> V(mat({{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}));
    h = boundary_hit_with_normal(V, vec({0, 0}), vec({0, 1}));
    CHECK(h.point(1) == doctest::Approx(1).epsilon(1e-9));
    CHECK(h.inner_normal(0) == doctest::Approx(0).epsilon(1e-7));
    CHECK(h.inner_normal(1) == doctest::Approx(-1).epsilon(1e-7));
}

TEST_CASE("normals point inward on random bodies")
{
    Rng rng(8);
    Polytope<double> bodies[] = {gen_rand_hpoly<double>(4, 20, 1), gen_rand_vpoly<double>(4, 15, SubGenerator::sphere, 2),
                                 gen_rand_zonotope<double>(4, 8, SubGenerator::uniform, 3)};
    for (const auto& P : bodies) {
        Ball<double> b = inner_ball(P, rng);
        for (int t = 0; t < 30; ++t) {
            Vec<double> v = rng.direction<double>(4);
            auto h = boundary_hit_with_normal(P, b.center, v);
            CHECK(h.inner_normal.dot(v) < 0);
            CHECK(h.inner_normal.norm() == doctest::Approx(1).epsilon(1e-9));
        }
    }
}

TEST_CASE("oracle consistency: membership agrees with the chord")
{
    Rng rng(21);
    Polytope<double> bodies[] = {gen_rand_hpoly<double>(3, 40, 4), gen_rand_vpoly<double>(3, 12, SubGenerator::cube, 5),
                                 gen_rand_zonotope<double>(3, 6, SubGenerator::uniform, 6),
                                 VPolyIntersection<double>(std::get<VPolytope<double>>(gen_cross<double>(3, Representation::V)).V,
                                                           std::get<VPolytope<double>>(gen_cube<double>(3, Representation::V)).V * 0.6)};
    for (const auto& P : bodies) {
        Ball<double> b = inner_ball(P, rng);
        for (int t = 0; t < 25; ++t) {
            Vec<double> p = b.center + 0.5 * b.radius * rng.direction<double>(3);
            Vec<double> v = rng.direction<double>(3);
            auto c = line_intersect(P, p, v);
            REQUIRE(c.t_neg < 0);
            REQUIRE(c.t_pos > 0);
            for (double f : {0.1, 0.5, 0.9}) {
                CHECK(membership(P, Vec<double>(p + f * c.t_pos * v)));
                CHECK(membership(P, Vec<double>(p + f * c.t_neg * v)));
            }
            const double eps = 1e-6;
            CHECK(membership(P, Vec<double>(p + (c.t_pos * (1 - eps)) * v)));
            CHECK_FALSE(membership(P, Vec<double>(p + (c.t_pos * (1 + eps)) * v)));
            CHECK_FALSE(membership(P, Vec<double>(p + (c.t_neg * (1 + eps)) * v)));
        }
    }
}

TEST_CASE("the unit square agrees across H, V and Z")
{
    auto H = square_h();
    VPolytope<double> V(mat({{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}));
    Zonotope<double> Z(Mat<double>::Identity(2, 2));
    Rng rng(2);
    for (int t = 0; t < 1000; ++t) {
        Vec<double> p = Vec<double>::NullaryExpr(2, [&] { return rng.uniform(-0.95, 0.95); });
        Vec<double> v = rng.direction<double>(2);
        auto a = line_intersect(H, p, v), b = line_intersect(V, p, v), c = line_intersect(Z, p, v);
        CHECK(std::abs(a.t_pos - b.t_pos) <= 1e-8);
        CHECK(std::abs(a.t_neg - b.t_neg) <= 1e-8);
        CHECK(std::abs(a.t_pos - c.t_pos) <= 1e-8);
        CHECK(std::abs(a.t_neg - c.t_neg) <= 1e-8);
    }
}

TEST_CASE("zonotope oracle matches the LP oracle")
{
    Zonotope<double> Z = gen_rand_zonotope<double>(6, 40, SubGenerator::gaussian, 17);
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        Vec<double> p = 5 * rng.direction<double>(6);
        Vec<double> v = rng.direction<double>(6);
        auto fast = line_intersect(Z, p, v);
        auto lp = detail::lp_chord<double>(Z.G, false, p, v);
        CHECK(fast.t_pos == doctest::Approx(lp.t_pos).epsilon(1e-9));
        CHECK(fast.t_neg == doctest::Approx(lp.t_neg).epsilon(1e-9));
    }
}

TEST_CASE("inner balls")
{
    auto C = std::get<HPolytope<double>>(gen_cube<double>(5, Representation::H));
    Ball<double> b = inner_ball(C);
    CHECK(b.center.norm() <= 1e-9);
    CHECK(b.radius == doctest::Approx(1));

    auto S = std::get<HPolytope<double>>(gen_simplex<double>(2, Representation::H));
    b = inner_ball(S);
    const double c = 1 / (2 + std::sqrt(2.0));
    CHECK(b.radius == doctest::Approx(c));
    CHECK(b.center(0) == doctest::Approx(c));
    CHECK(b.center(1) == doctest::Approx(c));

    Zonotope<double> Z(Mat<double>::Identity(2, 2));
    b = inner_ball(Z);
    CHECK(b.radius == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("inner ball lies inside: axis probes")
{
    Rng rng(9);
    Polytope<double> bodies[] = {gen_rand_hpoly<double>(5, 20, 2), gen_rand_vpoly<double>(5, 20, SubGenerator::sphere, 3),
                                 gen_rand_zonotope<double>(5, 10, SubGenerator::exponential, 4)};
    for (const auto& P : bodies) {
        Ball<double> b = inner_ball(P, rng);
        CHECK(membership(P, b.center));
        for (Index i = 0; i < 5; ++i)
            for (double s : {-1.0, 1.0}) {
                Vec<double> q = b.center + s * b.radius * (1 - 1e-7) * Vec<double>::Unit(5, i);
                CHECK(membership(P, q));
            }
    }
}

TEST_CASE("intersection inner ball")
{
    Mat<double> sq = mat({{-1, -1}, {1, -1}, {-1, 1}, {1, 1}});
    Rng rng(1);
    VPolyIntersection<double> same(sq, sq);
    Ball<double> b = intersection_inner_ball(same, rng);
    CHECK(membership(same, b.center));

    Mat<double> shifted = sq.rowwise() + vec({0.5, 0}).transpose();
    VPolyIntersection<double> Q(sq, shifted);
    b = intersection_inner_ball(Q, rng);
    CHECK(b.center(0) >= -0.5);
    CHECK(b.center(0) <= 1.0);
    for (int t = 0; t < 20; ++t)
        CHECK(membership(Q, Vec<double>(b.center + b.radius * (1 - 1e-7) * rng.direction<double>(2))));

    Mat<double> far = sq.rowwise() + vec({5, 0}).transpose();
    CHECK_THROWS_AS(intersection_inner_ball(VPolyIntersection<double>(sq, far), rng), InfeasibleError);
}

TEST_CASE("standard generators carry closed-form volumes")
{
    CHECK(*std::get<HPolytope<double>>(gen_cube<double>(10, Representation::H)).known_volume == 1024);
    CHECK(*std::get<HPolytope<double>>(gen_cube<double>(40, Representation::H)).known_volume ==
          doctest::Approx(1.099512e12).epsilon(1e-6));
    CHECK(*std::get<HPolytope<double>>(gen_skinny_cube<double>(10)).known_volume == 102400);
    CHECK(*std::get<HPolytope<double>>(gen_cross<double>(4, Representation::H)).known_volume ==
          doctest::Approx(16.0 / 24));
    CHECK(*std::get<HPolytope<double>>(gen_simplex<double>(4, Representation::H)).known_volume ==
          doctest::Approx(1.0 / 24));
    CHECK(*std::get<HPolytope<double>>(gen_prod_simplex<double>(3)).known_volume == doctest::Approx(1.0 / 36));
    CHECK_THROWS_AS(gen_skinny_cube<double>(3, Representation::V), InputError);
    CHECK_THROWS_AS(gen_prod_simplex<double>(3, Representation::V), InputError);
}

TEST_CASE("random generators")
{
    Zonotope<double> Z = gen_rand_zonotope<double>(2, 2, SubGenerator::uniform, 7);
    for (Index i = 0; i < 2; ++i) {
        CHECK(Z.G.row(i).norm() >= 0);
        CHECK(Z.G.row(i).norm() <= 100);
    }
    HPolytope<double> H = gen_rand_hpoly<double>(6, 30, 9);
    for (Index i = 0; i < H.num_facets(); ++i) CHECK(std::abs(H.b(i)) / H.A.row(i).norm() == doctest::Approx(10));
    CHECK(membership(H, Vec<double>(Vec<double>::Zero(6))));
    HPolytope<double> H2 = gen_rand_hpoly<double>(6, 30, 9);
    CHECK(H.A == H2.A);
    CHECK(H.b == H2.b);
    CHECK(gen_rand_vpoly<double>(3, 10, SubGenerator::cube, 4).V == gen_rand_vpoly<double>(3, 10, SubGenerator::cube, 4).V);
    CHECK_FALSE(Z.known_volume.has_value());
}

TEST_CASE("rotation")
{
    Polytope<double> P = gen_cube<double>(3, Representation::H);
    auto same = rotate_polytope<double>(P, Mat<double>(Mat<double>::Identity(3, 3)), 0);
    CHECK(std::get<HPolytope<double>>(same.rotated).A.isApprox(std::get<HPolytope<double>>(P).A));

    auto r = rotate_polytope<double>(P, std::nullopt, 42);
    CHECK((r.T.transpose() * r.T).isApprox(Mat<double>::Identity(3, 3), 1e-12));
    Rng rng(3);
    int agree = 0;
    for (int t = 0; t < 1000; ++t) {
        Vec<double> x = Vec<double>::NullaryExpr(3, [&] { return rng.uniform(-1.5, 1.5); });
        agree += membership(P, x) == membership(r.rotated, Vec<double>(r.T * x));
    }
    CHECK(agree == 1000);

    Mat<double> singular = Mat<double>::Zero(3, 3);
    CHECK_THROWS_AS(rotate_polytope<double>(P, singular, 0), InputError);
}

TEST_CASE("mvee")
{
    Ellipsoid<double> e = mvee<double>(mat({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}));
    CHECK(e.center.norm() <= 1e-3);
    CHECK((e.shape - Mat<double>::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-3);

    Mat<double> circle(40, 2);
    for (Index i = 0; i < 40; ++i) {
        const double a = 2 * M_PI * double(i) / 40;
        circle.row(i) << 1 + 5 * std::cos(a), 1 + 5 * std::sin(a);
    }
    e = mvee<double>(circle);
    CHECK(e.center(0) == doctest::Approx(1).epsilon(1e-3));
    CHECK(e.center(1) == doctest::Approx(1).epsilon(1e-3));
    CHECK(1 / std::sqrt(e.shape(0, 0)) == doctest::Approx(5).epsilon(1e-3));
    for (Index i = 0; i < 40; ++i) CHECK(e.distance2(circle.row(i).transpose()) <= 1 + 1e-6);

    CHECK_THROWS(mvee<double>(mat({{1, 1}, {2, 2}, {3, 3}, {-1, -1}})));
}

TEST_CASE("rounding a round body keeps it round")
{
    Polytope<double> P = gen_cube<double>(4, Representation::H);
    auto r = round_polytope(P, std::uint64_t(3));
    auto& H = std::get<HPolytope<double>>(r.rounded);
    Ball<double> b = inner_ball(H);
    Vec<double> ext(4);
    for (Index i = 0; i < 4; ++i) {
        auto c = line_intersect(H, b.center, Vec<double>(Vec<double>::Unit(4, i)));
        ext(i) = c.t_pos - c.t_neg;
    }
    // the cube's extents are all equal; the rounded ones stay within 20%
    CHECK(ext.maxCoeff() / ext.minCoeff() <= 1.2);
    CHECK(r.det != 0);
}

TEST_CASE("rounding maps back")
{
    Polytope<double> P = gen_skinny_cube<double>(3);
    auto r = round_polytope(P, std::uint64_t(5));
    Rng rng(6);
    auto S = sample_points(std::get<HPolytope<double>>(r.rounded), 200, TargetDistribution<double>{}, rng).points;
    Eigen::PartialPivLU<Mat<double>> lu(r.T);
    for (Index i = 0; i < S.rows(); ++i) {
        Vec<double> x = lu.solve(Vec<double>(S.row(i).transpose())) + r.shift;
        CHECK(membership(P, x));
    }
}
