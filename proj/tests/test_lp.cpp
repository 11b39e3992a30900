#include "support.hpp"

#include <doctest.h>

#include <cstring>

using namespace testing;

TEST_CASE("single active bound")
{
    LinearProgram<double> lp(1);
    lp.objective(0) = 1;
    lp.add_ineq(vec({1}), 1);
    lp.add_ineq(vec({-1}), 1);
    auto r = solve_lp(lp);
    REQUIRE(r.optimal());
    CHECK(r.solution(0) == doctest::Approx(1));
    CHECK(r.objective_value == doctest::Approx(1));
}

TEST_CASE("box corner")
{
    LinearProgram<double> lp(2);
    lp.objective << 1, 1;
    lp.add_ineq(vec({1, 0}), 1);
    lp.add_ineq(vec({0, 1}), 1);
    lp.add_ineq(vec({-1, 0}), 1);
    lp.add_ineq(vec({0, -1}), 1);
    auto r = solve_lp(lp);
    REQUIRE(r.optimal());
    CHECK(r.objective_value == doctest::Approx(2));
    CHECK(r.solution(0) == doctest::Approx(1));
    CHECK(r.solution(1) == doctest::Approx(1));
}

TEST_CASE("contradictory bounds are infeasible")
{
    LinearProgram<double> lp(1);
    lp.add_ineq(vec({1}), -1);
    lp.lower = vec({0});
    lp.upper = vec({std::numeric_limits<double>::infinity()});
    auto r = solve_lp(lp);
    CHECK(r.status == LPStatus::infeasible);
    CHECK(r.phase1_value > 1e-9);
}

TEST_CASE("unbounded objective")
{
    LinearProgram<double> lp(2);
    lp.objective << 1, 0;
    lp.add_ineq(vec({0, 1}), 1);
    lp.add_ineq(vec({-1, 0}), 0);
    CHECK(solve_lp(lp).status == LPStatus::unbounded);
}

TEST_CASE("row of the wrong dimension is rejected")
{
    LinearProgram<double> lp(2);
    CHECK_THROWS_AS(lp.add_ineq(vec({1, 2, 3}), 1), InputError);
}

TEST_CASE("feasible point on the unit segment")
{
    LinearProgram<double> lp(2);
    lp.add_eq(vec({1, 1}), 1);
    lp.lower = Vec<double>::Zero(2);
    lp.upper = Vec<double>::Constant(2, std::numeric_limits<double>::infinity());
    auto f = feasible_point(lp);
    REQUIRE(f.feasible);
    CHECK(f.point.sum() == doctest::Approx(1));
    CHECK(f.point.minCoeff() >= -1e-9);
    CHECK(max_residual(lp, f.point) <= 1e-9);
}

TEST_CASE("inconsistent equalities")
{
    LinearProgram<double> lp(1);
    lp.add_eq(vec({1}), 1);
    lp.add_eq(vec({1}), 2);
    auto f = feasible_point(lp);
    CHECK_FALSE(f.feasible);
    CHECK(f.phase1_value > 1e-9);
}

TEST_CASE("overlapping squares: intersection system is feasible")
{
    Mat<double> V1 = mat({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    Mat<double> V2 = V1.rowwise() + vec({0.5, 0.5}).transpose();
    VPolyIntersection<double> Q(V1, V2);
    REQUIRE(intersection_nonempty(Q));
    auto f = feasible_point(detail::intersection_lp(Q));
    REQUIRE(f.feasible);
    // weights of the first hull reconstruct a point that both hulls contain
    Vec<double> w = f.point.head(V1.rows());
    Vec<double> x = V1.transpose() * w;
    CHECK(membership(VPolytope<double>(V1), x));
    CHECK(membership(VPolytope<double>(V2), x));
}

TEST_CASE("determinism: identical inputs give identical bits")
{
    Rng rng(3);
    LinearProgram<double> lp(4);
    for (int i = 0; i < 12; ++i) lp.add_ineq(rng.gaussian_vector<double>(4), 1.0 + rng.uniform());
    lp.objective = rng.gaussian_vector<double>(4);
    auto a = solve_lp(lp), b = solve_lp(lp);
    REQUIRE(a.optimal());
    CHECK(std::memcmp(a.solution.data(), b.solution.data(), sizeof(double) * 4) == 0);
    CHECK(std::memcmp(&a.objective_value, &b.objective_value, sizeof(double)) == 0);
}

TEST_CASE("random bounded LPs: residuals, dual signs and weak duality")
{
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Index d = 2 + Index(rng.index(6));
        const Index m = d + 1 + Index(rng.index(10));
        LinearProgram<double> lp(d);
        Vec<double> x0 = rng.gaussian_vector<double>(d);
        for (Index i = 0; i < m; ++i) {
            Vec<double> a = rng.gaussian_vector<double>(d);
            lp.add_ineq(a, a.dot(x0) + rng.uniform(0.1, 2.0));
        }
        // a box keeps every instance bounded
        for (Index i = 0; i < d; ++i) {
            lp.add_ineq(Vec<double>::Unit(d, i), x0(i) + 10);
            lp.add_ineq(-Vec<double>::Unit(d, i), -x0(i) + 10);
        }
        lp.objective = rng.gaussian_vector<double>(d);
        auto r = solve_lp(lp);
        REQUIRE(r.optimal());
        CHECK(max_residual(lp, r.solution) <= 1e-9);
        CHECK(r.dual_values.minCoeff() >= -1e-9);
        CHECK(r.dual_values.dot(lp.ineq_rhs) >= r.objective_value - 1e-6);
    }
}
