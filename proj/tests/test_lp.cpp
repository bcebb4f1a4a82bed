#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <npn/lp.hpp>

using namespace npn;

TEST_CASE("maximize x subject to x <= 1")
{
    LinearProgram lp;
    int x = lp.add_variable(-infinity, infinity, 1.0);
    lp.add_row({{x, 1.0}}, RowSense::le, 1.0);
    auto rep = solve_lp(lp);
    REQUIRE(rep.ok());
    CHECK(rep.objective == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.primal[0] == doctest::Approx(1.0));
    CHECK(rep.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("degenerate tie has a unique objective")
{
    LinearProgram lp;
    int x = lp.add_variable(0.0, infinity, 1.0);
    int y = lp.add_variable(0.0, infinity, 1.0);
    lp.add_row({{x, 1.0}, {y, 1.0}}, RowSense::le, 1.0);
    lp.add_row({{x, 1.0}}, RowSense::le, 1.0);
    lp.add_row({{y, 1.0}}, RowSense::le, 1.0);
    auto rep = solve_lp(lp);
    REQUIRE(rep.ok());
    CHECK(rep.objective == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.duality_gap <= 1e-9);
}

TEST_CASE("infeasible and unbounded programs are certified")
{
    LinearProgram infeasible;
    int x = infeasible.add_variable(0.0, infinity, 1.0);
    infeasible.add_row({{x, 1.0}}, RowSense::ge, 2.0);
    infeasible.add_row({{x, 1.0}}, RowSense::le, 1.0);
    CHECK(solve_lp(infeasible).status == SolverStatus::infeasible);

    LinearProgram unbounded;
    int y = unbounded.add_variable(0.0, infinity, 1.0);
    unbounded.add_row({{y, -1.0}}, RowSense::le, 1.0);
    CHECK(solve_lp(unbounded).status == SolverStatus::unbounded);
}

TEST_CASE("equality rows, free and upper-bounded variables")
{
    // max x - y + z  s.t. x + y = 2, z <= 3 (bound), x - z >= -5, y free, x in [-1, 4]
    LinearProgram lp;
    int x = lp.add_variable(-1.0, 4.0, 1.0);
    int y = lp.add_variable(-infinity, infinity, -1.0);
    int z = lp.add_variable(-infinity, 3.0, 1.0);
    lp.add_row({{x, 1.0}, {y, 1.0}}, RowSense::eq, 2.0);
    lp.add_row({{x, 1.0}, {z, -1.0}}, RowSense::ge, -5.0);
    auto rep = solve_lp(lp);
    REQUIRE(rep.ok());
    // x = 4, y = -2, z = 3 -> 4 + 2 + 3 = 9
    CHECK(rep.objective == doctest::Approx(9.0));
    CHECK(rep.max_violation <= 1e-12);
}

TEST_CASE("random 20x40 LPs match the interior-point solver")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        LinearProgram lp;
        for (int j = 0; j < 40; ++j) lp.add_variable(0.0, 10.0, unit(rng) - 0.3);
        for (int i = 0; i < 20; ++i) {
            SparseTerms row;
            for (int j = 0; j < 40; ++j) row.emplace_back(j, unit(rng) - 0.2);
            lp.add_row(row, i % 5 == 4 ? RowSense::ge : RowSense::le, i % 5 == 4 ? -5.0 : 1.0 + 5.0 * unit(rng));
        }
        auto simplex = solve_lp(lp);
        REQUIRE(simplex.ok());
        CHECK(simplex.max_violation <= 1e-9);
        CHECK(simplex.duality_gap <= 1e-9);
        CHECK(simplex.complementarity_residual <= 1e-8);
        auto ipm = solve_convex(to_convex(lp));
        REQUIRE(ipm.ok());
        CHECK(std::abs(simplex.objective - ipm.objective) <= 1e-7);
    }
}
