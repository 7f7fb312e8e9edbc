#include <doctest.h>

#include <numbers>

#include "oracle/oracle.hpp"
#include "oracle/suite.hpp"

using namespace oracle;

TEST_CASE("oracle helpers on hand-checked inputs")
{
    const Link link{{cd(0.0, 1.0)}, cd(1.0)};
    CHECK(std::abs(composite(link, {cd(0.0, -1.0)}) - cd(2.0)) < 1e-15);

    const GridPower g = grid_search_power({1.0, 0.5, 1.0, 10.0, 0.01, 1.0}, 1001);
    CHECK(g.any_feasible);
    CHECK(g.step == doctest::Approx(1e-3));
    CHECK(g.p_s == doctest::Approx(0.18).epsilon(1e-9));

    CHECK(exhaustive_min_residual({cd(0.5)}, cd(1.0), 4) == doctest::Approx(0.25));
    CHECK(exhaustive_min_residual({cd(1.0), cd(1.0)}, cd(0.0), 4) == doctest::Approx(0.0).epsilon(1e-12));

    // diag(1, 3) rotated: eigenvalues 1 and 3
    const std::vector<double> ev = jacobi_eigenvalues({cd(2.0), cd(0.0, 1.0), cd(0.0, -1.0), cd(2.0)}, 2);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));

    // |u1 + u2|^2 with u2 = 1 is minimized at u1 = -1
    const std::vector<cd> ones{cd(1.0), cd(1.0), cd(1.0), cd(1.0)};
    CHECK(exhaustive_min_quadratic(ones, 2, 8) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exhaustive linear oracle")
{
    const cvec w{cd(1.0), cd(0.0, 1.0)};
    const LinearOptimum free = exhaustive_linear(w, w, 0.0, 0.0, -1.0, 16);
    CHECK(free.feasible);
    CHECK(free.objective == doctest::Approx(4.0));
    const LinearOptimum none = exhaustive_linear(w, w, 0.0, 0.0, 5.0, 16);
    CHECK_FALSE(none.feasible);
}

TEST_CASE("verification suite")
{
    for (const Check& c : run_oracle_suite(20240607)) {
        INFO(format_check(c));
        CHECK(c.pass);
    }
}
