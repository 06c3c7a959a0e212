#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "stochem/grid.hpp"
#include "support.hpp"

using namespace stochem;
using stochem::testing::random_scalar;
using stochem::testing::sampled;

TEST_CASE("make_grid derives spacings") {
    const Grid g = make_grid(64, 64, 1.0, 1.0);
    CHECK(g.dx == doctest::Approx(1.0 / 64).epsilon(1e-15));
    CHECK(g.dy == doctest::Approx(1.0 / 64).epsilon(1e-15));

    const Grid r = make_grid(4, 8, 2.0, 1.0);
    CHECK(r.dx == 0.5);
    CHECK(r.dy == 0.125);
}

TEST_CASE("make_grid rejects degenerate dimensions") {
    CHECK_THROWS_AS(make_grid(2, 64, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(8, 8, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(8, 8, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("inner_product on constant fields") {
    const Grid unit = make_grid(16, 16, 1.0, 1.0);
    CHECK(inner_product(ScalarField(unit, 1.0), ScalarField(unit, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inner_product(ScalarField(unit, 1.0), ScalarField(unit, 0.0)) == 0.0);

    const Grid wide = make_grid(16, 8, 2.0, 1.0);
    CHECK(inner_product(ScalarField(wide, 2.0), ScalarField(wide, 3.0)) == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("inner_product rejects mismatched grids") {
    CHECK_THROWS(inner_product(ScalarField(make_grid(8, 8, 1, 1)), ScalarField(make_grid(16, 8, 1, 1))));
}

TEST_CASE("norms of simple fields") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    CHECK(norm(ScalarField(g, 5.0), NormKind::H1Semi) == 0.0);
    CHECK(norm(ScalarField(g, 1.0), NormKind::L2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm(ScalarField(g, -3.0), NormKind::Linf) == 3.0);

    // Midpoint quadrature of cos^2 over the unit square.
    const Grid fine = make_grid(256, 256, 1.0, 1.0);
    const ScalarField c = sampled(fine, [](double x, double) { return std::cos(std::numbers::pi * x); });
    CHECK(std::abs(norm(c, NormKind::L2) - 1.0 / std::sqrt(2.0)) <= 1e-4);
}

TEST_CASE("H1 seminorm matches a hand-rolled difference sum") {
    const Grid g = make_grid(8, 6, 1.0, 0.75);
    std::mt19937_64 rng(3);
    const ScalarField f = random_scalar(g, rng);
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) sum += std::pow((f(i + 1, j) - f(i, j)) / g.dx, 2);
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) sum += std::pow((f(i, j + 1) - f(i, j)) / g.dy, 2);
    CHECK(norm(f, NormKind::H1Semi) == doctest::Approx(std::sqrt(sum * g.dx * g.dy)).epsilon(1e-13));
}

TEST_CASE("inner product properties on random fields") {
    const Grid g = make_grid(24, 16, 1.5, 1.0);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const ScalarField a = random_scalar(g, rng);
        const ScalarField b = random_scalar(g, rng);
        const ScalarField c = random_scalar(g, rng);
        const double ab = inner_product(a, b);
        CHECK(ab == inner_product(b, a));

        ScalarField combo = a;
        combo.axpy(2.5, c);
        CHECK(inner_product(combo, b) == doctest::Approx(ab + 2.5 * inner_product(c, b)).epsilon(1e-13));

        const double na = norm(a, NormKind::L2);
        CHECK(na * na == doctest::Approx(inner_product(a, a)).epsilon(1e-15));
        CHECK(std::abs(ab) <= na * norm(b, NormKind::L2) * (1 + 1e-15));
    }
}

TEST_CASE("vector field layout and no-slip enforcement") {
    const Grid g = make_grid(5, 4, 1.0, 1.0);
    VectorField v(g);
    for (double& x : v.ux_values()) x = 1.0;
    for (double& x : v.uy_values()) x = 1.0;
    CHECK(v.ux_values().size() == 6u * 4u);
    CHECK(v.uy_values().size() == 5u * 5u);
    CHECK(v.max_boundary_normal() == 1.0);
    v.enforce_no_slip();
    CHECK(v.max_boundary_normal() == 0.0);
    CHECK(v.ux(2, 1) == 1.0);
    CHECK(v.all_finite());
}
