#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "stochem/config.hpp"
#include "stochem/dynamics.hpp"
#include "stochem/operators.hpp"
#include "stochem/spectral.hpp"
#include "support.hpp"

using namespace stochem;
using stochem::testing::random_scalar;
using stochem::testing::random_vector;
using stochem::testing::sampled;

namespace {

// Gaussian elimination with partial pivoting; a is n x n row-major.
std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a[r * n + k]) > std::abs(a[piv * n + k])) piv = r;
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[piv * n + c]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double m = a[r * n + k] / a[k * n + k];
            if (m == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) a[r * n + c] -= m * a[k * n + c];
            b[r] -= m * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= a[k * n + c] * x[c];
        x[k] = s / a[k * n + k];
    }
    return x;
}

double max_abs_diff(const VectorField& a, const VectorField& b) {
    VectorField d = a;
    d -= b;
    return norm(d, NormKind::Linf);
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    ScalarField d = a;
    d -= b;
    return norm(d, NormKind::Linf);
}

}  // namespace

TEST_CASE("projection of a gradient vanishes") {
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    const ScalarField phi = sampled(g, [](double x, double) { return std::cos(std::numbers::pi * x); });
    const VectorField v = gradient(phi);
    CHECK(norm(helmholtz_project(v), NormKind::L2) <= 1e-10 * norm(v, NormKind::L2));
}

TEST_CASE("projection is idempotent and symmetric") {
    const Grid g = make_grid(32, 24, 1.0, 0.75);
    std::mt19937_64 rng(5);
    const VectorField v = random_vector(g, rng);
    const VectorField w = random_vector(g, rng);
    const VectorField pv = helmholtz_project(v);
    CHECK(max_abs_diff(helmholtz_project(pv), pv) <= 1e-12 * norm(v, NormKind::Linf));
    CHECK(inner_product(pv, w) == doctest::Approx(inner_product(v, helmholtz_project(w))).epsilon(1e-12));
}

TEST_CASE("projection agrees with a dense Neumann-Poisson solve") {
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    std::mt19937_64 rng(17);
    const VectorField v = random_vector(g, rng);
    const ScalarField div = divergence(v);

    // Assemble div(grad p) with zero wall flux; the rank-one term pins the mean.
    const int nx = g.nx, ny = g.ny;
    const std::size_t n = g.cells();
    std::vector<double> a(n * n, 0.0), rhs(n);
    auto at = [&](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t row = at(i, j);
            rhs[row] = div(i, j);
            const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                const int ii = i + di[k], jj = j + dj[k];
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
                const double w = k < 2 ? 1.0 / (g.dx * g.dx) : 1.0 / (g.dy * g.dy);
                a[row * n + at(ii, jj)] += w;
                a[row * n + row] -= w;
            }
            for (std::size_t c = 0; c < n; ++c) a[row * n + c] += 1.0;
        }
    }
    const std::vector<double> p = dense_solve(a, rhs);
    ScalarField pf(g);
    for (std::size_t k = 0; k < n; ++k) pf[k] = p[k];
    VectorField expected = v;
    expected -= gradient(pf);

    const VectorField pv = helmholtz_project(v);
    CHECK(norm(divergence(pv), NormKind::Linf) <= 1e-10);
    CHECK(max_abs_diff(pv, expected) <= 1e-10);

    ProjectionOptions cg;
    cg.solver = PoissonSolver::ConjugateGradient;
    CHECK(max_abs_diff(helmholtz_project(v, cg), expected) <= 1e-9);
}

TEST_CASE("CG fallback reports non-convergence") {
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    std::mt19937_64 rng(1);
    ScalarField rhs = random_scalar(g, rng);
    rhs -= ScalarField(g, inner_product(rhs, ScalarField(g, 1.0)) / g.area());
    CHECK_THROWS_AS(poisson_neumann_cg(rhs, 1e-14, 2), SolverError);
}

TEST_CASE("Neumann Laplacian basics") {
    const Grid g = make_grid(16, 12, 1.0, 1.0);
    CHECK(norm(laplacian_neumann(ScalarField(g, 4.0)), NormKind::Linf) == 0.0);

    std::mt19937_64 rng(8);
    const ScalarField phi = random_scalar(g, rng);
    CHECK(std::abs(inner_product(laplacian_neumann(phi), ScalarField(g, 1.0))) <= 1e-13 * norm(phi, NormKind::L2));
}

TEST_CASE("sampled cosine is a discrete eigenvector") {
    const Grid g = make_grid(20, 10, 2.0, 1.0);
    const ScalarField phi = sampled(g, [&](double x, double) { return std::cos(std::numbers::pi * x / g.lx); });
    const ScalarField lap = laplacian_neumann(phi);
    const double expected = -(2.0 / (g.dx * g.dx)) * (1.0 - std::cos(std::numbers::pi * g.dx / g.lx));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(lap(i, j) / phi(i, j) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(spectral::neumann_eigenvalue(1, g.nx, g.dx) == doctest::Approx(-expected).epsilon(1e-13));
}

TEST_CASE("Neumann Laplacian is self-adjoint") {
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField a = random_scalar(g, rng);
        const ScalarField b = random_scalar(g, rng);
        const ScalarField la = laplacian_neumann(a);
        const double scale = norm(la, NormKind::L2) * norm(b, NormKind::L2);
        CHECK(std::abs(inner_product(la, b) - inner_product(a, laplacian_neumann(b))) <= 1e-12 * scale);
    }
}

TEST_CASE("spectral solvers invert their operators") {
    const Grid g = make_grid(16, 24, 1.0, 1.5);
    std::mt19937_64 rng(2);
    ScalarField rhs = random_scalar(g, rng);
    rhs -= ScalarField(g, inner_product(rhs, ScalarField(g, 1.0)) / g.area());
    const ScalarField p = spectral::poisson_neumann(rhs);
    CHECK(max_abs_diff(laplacian_neumann(p), rhs) <= 1e-10);
    CHECK(std::abs(inner_product(p, ScalarField(g, 1.0))) <= 1e-13);

    const ScalarField x = spectral::helmholtz_neumann(rhs, 0.01);
    ScalarField back = x;
    back.axpy(-0.01, laplacian_neumann(x));
    CHECK(max_abs_diff(back, rhs) <= 1e-12);

    VectorField u = random_vector(g, rng);
    const VectorField y = spectral::helmholtz_velocity(u, 0.02);
    VectorField lhs = y;
    lhs.axpy(-0.02, stokes_apply(y));
    CHECK(max_abs_diff(lhs, u) <= 1e-12);
}

TEST_CASE("stokes_apply stencil") {
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
    CHECK(norm(stokes_apply(VectorField(g)), NormKind::Linf) == 0.0);

    SUBCASE("interior impulse") {
        VectorField u(g);
        u.ux(3, 4) = 1.0;
        const VectorField r = stokes_apply(u);
        VectorField expected(g);
        expected.ux(3, 4) = -2.0 * ix2 - 2.0 * iy2;
        expected.ux(2, 4) = ix2;
        expected.ux(4, 4) = ix2;
        expected.ux(3, 3) = iy2;
        expected.ux(3, 5) = iy2;
        CHECK(max_abs_diff(r, expected) == 0.0);
    }
    SUBCASE("impulse next to a wall sees the reflected ghost") {
        VectorField u(g);
        u.uy(0, 5) = 1.0;
        const VectorField r = stokes_apply(u);
        VectorField expected(g);
        expected.uy(0, 5) = -3.0 * ix2 - 2.0 * iy2;
        expected.uy(1, 5) = ix2;
        expected.uy(0, 4) = iy2;
        expected.uy(0, 6) = iy2;
        CHECK(max_abs_diff(r, expected) == 0.0);
    }
    SUBCASE("linearity") {
        std::mt19937_64 rng(4);
        const VectorField u = random_vector(g, rng);
        VectorField scaled = u;
        scaled *= 3.0;
        VectorField expected = stokes_apply(u);
        expected *= 3.0;
        CHECK(max_abs_diff(stokes_apply(scaled), expected) <= 1e-12);
    }
}

namespace {

// Independent evaluation of the skew form 1/2[(u.grad)v + div(u (x) v)] on
// each momentum control volume, with reflected tangential ghosts.
VectorField skew_form_oracle(const VectorField& u, const VectorField& v) {
    const Grid& g = u.grid();
    VectorField out(g);
    auto vx = [&](int i, int j) { return j < 0 ? -v.ux(i, 0) : j >= g.ny ? -v.ux(i, g.ny - 1) : v.ux(i, j); };
    auto vy = [&](int i, int j) { return i < 0 ? -v.uy(0, j) : i >= g.nx ? -v.uy(g.nx - 1, j) : v.uy(i, j); };
    auto combine = [&](double c, double fe, double fw, double fn, double fs, double ve, double vw, double vn, double vs) {
        const double advective = 0.5 * (fe * (ve - c) + fw * (c - vw)) / g.dx + 0.5 * (fn * (vn - c) + fs * (c - vs)) / g.dy;
        const double conservative = (fe * 0.5 * (c + ve) - fw * 0.5 * (c + vw)) / g.dx +
                                    (fn * 0.5 * (c + vn) - fs * 0.5 * (c + vs)) / g.dy;
        return 0.5 * (advective + conservative);
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.ux(i, j) = combine(v.ux(i, j), 0.5 * (u.ux(i, j) + u.ux(i + 1, j)), 0.5 * (u.ux(i - 1, j) + u.ux(i, j)),
                                   0.5 * (u.uy(i - 1, j + 1) + u.uy(i, j + 1)), 0.5 * (u.uy(i - 1, j) + u.uy(i, j)),
                                   v.ux(i + 1, j), v.ux(i - 1, j), vx(i, j + 1), vx(i, j - 1));
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.uy(i, j) = combine(v.uy(i, j), 0.5 * (u.ux(i + 1, j - 1) + u.ux(i + 1, j)), 0.5 * (u.ux(i, j - 1) + u.ux(i, j)),
                                   0.5 * (u.uy(i, j) + u.uy(i, j + 1)), 0.5 * (u.uy(i, j - 1) + u.uy(i, j)),
                                   vy(i + 1, j), vy(i - 1, j), v.uy(i, j + 1), v.uy(i, j - 1));
    return out;
}

}  // namespace

TEST_CASE("velocity convection") {
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    std::mt19937_64 rng(9);
    const VectorField u = helmholtz_project(random_vector(g, rng));
    const VectorField v = random_vector(g, rng);

    CHECK(norm(convect_velocity(u, VectorField(g), AdvectionMode::CenteredSkew), NormKind::Linf) == 0.0);

    const VectorField got = convect_velocity(u, v, AdvectionMode::CenteredSkew);
    const VectorField want = skew_form_oracle(u, v);
    CHECK(max_abs_diff(got, want) <= 1e-13 * norm(want, NormKind::Linf));

    const Grid big = make_grid(32, 32, 1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const VectorField a = helmholtz_project(random_vector(big, rng));
        const VectorField b = random_vector(big, rng);
        const double nb = norm(b, NormKind::L2);
        const double skew = inner_product(convect_velocity(a, b, AdvectionMode::CenteredSkew), b);
        CHECK(std::abs(skew) <= 1e-12 * norm(a, NormKind::L2) * nb * nb);
        // Upwinding only removes energy.
        CHECK(inner_product(convect_velocity(a, b, AdvectionMode::UpwindFlux), b) >= -1e-12 * nb * nb);
    }
}

TEST_CASE("scalar transport") {
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    std::mt19937_64 rng(13);
    const VectorField u = helmholtz_project(random_vector(g, rng));
    const ScalarField one(g, 1.0);

    CHECK(norm(scalar_advect(u, ScalarField(g, 2.0), AdvectionMode::UpwindFlux), NormKind::Linf) <= 1e-12);
    CHECK(norm(scalar_advect(u, ScalarField(g, 2.0), AdvectionMode::CenteredSkew), NormKind::Linf) <= 1e-12);

    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField phi = random_scalar(g, rng);
        const VectorField any = random_vector(g, rng);
        const double np = norm(phi, NormKind::L2);
        for (AdvectionMode mode : {AdvectionMode::UpwindFlux, AdvectionMode::CenteredSkew})
            CHECK(std::abs(inner_product(scalar_advect(any, phi, mode), one)) <= 1e-13 * np * norm(any, NormKind::L2));
        const double nu = norm(u, NormKind::L2);
        CHECK(std::abs(inner_product(scalar_advect(u, phi, AdvectionMode::CenteredSkew), phi)) <= 1e-12 * nu * np * np);
        // Returned field is div(u phi), so the upwind pairing is non-negative.
        CHECK(inner_product(scalar_advect(u, phi, AdvectionMode::UpwindFlux), phi) >= -1e-12 * nu * np * np);
    }
}

TEST_CASE("upwind transport keeps a positive field positive") {
    const Grid g = make_grid(32, 32, 1.0, 1.0);
    std::mt19937_64 rng(6);
    VectorField u = helmholtz_project(random_vector(g, rng));
    u *= 1.0 / norm(u, NormKind::Linf);
    ScalarField phi = random_scalar(g, rng);
    for (double& v : phi.values()) v = std::abs(v);
    const double dt = 0.2 * g.dx;
    ScalarField next = phi;
    next.axpy(-dt, scalar_advect(u, phi, AdvectionMode::UpwindFlux));
    for (double v : next.values()) CHECK(v >= 0.0);
}

TEST_CASE("chemotaxis divergence") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    std::mt19937_64 rng(31);
    const ScalarField n = random_scalar(g, rng);
    const ScalarField c = random_scalar(g, rng);
    CHECK(norm(chemotaxis_div(ScalarField(g), c, 1.0), NormKind::Linf) == 0.0);
    CHECK(norm(chemotaxis_div(n, ScalarField(g, 0.7), 1.0), NormKind::Linf) == 0.0);
    CHECK(std::abs(inner_product(chemotaxis_div(n, c, 2.0), ScalarField(g, 1.0))) <=
          1e-13 * 2.0 * norm(n, NormKind::L2) * norm(c, NormKind::H1Semi));
    CHECK_THROWS_AS(chemotaxis_div(n, c, -1.0), InvalidArgument);

    // One face by hand: c rises from cell (3,2) to (4,2), so n is taken from (3,2).
    ScalarField cc(g);
    cc(4, 2) = 1.0;
    ScalarField nn(g, 1.0);
    nn(3, 2) = 5.0;
    const ScalarField r = chemotaxis_div(nn, cc, 1.0);
    const double flux = 5.0 * (1.0 / g.dx) / g.dx;
    CHECK(r(3, 2) == doctest::Approx(flux));
}

TEST_CASE("consumption is pointwise n f(c)") {
    const Grid g = make_grid(8, 8, 1.0, 1.0);
    const ConsumptionLaw f = make_consumption_law("linear");
    const ScalarField r = consumption(ScalarField(g, 2.0), ScalarField(g, 3.0), f);
    for (double v : r.values()) CHECK(v == 6.0);
    CHECK(norm(consumption(ScalarField(g, 2.0), ScalarField(g, 0.0), f), NormKind::Linf) == 0.0);

    std::mt19937_64 rng(1);
    ScalarField n = random_scalar(g, rng), c = random_scalar(g, rng);
    for (double& v : n.values()) v = std::abs(v);
    for (double& v : c.values()) v = std::abs(v);
    for (const char* name : {"linear", "michaelis_menten", "quadratic"}) {
        const ScalarField r = consumption(n, c, make_consumption_law(name));
        for (double v : r.values()) CHECK(v >= 0.0);
    }
    CHECK_THROWS(make_consumption_law("cubic"));
}

TEST_CASE("buoyancy") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    std::mt19937_64 rng(3);
    const ScalarField n = random_scalar(g, rng);
    CHECK(norm(buoyancy(n, ScalarField(g, 2.0)), NormKind::Linf) == 0.0);

    const ScalarField height = sampled(g, [](double, double y) { return y; });
    ScalarField twice = n;
    twice *= 2.0;
    VectorField expected = buoyancy(n, height);
    expected *= 2.0;
    CHECK(max_abs_diff(buoyancy(twice, height), expected) <= 1e-15);

    const VectorField b = buoyancy(ScalarField(g, 1.0), height);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) CHECK(b.ux(i, j) == 0.0);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(b.uy(i, j) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pressure recovery") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    PhysicalCoefficients pc;
    NoiseSettings ns;
    const ScalarField height = sampled(g, [](double, double y) { return y; });

    SUBCASE("hydrostatic balance") {
        const SimParams p = make_sim_params(g, pc, height, "linear", ns);
        const State s{VectorField(g), ScalarField(g, 0.2), ScalarField(g, 1.0), 0.0};
        const ScalarField pr = recover_pressure(s, p);
        const double slope = (pr(0, 1) - pr(0, 0)) / g.dy;
        CHECK(std::abs(slope) == doctest::Approx(1.0).epsilon(1e-10));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                CHECK(pr(i, j) == doctest::Approx(pr(0, 0) + slope * (g.yc(j) - g.yc(0))).epsilon(1e-10));
        CHECK(std::abs(inner_product(pr, ScalarField(g, 1.0))) <= 1e-12);
    }
    SUBCASE("no forcing") {
        const SimParams p = make_sim_params(g, pc, ScalarField(g), "linear", ns);
        const State s{VectorField(g), ScalarField(g, 0.2), ScalarField(g, 1.0), 0.0};
        CHECK(norm(recover_pressure(s, p), NormKind::Linf) == 0.0);
    }
    SUBCASE("moving fluid still has zero mean") {
        const SimParams p = make_sim_params(g, pc, height, "linear", ns);
        std::mt19937_64 rng(7);
        const State s{helmholtz_project(random_vector(g, rng)), ScalarField(g, 0.2), random_scalar(g, rng), 0.0};
        CHECK(std::abs(inner_product(recover_pressure(s, p), ScalarField(g, 1.0))) <= 1e-12);
    }
}
