#include "stochem/operators.hpp"

#include <cmath>

#include "stochem/spectral.hpp"

namespace stochem {

ConsumptionLaw make_consumption_law(const std::string& name) {
    if (name == "linear") {
        return {name, [](double c) { return c; }, [](double) { return 1.0; }};
    }
    if (name == "michaelis_menten") {
        return {name, [](double c) { return c / (1.0 + c); },
                [](double c) { return 1.0 / ((1.0 + c) * (1.0 + c)); }};
    }
    if (name == "quadratic") {
        return {name, [](double c) { return c * c; }, [](double c) { return 2.0 * c; }};
    }
    throw InvalidArgument("unknown consumption law '" + name +
                          "' (expected linear, michaelis_menten or quadratic)");
}

// ---------------------------------------------------------------------------
// Elliptic pieces

ScalarField laplacian_neumann(const ScalarField& phi) {
    const Grid& g = phi.grid();
    const double idx2 = 1.0 / (g.dx * g.dx);
    const double idy2 = 1.0 / (g.dy * g.dy);
    ScalarField out(g);
    // Accumulate face fluxes so that interior faces telescope exactly.
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double flux = (phi(i + 1, j) - phi(i, j)) * idx2;
            out(i, j) += flux;
            out(i + 1, j) -= flux;
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double flux = (phi(i, j + 1) - phi(i, j)) * idy2;
            out(i, j) += flux;
            out(i, j + 1) -= flux;
        }
    }
    return out;
}

ScalarField poisson_neumann_cg(const ScalarField& rhs, double relative_tolerance,
                               int max_iterations, int* iterations) {
    const Grid& g = rhs.grid();
    // Work with A = -lap_h (symmetric positive semidefinite) on the mean-zero subspace.
    ScalarField b = rhs;
    b *= -1.0;
    double mean = 0.0;
    for (double v : b.values()) mean += v;
    mean /= static_cast<double>(b.size());
    for (double& v : b.values()) v -= mean;

    ScalarField x(g);
    ScalarField r = b;
    ScalarField p = r;
    const double bnorm = std::sqrt(inner_product(b, b));
    if (iterations) *iterations = 0;
    if (bnorm == 0.0) return x;
    double rr = inner_product(r, r);
    for (int it = 1; it <= max_iterations; ++it) {
        ScalarField ap = laplacian_neumann(p);
        ap *= -1.0;
        const double alpha = rr / inner_product(p, ap);
        x.axpy(alpha, p);
        r.axpy(-alpha, ap);
        const double rr_new = inner_product(r, r);
        if (std::sqrt(rr_new) <= relative_tolerance * bnorm) {
            if (iterations) *iterations = it;
            double xm = 0.0;
            for (double v : x.values()) xm += v;
            xm /= static_cast<double>(x.size());
            for (double& v : x.values()) v -= xm;
            return x;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
    }
    throw SolverError("poisson_neumann_cg: no convergence to relative residual " +
                      std::to_string(relative_tolerance) + " within " +
                      std::to_string(max_iterations) + " iterations");
}

VectorField gradient(const ScalarField& p) {
    const Grid& g = p.grid();
    VectorField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) out.ux(i, j) = (p(i, j) - p(i - 1, j)) / g.dx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.uy(i, j) = (p(i, j) - p(i, j - 1)) / g.dy;
    return out;
}

VectorField helmholtz_project(const VectorField& v, const ProjectionOptions& options) {
    VectorField w = v;
    w.enforce_no_slip();
    const ScalarField div = divergence(w);
    ScalarField p = options.solver == PoissonSolver::Spectral
                        ? spectral::poisson_neumann(div)
                        : poisson_neumann_cg(div, options.cg_relative_tolerance,
                                             options.cg_max_iterations);
    w -= gradient(p);
    return w;
}

VectorField stokes_apply(const VectorField& u) {
    const Grid& g = u.grid();
    const int nx = g.nx;
    const int ny = g.ny;
    const double idx2 = 1.0 / (g.dx * g.dx);
    const double idy2 = 1.0 / (g.dy * g.dy);
    VectorField out(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double c = u.ux(i, j);
            const double s = j > 0 ? u.ux(i, j - 1) : -c;
            const double n = j + 1 < ny ? u.ux(i, j + 1) : -c;
            out.ux(i, j) = (u.ux(i + 1, j) - 2.0 * c + u.ux(i - 1, j)) * idx2 + (n - 2.0 * c + s) * idy2;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double c = u.uy(i, j);
            const double w = i > 0 ? u.uy(i - 1, j) : -c;
            const double e = i + 1 < nx ? u.uy(i + 1, j) : -c;
            out.uy(i, j) = (e - 2.0 * c + w) * idx2 + (u.uy(i, j + 1) - 2.0 * c + u.uy(i, j - 1)) * idy2;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transport

namespace {

double face_value(double flux, double left, double right, AdvectionMode mode) {
    if (mode == AdvectionMode::UpwindFlux) return flux >= 0.0 ? left : right;
    return 0.5 * (left + right);
}

}  // namespace

VectorField convect_velocity(const VectorField& u, const VectorField& v, AdvectionMode mode) {
    require_same_grid(u.grid(), v.grid(), "convect_velocity");
    const Grid& g = u.grid();
    const int nx = g.nx;
    const int ny = g.ny;
    const bool skew = mode == AdvectionMode::CenteredSkew;
    VectorField out(g);

    // x-momentum control volumes centred on interior vertical faces.
    auto vx = [&](int i, int j) {
        if (j < 0) return -v.ux(i, 0);
        if (j >= ny) return -v.ux(i, ny - 1);
        return v.ux(i, j);
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double fe = 0.5 * (u.ux(i, j) + u.ux(i + 1, j));
            const double fw = 0.5 * (u.ux(i - 1, j) + u.ux(i, j));
            const double fn = 0.5 * (u.uy(i - 1, j + 1) + u.uy(i, j + 1));
            const double fs = 0.5 * (u.uy(i - 1, j) + u.uy(i, j));
            const double c = v.ux(i, j);
            const double pe = face_value(fe, c, v.ux(i + 1, j), mode);
            const double pw = face_value(fw, v.ux(i - 1, j), c, mode);
            const double pn = face_value(fn, c, vx(i, j + 1), mode);
            const double ps = face_value(fs, vx(i, j - 1), c, mode);
            double r = (fe * pe - fw * pw) / g.dx + (fn * pn - fs * ps) / g.dy;
            if (skew) r -= 0.5 * c * ((fe - fw) / g.dx + (fn - fs) / g.dy);
            out.ux(i, j) = r;
        }
    }

    // y-momentum control volumes centred on interior horizontal faces.
    auto vy = [&](int i, int j) {
        if (i < 0) return -v.uy(0, j);
        if (i >= nx) return -v.uy(nx - 1, j);
        return v.uy(i, j);
    };
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double fn = 0.5 * (u.uy(i, j) + u.uy(i, j + 1));
            const double fs = 0.5 * (u.uy(i, j - 1) + u.uy(i, j));
            const double fe = 0.5 * (u.ux(i + 1, j - 1) + u.ux(i + 1, j));
            const double fw = 0.5 * (u.ux(i, j - 1) + u.ux(i, j));
            const double c = v.uy(i, j);
            const double pn = face_value(fn, c, v.uy(i, j + 1), mode);
            const double ps = face_value(fs, v.uy(i, j - 1), c, mode);
            const double pe = face_value(fe, c, vy(i + 1, j), mode);
            const double pw = face_value(fw, vy(i - 1, j), c, mode);
            double r = (fe * pe - fw * pw) / g.dx + (fn * pn - fs * ps) / g.dy;
            if (skew) r -= 0.5 * c * ((fe - fw) / g.dx + (fn - fs) / g.dy);
            out.uy(i, j) = r;
        }
    }
    return out;
}

ScalarField scalar_advect(const VectorField& u, const ScalarField& phi, AdvectionMode mode) {
    require_same_grid(u.grid(), phi.grid(), "scalar_advect");
    const Grid& g = u.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double f = u.ux(i, j);
            const double flux = f * face_value(f, phi(i - 1, j), phi(i, j), mode) / g.dx;
            out(i - 1, j) += flux;
            out(i, j) -= flux;
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double f = u.uy(i, j);
            const double flux = f * face_value(f, phi(i, j - 1), phi(i, j), mode) / g.dy;
            out(i, j - 1) += flux;
            out(i, j) -= flux;
        }
    }
    return out;
}

ScalarField chemotaxis_div(const ScalarField& n, const ScalarField& c, double chi) {
    require_same_grid(n.grid(), c.grid(), "chemotaxis_div");
    if (chi < 0.0) throw InvalidArgument("chemotaxis_div: chi must be non-negative");
    const Grid& g = n.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            const double grad = (c(i, j) - c(i - 1, j)) / g.dx;
            const double nf = grad >= 0.0 ? n(i - 1, j) : n(i, j);
            const double flux = chi * nf * grad / g.dx;
            out(i - 1, j) += flux;
            out(i, j) -= flux;
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double grad = (c(i, j) - c(i, j - 1)) / g.dy;
            const double nf = grad >= 0.0 ? n(i, j - 1) : n(i, j);
            const double flux = chi * nf * grad / g.dy;
            out(i, j - 1) += flux;
            out(i, j) -= flux;
        }
    }
    return out;
}

ScalarField consumption(const ScalarField& n, const ScalarField& c, const ConsumptionLaw& f) {
    require_same_grid(n.grid(), c.grid(), "consumption");
    ScalarField out(n.grid());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = n[k] * f.eval(c[k]);
    return out;
}

VectorField buoyancy(const ScalarField& n, const ScalarField& potential) {
    require_same_grid(n.grid(), potential.grid(), "buoyancy");
    const Grid& g = n.grid();
    VectorField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 1; i < g.nx; ++i) {
            out.ux(i, j) = 0.5 * (n(i - 1, j) + n(i, j)) * (potential(i, j) - potential(i - 1, j)) / g.dx;
        }
    }
    for (int j = 1; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            out.uy(i, j) = 0.5 * (n(i, j - 1) + n(i, j)) * (potential(i, j) - potential(i, j - 1)) / g.dy;
        }
    }
    return out;
}

}  // namespace stochem
