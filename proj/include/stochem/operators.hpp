#pragma once

#include <functional>
#include <string>

#include "stochem/grid.hpp"

namespace stochem {

/// Raised when an iterative solve hits its iteration cap.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Discretisation of transport terms.
///
/// CenteredSkew keeps the transport pairings energy-neutral: for velocity it
/// is the skew form 1/2[(u.grad)v + div(u (x) v)], for scalars the centred
/// conservative flux (skew whenever u is discretely divergence-free).
/// UpwindFlux is first-order, conservative, dissipative and monotone.
enum class AdvectionMode { CenteredSkew, UpwindFlux };

enum class PoissonSolver { Spectral, ConjugateGradient };

struct ProjectionOptions {
    PoissonSolver solver = PoissonSolver::Spectral;
    double cg_relative_tolerance = 1e-12;
    int cg_max_iterations = 20000;
};

/// Consumption law f(c) of the oxygen equation.
struct ConsumptionLaw {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
};

/// "linear" f = c, "michaelis_menten" f = c / (1 + c), "quadratic" f = c^2.
ConsumptionLaw make_consumption_law(const std::string& name);

/// Solves lap_h p = rhs (Neumann, zero mean) with conjugate gradients.
/// Throws SolverError if the relative residual target is not reached.
ScalarField poisson_neumann_cg(const ScalarField& rhs, double relative_tolerance,
                               int max_iterations, int* iterations = nullptr);

/// MAC gradient of a cell-centred field; boundary-normal faces are zero.
VectorField gradient(const ScalarField& p);

/// Leray projection onto discretely divergence-free fields with no normal flow.
VectorField helmholtz_project(const VectorField& v, const ProjectionOptions& options = {});

/// Returns lap_h(phi), the flux-form five-point Laplacian with zero boundary flux.
ScalarField laplacian_neumann(const ScalarField& phi);

/// Returns the componentwise staggered Laplacian with no-slip ghosts.
VectorField stokes_apply(const VectorField& u);

/// Returns (u.grad)v on the staggered layout.
VectorField convect_velocity(const VectorField& u, const VectorField& v, AdvectionMode mode);

/// Returns div(u phi) in flux form; boundary fluxes vanish under no-slip.
ScalarField scalar_advect(const VectorField& u, const ScalarField& phi, AdvectionMode mode);

/// Returns div(chi n_face grad c) with n upwinded by the sign of the face gradient.
ScalarField chemotaxis_div(const ScalarField& n, const ScalarField& c, double chi);

/// Returns n f(c) pointwise.
ScalarField consumption(const ScalarField& n, const ScalarField& c, const ConsumptionLaw& f);

/// Returns n grad(Phi) on interior faces (before projection).
VectorField buoyancy(const ScalarField& n, const ScalarField& potential);

}  // namespace stochem
