#pragma once

#include "stochem/grid.hpp"

namespace stochem::spectral {

/// Solves lap_h(p) = rhs with homogeneous Neumann conditions by cosine
/// transforms. The constant mode is pinned to zero, so the result has zero
/// mean and any incompatible mean in rhs is discarded.
ScalarField poisson_neumann(const ScalarField& rhs);

/// Solves (I - beta lap_h) x = rhs with homogeneous Neumann conditions.
ScalarField helmholtz_neumann(const ScalarField& rhs, double beta);

/// Solves (I - beta lap_h) u = rhs componentwise on the interior faces of a
/// staggered field with no-slip walls. Boundary-normal faces are returned as 0.
VectorField helmholtz_velocity(const VectorField& rhs, double beta);

/// Eigenvalue of -lap_h for the cell-centred Neumann mode k on n cells of width h.
double neumann_eigenvalue(int k, int n, double h);

}  // namespace stochem::spectral
