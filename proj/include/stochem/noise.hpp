#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "stochem/grid.hpp"

namespace stochem {

/// The pair of transport-noise fields sigma_1, sigma_2.
///
/// The canonical construction is sigma_k = e_k on every face farther than
/// cutoff_width cells from the wall and 0 on the ring within it, so q(x,x) = Id
/// on the interior block and sigma vanishes at the boundary.
struct TransportSigma {
    VectorField sigma1;
    VectorField sigma2;
    /// max_k |sigma_k|_Linf
    double linf = 0.0;
    /// (sum_k |sigma_k|_Linf^2)^(1/2), the family norm entering the noise-size conditions
    double linf_family = 0.0;
    /// (sum_k |sigma_k|_W1inf^2)^(1/2) with one-sided face differences
    double w1inf = 0.0;
    int cutoff_width = 1;
};

TransportSigma make_transport_sigma(const Grid& grid, int cutoff_width);

/// Recomputes linf, linf_family and w1inf from the stored fields.
void refresh_sigma_norms(TransportSigma& sigma);

/// True for cells strictly inside the cutoff ring, where q(x,x) = Id.
bool sigma_interior(const Grid& grid, int cutoff_width, int i, int j);

struct AssumptionReport {
    double max_interior_divergence = 0.0;
    int boundary_violations = 0;
    double max_q_deviation = 0.0;
    double linf = 0.0;
    double linf_family = 0.0;
    double w1inf = 0.0;
};

AssumptionReport check_sigma_assumptions(const TransportSigma& sigma);

/// Brownian increments for one step: K modes of W and the two components of beta.
struct NoiseIncrement {
    std::vector<double> dw;
    std::array<double, 2> dbeta{0.0, 0.0};
    double dt = 0.0;
    std::int64_t step_index = 0;
    std::uint32_t replica_index = 0;
    std::uint64_t seed = 0;
};

/// Normal(0, dt) increments addressed by (seed, replica, step, mode).
NoiseIncrement sample_increments(std::uint64_t seed, std::uint32_t replica, std::int64_t step,
                                 double dt, int k_modes);

/// Increment of coarse step `step` built as the exact sum of `factor` fine
/// increments of size fine_dt, so refinement levels share one Brownian path.
NoiseIncrement nested_increments(std::uint64_t seed, std::uint32_t replica, std::int64_t step,
                                 double fine_dt, int factor, int k_modes);

/// Returns (gamma^2 / 2) lap_h(c).
ScalarField ito_correction(const ScalarField& c, double gamma);

/// Discrete sigma_k . grad.
///
/// Advective: face-averaged sigma times one-sided differences; annihilates
/// constants everywhere and equals the centred derivative where sigma = e_k.
/// Skew: (sigma_{i+1/2} c_{i+1} - sigma_{i-1/2} c_{i-1}) / 2h; exactly
/// skew-adjoint for any sigma, equal to Advective where div sigma = 0.
enum class NoiseGradient { Advective, Skew };

ScalarField sigma_gradient(const ScalarField& c, const VectorField& sigma_k, NoiseGradient kind);

/// Returns gamma sum_k (sigma_k . grad c) dbeta^k.
ScalarField transport_noise_apply(const ScalarField& c, const TransportSigma& sigma, double gamma,
                                  const NoiseIncrement& inc,
                                  NoiseGradient kind = NoiseGradient::Advective);

/// Finite-mode velocity noise g(u, c) dW = eps (1 + gain tanh|u|) sum_k lambda_k psi_k dW^k.
struct VelocityNoiseConfig {
    int n_modes = 0;
    double amplitude = 0.0;
    double decay_exponent = 2.0;
    double multiplicative_gain = 0.0;
    std::vector<double> lambda;
    /// Unit-L2, exactly divergence-free modes (discrete curl of a nodal stream function).
    std::vector<VectorField> modes;
    /// Growth constant: |g(u,c)|_HS <= l_g (1 + |(u,c)|)
    double l_g = 0.0;
    /// Lipschitz constant of (u,c) -> g(u,c) in Hilbert-Schmidt norm
    double l_lip = 0.0;
};

VelocityNoiseConfig make_velocity_noise(const Grid& grid, int n_modes, double amplitude,
                                        double decay_exponent, double multiplicative_gain);

VectorField g_apply(const VectorField& u, const ScalarField& c, const VelocityNoiseConfig& cfg,
                    const NoiseIncrement& inc);

/// Hilbert-Schmidt norm of the operator dW -> g(u,c) dW.
double g_hilbert_schmidt(const VectorField& u, const ScalarField& c, const VelocityNoiseConfig& cfg);

}  // namespace stochem
