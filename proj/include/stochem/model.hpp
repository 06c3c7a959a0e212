#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "stochem/grid.hpp"
#include "stochem/noise.hpp"
#include "stochem/operators.hpp"

namespace stochem {

/// How the effective oxygen diffusivity xi is resolved.
///  Corrected:   xi = mu + gamma^2/2 (Ito correction added to the oxygen diffusivity)
///  Literal:     xi = eta + gamma^2/2 (literal coefficient of the abstract system)
///  Uncorrected: xi = mu (noise read as Ito without correction; experiments only)
enum class XiMode { Corrected, Literal, Uncorrected };

double resolve_xi(double eta, double mu, double gamma, XiMode mode);
XiMode parse_xi_mode(const std::string& text);
std::string to_string(XiMode mode);

struct SimParams {
    double eta = 1.0;    // fluid viscosity
    double mu = 1.0;     // oxygen diffusivity
    double delta = 1.0;  // cell diffusivity
    double chi = 0.0;    // chemotactic sensitivity
    double gamma = 0.0;  // transport-noise intensity
    XiMode xi_mode = XiMode::Corrected;
    double xi = 1.0;     // effective oxygen diffusivity, see resolve_xi
    ScalarField phi;     // gravitational potential
    ConsumptionLaw f;
    VelocityNoiseConfig vnoise;
    TransportSigma sigma;

    AdvectionMode scalar_advection = AdvectionMode::UpwindFlux;
    AdvectionMode velocity_advection = AdvectionMode::CenteredSkew;
    NoiseGradient noise_gradient = NoiseGradient::Advective;
    ProjectionOptions projection{};

    double cfl_safety = 0.5;
    double dt_max = 1e-2;
    /// Gagliardo-Nirenberg constant in the velocity weight of the entropy functional.
    double k_gn = 1.0;
    /// Elliptic-regularity constant of the noise-size condition; estimated when unset.
    std::optional<double> k0;

    [[nodiscard]] const Grid& grid() const { return phi.grid(); }
};

/// Builds parameters with derived xi, canonical sigma and velocity-noise modes.
struct PhysicalCoefficients {
    double eta = 1.0;
    double mu = 1.0;
    double delta = 1.0;
    double chi = 0.0;
    double gamma = 0.0;
    XiMode xi_mode = XiMode::Corrected;
};

struct NoiseSettings {
    int k_modes = 4;
    double amplitude = 0.0;
    double mode_decay_exponent = 2.0;
    double multiplicative_gain = 0.0;
    int sigma_cutoff_width = 1;
};

SimParams make_sim_params(const Grid& grid, const PhysicalCoefficients& coeffs,
                          const ScalarField& potential, const std::string& consumption_law,
                          const NoiseSettings& noise);

/// Checks every SimParams invariant; throws InvalidArgument naming the field.
void validate(const SimParams& params);

/// Returns a copy with gamma (and xi) replaced, keeping the xi mode.
SimParams with_gamma(SimParams params, double gamma);
/// Returns a copy with a different xi mode.
SimParams with_xi_mode(SimParams params, XiMode mode);

struct State {
    VectorField u;
    ScalarField c;
    ScalarField n;
    double t = 0.0;

    [[nodiscard]] const Grid& grid() const { return c.grid(); }
    friend bool operator==(const State&, const State&) = default;
};

struct StepReport {
    double dt = 0.0;
    std::int64_t clip_count = 0;
    double projection_residual = 0.0;
    int solver_iterations = 0;
};

/// Raised when dt exceeds the advective stability limit.
class CflError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A step failure inside run(), tagged with the failing step index.
class StepError : public std::runtime_error {
public:
    StepError(std::int64_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
    [[nodiscard]] std::int64_t step() const { return step_; }

private:
    std::int64_t step_;
};

}  // namespace stochem
