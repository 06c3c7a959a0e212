#include "stochem/model.hpp"

#include <cmath>

namespace stochem {

double resolve_xi(double eta, double mu, double gamma, XiMode mode) {
    switch (mode) {
        case XiMode::Corrected: return mu + 0.5 * gamma * gamma;
        case XiMode::Literal: return eta + 0.5 * gamma * gamma;
        case XiMode::Uncorrected: return mu;
    }
    throw InvalidArgument("resolve_xi: unknown mode");
}

XiMode parse_xi_mode(const std::string& text) {
    if (text == "corrected") return XiMode::Corrected;
    if (text == "literal") return XiMode::Literal;
    if (text == "uncorrected") return XiMode::Uncorrected;
    throw InvalidArgument("xi_mode: expected corrected|literal|uncorrected, got '" + text + "'");
}

std::string to_string(XiMode mode) {
    switch (mode) {
        case XiMode::Corrected: return "corrected";
        case XiMode::Literal: return "literal";
        case XiMode::Uncorrected: return "uncorrected";
    }
    return "unknown";
}

SimParams make_sim_params(const Grid& grid, const PhysicalCoefficients& coeffs,
                          const ScalarField& potential, const std::string& consumption_law,
                          const NoiseSettings& noise) {
    require_same_grid(grid, potential.grid(), "make_sim_params");
    SimParams p;
    p.eta = coeffs.eta;
    p.mu = coeffs.mu;
    p.delta = coeffs.delta;
    p.chi = coeffs.chi;
    p.gamma = coeffs.gamma;
    p.xi_mode = coeffs.xi_mode;
    p.xi = resolve_xi(coeffs.eta, coeffs.mu, coeffs.gamma, coeffs.xi_mode);
    p.phi = potential;
    p.f = make_consumption_law(consumption_law);
    p.sigma = make_transport_sigma(grid, noise.sigma_cutoff_width);
    p.vnoise = make_velocity_noise(grid, noise.k_modes, noise.amplitude, noise.mode_decay_exponent,
                                   noise.multiplicative_gain);
    validate(p);
    return p;
}

namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) throw InvalidArgument(field + ": " + constraint);
}

}  // namespace

void validate(const SimParams& p) {
    require(std::isfinite(p.eta) && p.eta > 0.0, "eta", "must be positive");
    require(std::isfinite(p.mu) && p.mu > 0.0, "mu", "must be positive");
    require(std::isfinite(p.delta) && p.delta > 0.0, "delta", "must be positive");
    require(std::isfinite(p.chi) && p.chi >= 0.0, "chi", "must be non-negative");
    require(std::isfinite(p.gamma) && p.gamma >= 0.0, "gamma", "must be non-negative");
    require(std::isfinite(p.xi) && p.xi > 0.0, "xi", "must be positive");
    if (p.xi_mode == XiMode::Corrected) require(p.xi >= p.mu, "xi", "must be >= mu in corrected mode");
    require(p.phi.size() > 0 && p.phi.all_finite(), "phi", "must be a finite field");
    require(static_cast<bool>(p.f.eval) && static_cast<bool>(p.f.deriv), "f", "consumption law not set");
    require(p.sigma.sigma1.grid() == p.grid() && p.sigma.sigma2.grid() == p.grid(), "sigma", "grid mismatch");
    require(p.vnoise.amplitude >= 0.0, "amplitude", "must be non-negative");
    require(p.vnoise.modes.size() == static_cast<std::size_t>(p.vnoise.n_modes), "k_modes",
            "mode table inconsistent");
    for (const auto& m : p.vnoise.modes) require(m.grid() == p.grid(), "k_modes", "mode grid mismatch");
    require(p.cfl_safety > 0.0 && p.cfl_safety <= 1.0, "cfl_safety", "must lie in (0, 1]");
    require(p.dt_max > 0.0, "dt_max", "must be positive");
    require(p.k_gn > 0.0, "k_gn", "must be positive");
    if (p.k0) require(*p.k0 > 0.0, "k0", "must be positive");
}

SimParams with_gamma(SimParams params, double gamma) {
    params.gamma = gamma;
    params.xi = resolve_xi(params.eta, params.mu, gamma, params.xi_mode);
    return params;
}

SimParams with_xi_mode(SimParams params, XiMode mode) {
    params.xi_mode = mode;
    params.xi = resolve_xi(params.eta, params.mu, params.gamma, mode);
    return params;
}

}  // namespace stochem
