#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stochem/model.hpp"

namespace stochem {

/// Raised for malformed configuration text. The message names the
/// offending section.key and the violated constraint.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Named scalar initial condition.
///  uniform:          value
///  gaussian_blob:    value + amplitude exp(-|x - x0|^2 / (2 width^2))
///  linear_gradient:  low -> high along axis (x or y)
///  cosine_mode:      value + amplitude cos(kx pi x / lx) cos(ky pi y / ly)
struct ScalarRecipe {
    std::string kind = "uniform";
    double value = 0.0;
    double amplitude = 0.0;
    double x0 = 0.5;
    double y0 = 0.5;
    double width = 0.1;
    double low = 0.0;
    double high = 0.0;
    char axis = 'y';
    int kx = 1;
    int ky = 0;
};

/// Velocity initial condition: "rest" or "taylor_vortex_pair" (two
/// counter-rotating Gaussian vortices, projected, peak face speed = amplitude).
struct VelocityRecipe {
    std::string kind = "rest";
    double amplitude = 0.0;
    double width = 0.1;
};

struct RunConfig {
    // [grid]
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;
    // [physics]
    PhysicalCoefficients physics{};
    std::string f_name = "linear";
    /// "height" (Phi = strength * y), "none" (Phi = 0)
    std::string phi_kind = "height";
    double phi_strength = 1.0;
    AdvectionMode scalar_advection = AdvectionMode::UpwindFlux;
    double cfl_safety = 0.5;
    double dt_max = 1e-2;
    // [noise]
    NoiseSettings noise{};
    // [time]
    double t_end = 1.0;
    double dt = 1e-3;
    int sample_every = 10;
    std::uint64_t seed = 1;
    // [ic]
    ScalarRecipe ic_n{};
    ScalarRecipe ic_c{};
    VelocityRecipe ic_u{};
    // [output]
    std::string output_directory = "out";
    int snapshot_every = 0;  // 0: final snapshot only
    std::vector<std::string> formats{"csv", "snapshot"};
    // [experiment]
    int replicas = 8;
    double perturbation = 1e-6;
    int levels = 4;
    double finest_dt = 0.0;  // 0: dt / 2^(levels-1)
    // [diagnostics]
    bool strict_gate = true;
    double k_gn = 1.0;
    std::optional<double> k0;
    double mass_tolerance = 1e-12;
    double max_c_tolerance = 1e-10;
    double entropy_bound_factor = 50.0;
};

/// Parses "[section]" / "key = value" text with '#' comments. Unknown
/// sections or keys, type mismatches and constraint violations are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

SimParams build_params(const RunConfig& cfg);

ScalarField make_scalar_ic(const Grid& grid, const ScalarRecipe& recipe);
VectorField make_velocity_ic(const Grid& grid, const VelocityRecipe& recipe);
State build_initial_state(const RunConfig& cfg, const Grid& grid);

}  // namespace stochem
