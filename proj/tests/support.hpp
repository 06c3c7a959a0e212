#pragma once

// Shared fixtures for the unit tests and the acceptance binary.

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "stochem/config.hpp"
#include "stochem/grid.hpp"
#include "stochem/io.hpp"

namespace stochem::testing {

inline ScalarField random_scalar(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarField f(g);
    for (double& v : f.values()) v = d(rng);
    return f;
}

inline VectorField random_vector(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    VectorField f(g);
    for (double& v : f.ux_values()) v = d(rng);
    for (double& v : f.uy_values()) v = d(rng);
    f.enforce_no_slip();
    return f;
}

inline ScalarField sampled(const Grid& g, auto&& fn) {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = fn(g.xc(i), g.yc(j));
    return f;
}

/// 64x64 plume: Gaussian cells, oxygen gradient below the admissible bound,
/// vortex-pair flow, buoyancy Phi = y, transport and velocity noise on.
inline std::string reference_config(int nx = 64, double t_end = 2.0, double dt = 1e-3) {
    return "[grid]\nnx = " + std::to_string(nx) + "\nny = " + std::to_string(nx) +
           "\n"
           "[physics]\n"
           "eta = 0.05\nmu = 0.1\ndelta = 1\nchi = 1\ngamma = 0.05\nf_name = linear\nphi_kind = height\n"
           "[noise]\n"
           "k_modes = 4\namplitude = 0.05\nmode_decay_exponent = 2\nsigma_cutoff_width = 1\n"
           "[time]\n"
           "t_end = " + format_double(t_end) + "\ndt = " + format_double(dt) +
           "\nsample_every = 1\nseed = 7\n"
           "[ic]\n"
           "n_kind = gaussian_blob\nn_value = 0.1\nn_amplitude = 1.0\nn_x0 = 0.5\nn_y0 = 0.3\nn_width = 0.1\n"
           "c_kind = linear_gradient\nc_low = 0.05\nc_high = 0.35\nc_axis = y\n"
           "u_kind = taylor_vortex_pair\nu_amplitude = 0.5\n";
}

/// Same physics with every noise source switched off.
inline std::string deterministic_config(int nx, double t_end, double dt) {
    std::string text = reference_config(nx, t_end, dt);
    auto replace = [&](const std::string& from, const std::string& to) {
        const auto pos = text.find(from);
        text.replace(pos, from.size(), to);
    };
    replace("gamma = 0.05", "gamma = 0");
    replace("amplitude = 0.05", "amplitude = 0");
    return text;
}

}  // namespace stochem::testing
