#pragma once

#include <cstdint>
#include <functional>

#include "stochem/diagnostics.hpp"
#include "stochem/model.hpp"

namespace stochem {

/// Advective step limit: safety / max over cells of the summed face rates
/// (|u| + chi |grad c|) / h, capped at dt_max. Diffusion is implicit.
double stable_dt(const State& state, const SimParams& params);

/// One semi-implicit Euler-Maruyama step of the Ito system:
///  1. n: explicit upwind transport and chemotaxis, implicit delta-diffusion;
///  2. c: explicit transport, consumption with the new n, transport noise,
///        implicit xi-diffusion;
///  3. u: explicit convection, buoyancy and velocity noise, implicit
///        eta-diffusion, projection.
/// Throws CflError when dt exceeds stable_dt.
State step(const State& state, const SimParams& params, const NoiseIncrement& inc, double dt,
           StepReport* report = nullptr);

/// Pressure implied by the projection of the deterministic momentum forcing,
/// normalised to zero mean.
ScalarField recover_pressure(const State& state, const SimParams& params);

struct RunOptions {
    std::uint32_t replica = 0;
    /// When > 1, each step's increment is the sum of `nest_factor` fine
    /// increments of size dt / nest_factor, so runs at dt and dt / 2^k share a path.
    int nest_factor = 1;
    /// Skip the per-step diagnostics bookkeeping (series stays empty).
    bool record = true;
    /// Called after every completed step.
    std::function<void(const State&, const StepReport&, std::int64_t)> observer;
};

struct RunResult {
    State final_state;
    DiagnosticsSeries series;
    std::int64_t steps = 0;
    std::int64_t clip_count = 0;
};

/// Advances with fixed dt up to t_end, landing exactly on it with a shorter
/// final step. Rows are taken at step 0, every sample_every steps and at the
/// end. Failures are rethrown as StepError carrying the step index.
RunResult run(const State& initial, const SimParams& params, double t_end, double dt,
              std::uint64_t seed, int sample_every, const RunOptions& options = {});

}  // namespace stochem
