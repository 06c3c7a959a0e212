// Command-line front end: run, check-params, experiment, snapshot-info.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "stochem/config.hpp"
#include "stochem/diagnostics.hpp"
#include "stochem/dynamics.hpp"
#include "stochem/experiments.hpp"
#include "stochem/io.hpp"

namespace fs = std::filesystem;
using namespace stochem;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kGateRefused = 2, kInvariantViolated = 3 };

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool allow_inadmissible = false;
    int threads = 0;
};

struct Setup {
    RunConfig cfg;
    SimParams params;
    State initial;
    fs::path out_dir;
};

Setup load(const CommonOptions& o) {
    Setup s;
    s.cfg = load_config(o.config);
    if (o.seed) s.cfg.seed = *o.seed;
    if (!o.out.empty()) s.cfg.output_directory = o.out;
    s.params = build_params(s.cfg);
    s.initial = build_initial_state(s.cfg, s.params.grid());
    s.out_dir = s.cfg.output_directory;
    return s;
}

void print_gate(const GateReport& g, std::ostream& os) {
    auto line = [&](const char* name, bool ok, double margin) {
        os << "  " << name << ": " << (ok ? "pass" : "FAIL") << " (margin " << format_double(margin) << ")\n";
    };
    os << "admissibility report\n";
    os << "  K_f = " << format_double(g.kf) << ", |c0|_inf = " << format_double(g.c0_linf)
       << ", admissible |c0|_inf bound = " << format_double(g.c0_bound) << '\n';
    os << "  |sigma|_inf = " << format_double(g.sigma_linf) << ", K0 = " << format_double(g.k0_used) << '\n';
    line("cell-term condition", g.cell_condition_ok, g.cell_condition_margin);
    line("noise-size condition", g.noise_condition_ok, g.noise_condition_margin);
    line("noise-size condition (p = 2)", g.noise_condition_p_ok, g.noise_condition_p_margin);
    os << "  overall: " << (g.all_ok() ? "admissible" : "inadmissible") << '\n';
}

GateReport gate(const Setup& s) {
    return check_conditions(s.params, norm(s.initial.c, NormKind::Linf));
}

// Refuses to continue on an inadmissible set-up unless explicitly allowed.
bool gate_allows(const Setup& s, const CommonOptions& o) {
    if (!s.cfg.strict_gate || o.allow_inadmissible) return true;
    GateReport g;
    try {
        g = gate(s);
    } catch (const InvalidArgument& e) {
        std::cerr << "admissibility check failed: " << e.what() << '\n';
        return false;
    }
    if (g.all_ok()) return true;
    print_gate(g, std::cerr);
    std::cerr << "refusing to run inadmissible parameters (use --allow-inadmissible)\n";
    return false;
}

std::string snapshot_name(std::int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%08lld.cns", static_cast<long long>(step));
    return buf;
}

bool wants(const RunConfig& cfg, const std::string& fmt) {
    return std::find(cfg.formats.begin(), cfg.formats.end(), fmt) != cfg.formats.end();
}

int cmd_run(const CommonOptions& o) {
    const Setup s = load(o);
    if (!gate_allows(s, o)) return kGateRefused;
    fs::create_directories(s.out_dir);

    RunOptions opt;
    const bool snapshots = wants(s.cfg, "snapshot");
    if (snapshots && s.cfg.snapshot_every > 0) {
        opt.observer = [&](const State& st, const StepReport&, std::int64_t k) {
            if (k % s.cfg.snapshot_every == 0) write_snapshot(st, s.out_dir / snapshot_name(k));
        };
    }
    const RunResult r = run(s.initial, s.params, s.cfg.t_end, s.cfg.dt, s.cfg.seed, s.cfg.sample_every, opt);
    if (wants(s.cfg, "csv")) write_csv(r.series, s.out_dir / "diagnostics.csv");
    if (snapshots) write_snapshot(r.final_state, s.out_dir / "final.cns");

    std::cout << kCsvHeader << '\n' << csv_row(r.series.back()) << '\n';

    const DiagnosticsRow& first = r.series.front();
    double mass_drift = 0.0;
    double max_c = first.max_c;
    for (const auto& row : r.series) {
        if (first.mass_n != 0.0) mass_drift = std::max(mass_drift, std::abs(row.mass_n - first.mass_n) / std::abs(first.mass_n));
        max_c = std::max(max_c, row.max_c);
    }
    const double c0 = norm(s.initial.c, NormKind::Linf);
    bool ok = true;
    if (mass_drift > s.cfg.mass_tolerance) {
        std::cerr << "invariant violated: relative mass drift " << format_double(mass_drift) << " > "
                  << format_double(s.cfg.mass_tolerance) << '\n';
        ok = false;
    }
    if (max_c > c0 * (1.0 + s.cfg.max_c_tolerance)) {
        std::cerr << "invariant violated: max c " << format_double(max_c) << " exceeds initial sup "
                  << format_double(c0) << '\n';
        ok = false;
    }
    return ok ? kOk : kInvariantViolated;
}

int cmd_check_params(const CommonOptions& o) {
    const Setup s = load(o);
    const GateReport g = gate(s);
    print_gate(g, std::cout);
    return g.all_ok() ? kOk : kFailure;
}

std::vector<double> halving_levels(double coarse, int levels) {
    std::vector<double> out;
    for (int k = 0; k < levels; ++k) out.push_back(coarse / static_cast<double>(1LL << k));
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int exp_twin(const Setup& s) {
    const TwinReport z = twin_run(s.params, s.initial, s.cfg.seed, 0.0, s.cfg.t_end, s.cfg.dt, s.cfg.sample_every);
    const TwinReport p =
        twin_run(s.params, s.initial, s.cfg.seed, s.cfg.perturbation, s.cfg.t_end, s.cfg.dt, s.cfg.sample_every);
    std::ofstream out(s.out_dir / "twin.csv");
    out << "t,y_unperturbed,y_perturbed\n";
    for (std::size_t k = 0; k < p.t.size(); ++k)
        out << format_double(p.t[k]) << ',' << format_double(z.y[k]) << ',' << format_double(p.y[k]) << '\n';
    const bool identical = std::all_of(z.y.begin(), z.y.end(), [](double y) { return y == 0.0; });
    std::cout << "zero perturbation: separation " << (identical ? "identically 0" : "NONZERO") << '\n'
              << "perturbation " << format_double(s.cfg.perturbation) << ": growth envelope G = "
              << format_double(p.growth_envelope) << ", fitted slope = " << format_double(p.growth_slope) << '\n';
    return identical && std::isfinite(p.growth_envelope) ? kOk : kFailure;
}

int exp_convergence(const Setup& s, int threads) {
    const std::vector<double> levels = halving_levels(s.cfg.dt, s.cfg.levels);
    const auto n = static_cast<std::size_t>(s.cfg.replicas);
    std::vector<ConvergenceReport> reports(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < n; r = next++) {
            try {
                reports[r] = convergence_dt(s.params, s.initial, s.cfg.seed, levels, s.cfg.t_end, static_cast<std::uint32_t>(r));
            } catch (const std::exception& e) {
                errors[r] = e.what();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (int k = 1; k < std::min<int>(threads, static_cast<int>(n)); ++k) pool.emplace_back(worker);
        worker();
    }
    for (std::size_t r = 0; r < n; ++r)
        if (!errors[r].empty()) throw std::runtime_error("replica " + std::to_string(r) + ": " + errors[r]);

    std::ofstream out(s.out_dir / "convergence.csv");
    out << "replica,dt,error,slope\n";
    std::vector<double> slopes;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < reports[r].dt.size(); ++k)
            out << r << ',' << format_double(reports[r].dt[k]) << ',' << format_double(reports[r].error[k]) << ','
                << format_double(reports[r].slope) << '\n';
        slopes.push_back(reports[r].slope);
    }
    std::cout << "levels: " << levels.size() << ", finest dt " << format_double(levels.back())
              << ", median slope over " << n << " replicas: " << format_double(median(slopes)) << '\n';
    return kOk;
}

int exp_stratonovich(const Setup& s) {
    const StratonovichReport r =
        stratonovich_consistency(s.params, s.initial.c, s.cfg.seed, halving_levels(s.cfg.dt, s.cfg.levels), s.cfg.t_end);
    std::ofstream out(s.out_dir / "stratonovich.csv");
    out << "dt,drift_corrected,drift_uncorrected,drift_reference\n";
    for (std::size_t k = 0; k < r.dt.size(); ++k)
        out << format_double(r.dt[k]) << ',' << format_double(r.drift_corrected[k]) << ','
            << format_double(r.drift_uncorrected[k]) << ',' << format_double(r.drift_reference[k]) << '\n';
    std::cout << "halving ratios:";
    for (double q : r.halving_ratio) std::cout << ' ' << format_double(q);
    std::cout << "\ngap at finest level " << format_double(r.gap_finest) << " vs gamma^2 |grad c0|^2 "
              << format_double(r.gap_expected) << '\n';
    return kOk;
}

int exp_ensemble(const Setup& s, int threads) {
    EnsembleSpec spec;
    spec.n_replicas = s.cfg.replicas;
    spec.base_seed = s.cfg.seed;
    spec.params = s.params;
    spec.initial = s.initial;
    spec.t_end = s.cfg.t_end;
    spec.dt = s.cfg.dt;
    spec.sample_every = s.cfg.sample_every;
    spec.threads = threads;
    const EnsembleResult r = ensemble(spec);

    std::ofstream out(s.out_dir / "ensemble.csv");
    out << "step,t";
    for (const auto& c : ensemble_columns()) out << ',' << c << "_mean," << c << "_var," << c << "_max," << c << "_hw95";
    out << '\n';
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        out << r.step[k] << ',' << format_double(r.t[k]);
        for (const auto& c : ensemble_columns()) {
            const ColumnStats& st = r.columns.at(c);
            out << ',' << format_double(st.mean[k]) << ',' << format_double(st.variance[k]) << ','
                << format_double(st.max[k]) << ',' << format_double(st.half_width[k]);
        }
        out << '\n';
    }
    const double sup = *std::max_element(r.sup_entropy.begin(), r.sup_entropy.end());
    std::cout << r.sup_entropy.size() << " replicas, max sup_t E = " << format_double(sup) << " (E(0) = "
              << format_double(r.initial_entropy) << ", bound factor " << format_double(s.cfg.entropy_bound_factor)
              << ")\n";
    return sup <= s.cfg.entropy_bound_factor * r.initial_entropy ? kOk : kInvariantViolated;
}

int cmd_experiment(const CommonOptions& o, const std::string& which) {
    const Setup s = load(o);
    if (!gate_allows(s, o)) return kGateRefused;
    fs::create_directories(s.out_dir);
    const int threads = resolve_threads(o.threads);
    if (which == "twin") return exp_twin(s);
    if (which == "convergence") return exp_convergence(s, threads);
    if (which == "stratonovich") return exp_stratonovich(s);
    return exp_ensemble(s, threads);
}

int cmd_snapshot_info(const std::string& path) {
    const State s = read_snapshot(path);
    const Grid& g = s.grid();
    std::cout << "grid " << g.nx << "x" << g.ny << " on [0," << format_double(g.lx) << "]x[0," << format_double(g.ly)
              << "], t = " << format_double(s.t) << '\n'
              << "mass_n = " << format_double(total_mass(s.n)) << ", min_n = "
              << format_double(*std::min_element(s.n.values().begin(), s.n.values().end()))
              << ", max_c = " << format_double(norm(s.c, NormKind::Linf))
              << ", l2_u = " << format_double(norm(s.u, NormKind::L2))
              << ", div_residual = " << format_double(norm(divergence(s.u), NormKind::Linf)) << '\n';
    return kOk;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "override time.seed");
    cmd->add_option("--out", o.out, "override output.directory");
    cmd->add_flag("--allow-inadmissible", o.allow_inadmissible, "run even if the admissibility gate fails");
    cmd->add_option("--threads", o.threads, "worker threads (default: STOCHEM_THREADS or 1)")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochem: stochastic chemotaxis-fluid simulator"};
    app.require_subcommand(1);
    CommonOptions opts;

    auto* run_cmd = app.add_subcommand("run", "simulate and write diagnostics/snapshots");
    add_common(run_cmd, opts);
    auto* check_cmd = app.add_subcommand("check-params", "evaluate the admissibility conditions");
    add_common(check_cmd, opts);
    auto* exp_cmd = app.add_subcommand("experiment", "run a numerical study");
    std::string which;
    exp_cmd->add_option("which", which, "twin | convergence | stratonovich | ensemble")
        ->required()
        ->check(CLI::IsMember({"twin", "convergence", "stratonovich", "ensemble"}));
    add_common(exp_cmd, opts);
    auto* snap_cmd = app.add_subcommand("snapshot-info", "summarise a snapshot file");
    std::string snap_path;
    snap_cmd->add_option("path", snap_path, "snapshot file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return cmd_run(opts);
        if (*check_cmd) return cmd_check_params(opts);
        if (*exp_cmd) return cmd_experiment(opts, which);
        return cmd_snapshot_info(snap_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
