// cli.hpp - command-line front end: solve a constrained maximizer, evolve a
// vorticity field, run the perturbation experiment, or analyze stored fields.
// Reports are key=value lines; fields travel as VPF files.
#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "vortexpair/diagnostics.hpp"
#include "vortexpair/domain.hpp"
#include "vortexpair/euler.hpp"
#include "vortexpair/optimizer.hpp"
#include "vortexpair/profiles.hpp"
#include "vortexpair/vpf_io.hpp"

namespace vortexpair::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_bad_config = 2;
inline constexpr int exit_no_convergence = 3;
inline constexpr int exit_io = 4;

struct RunConfig {
    std::string subcommand;
    std::string grid_text = "64,32";
    std::string domain_text = "4,2";
    int nx = 64, ny = 32;
    double L = 4.0, Z = 2.0;
    std::string profile = "builtin:patch";
    double p = 3.0;
    double impulse = 0.0;
    double energy_tol = 1e-8;
    double impulse_tol = 1e-10;
    double lambda_tol = 1e-12;
    int max_iters = 500;
    double dt = 0.01;
    double T = 1.0;
    int record_every = 10;
    std::vector<double> deltas{1e-2, 5e-3, 2.5e-3};
    std::vector<double> radii{0.25, 0.5, 1.0, 2.0};
    std::string out;
    std::string report;
    std::string trace;
    std::string snapshots;
    std::string state;
    std::string input;
    unsigned seed = 0;

    Domain domain() const { return Domain(L, Z, nx, ny); }
};

using Report = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string fmt(double v) { return vortexpair::detail::canonical(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }

inline void emit_report(const std::string& path, const Report& rep) {
    if (path.empty()) {
        for (const auto& [k, v] : rep) std::cout << k << '=' << v << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : rep) out << k << '=' << v << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

inline void emit_trace(const std::string& path, const std::vector<IterationRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# iteration energy impulse lambda energy_delta residual theta support\n";
    for (const auto& r : trace)
        out << r.iteration << ' ' << fmt(r.energy) << ' ' << fmt(r.impulse_value) << ' '
            << fmt(r.lambda) << ' ' << fmt(r.energy_delta) << ' ' << fmt(r.residual) << ' '
            << fmt(r.theta) << ' ' << r.support << '\n';
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

inline std::string describe(const Domain& d) {
    return std::to_string(d.nx) + "x" + std::to_string(d.ny) + " on L=" + fmt(d.half_width) +
           " Z=" + fmt(d.strip_height);
}

// a field source is either builtin:NAME or a VPF path; file fields must
// already live on the run grid
inline Field load_field(const std::string& source, const Domain& d) {
    if (source.rfind("builtin:", 0) == 0) return builtin_profile(d, source.substr(8));
    Field f = read_vpf_file(source);
    if (!(f.domain == d))
        throw std::invalid_argument("'" + source + "' holds a " + describe(f.domain) +
                                    " field, but the run grid is " + describe(d));
    return f;
}

inline double rel_to(double v, double ref) {
    return std::fabs(v - ref) / (std::fabs(ref) > 0.0 ? std::fabs(ref) : 1.0);
}

}  // namespace detail

inline int run_solve(const RunConfig& c) {
    const Domain d = c.domain();
    SolverConfig cfg;
    cfg.p = c.p;
    cfg.impulse = c.impulse;
    cfg.energy_tol = c.energy_tol;
    cfg.impulse_tol = c.impulse_tol;
    cfg.lambda_tol = c.lambda_tol;
    cfg.max_iters = c.max_iters;
    const AscentSolver solver(d, decreasing_rearrangement(detail::load_field(c.profile, d)), cfg);
    const SolverState st = solver.run();

    const Field relative = moving_frame_stream(st.psi, st.lambda);
    FirstVariationFit fit = first_variation_residual(st.zeta, relative);
    virial_gap(fit, relative, st.lambda, st.impulse_value);

    if (!c.out.empty()) write_vpf_file(c.out, st.zeta);
    if (!c.trace.empty()) detail::emit_trace(c.trace, st.trace);
    detail::emit_report(c.report, {
        {"lambda", detail::fmt(st.lambda)},
        {"energy", detail::fmt(st.energy)},
        {"impulse", detail::fmt(st.impulse_value)},
        {"iterations", detail::fmt(st.iterations)},
        {"fv_residual", detail::fmt(fit.residual)},
        {"rms_residual", detail::fmt(fit.rms_residual)},
        {"virial_gap", detail::fmt(fit.virial_gap_value)},
        {"virial_lhs", detail::fmt(fit.virial_lhs)},
        {"virial_rhs", detail::fmt(fit.virial_rhs)},
        {"converged", detail::fmt(st.converged)},
        {"constrained", detail::fmt(st.constrained)},
        {"fixed_point", detail::fmt(st.fixed_point)},
        {"profile_mismatches", detail::fmt(st.profile_mismatches)},
        {"seed", std::to_string(c.seed)},
    });
    return st.converged ? exit_ok : exit_no_convergence;
}

inline int run_evolve(const RunConfig& c) {
    const Domain d = c.domain();
    const EulerAdvector adv(d);
    EvolutionState start = adv.make_state(detail::load_field(c.profile, d), c.dt);

    std::vector<std::string> snapshot_names;
    std::function<void(const EvolutionState&)> on_record;
    if (!c.snapshots.empty()) {
        std::filesystem::create_directories(c.snapshots);
        on_record = [&](const EvolutionState& s) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%06zu.vpf", snapshot_names.size());
            write_vpf_file((std::filesystem::path(c.snapshots) / name).string(), s.omega);
            snapshot_names.push_back(name);
        };
    }

    const Trajectory tr = adv.evolve(std::move(start), c.T, c.record_every, c.p, on_record);

    if (!c.snapshots.empty()) {
        std::ofstream index(std::filesystem::path(c.snapshots) / "index.txt");
        if (!index) throw std::runtime_error("cannot open snapshot index for writing");
        for (std::size_t k = 0; k < tr.series.size(); ++k) {
            const ConservationSample& s = tr.series[k];
            index << detail::fmt(s.t) << ' ' << snapshot_names[k] << ' ' << detail::fmt(s.energy)
                  << ' ' << detail::fmt(s.impulse_value) << ' ' << detail::fmt(s.mass) << '\n';
        }
        index.flush();
        if (!index) throw std::runtime_error("failed while writing snapshot index");
    }
    if (!c.out.empty()) write_vpf_file(c.out, tr.state.omega);

    const ConservationSample& s0 = tr.series.front();
    double de = 0.0, di = 0.0, dm = 0.0;
    for (const ConservationSample& s : tr.series) {
        de = std::max(de, detail::rel_to(s.energy, s0.energy));
        di = std::max(di, detail::rel_to(s.impulse_value, s0.impulse_value));
        dm = std::max(dm, detail::rel_to(s.mass, s0.mass));
    }
    const double mass_ref = std::fabs(tr.state.mass0) > 0.0 ? std::fabs(tr.state.mass0) : 1.0;
    detail::emit_report(c.report, {
        {"energy_drift", detail::fmt(de)},
        {"impulse_drift", detail::fmt(di)},
        {"mass_drift", detail::fmt(dm)},
        {"clamped_mass", detail::fmt(tr.state.clamped_mass / mass_ref)},
        {"cfl_warning", detail::fmt(tr.state.cfl_warning)},
        {"final_time", detail::fmt(tr.state.t)},
        {"records", detail::fmt(static_cast<int>(tr.series.size()))},
        {"seed", std::to_string(c.seed)},
    });
    return exit_ok;
}

inline int run_stability(const RunConfig& c) {
    const Domain d = c.domain();
    Report rep;
    Field reference(d);
    bool solve_converged = true;
    if (!c.state.empty()) {
        reference = detail::load_field(c.state, d);
    } else {
        SolverConfig cfg;
        cfg.p = c.p;
        cfg.impulse = c.impulse;
        cfg.energy_tol = c.energy_tol;
        cfg.impulse_tol = c.impulse_tol;
        cfg.lambda_tol = c.lambda_tol;
        cfg.max_iters = c.max_iters;
        const AscentSolver solver(d, decreasing_rearrangement(detail::load_field(c.profile, d)),
                                  cfg);
        const SolverState st = solver.run();
        solve_converged = st.converged;
        reference = st.zeta;
        rep.emplace_back("lambda", detail::fmt(st.lambda));
        rep.emplace_back("energy", detail::fmt(st.energy));
        rep.emplace_back("iterations", detail::fmt(st.iterations));
        rep.emplace_back("converged", detail::fmt(st.converged));
    }
    if (!c.out.empty()) write_vpf_file(c.out, reference);

    const EulerAdvector adv(d);
    bool cfl = false;
    for (std::size_t k = 0; k < c.deltas.size(); ++k) {
        const StabilityReport r =
            adv.stability_experiment(reference, c.deltas[k], c.T, c.dt, c.record_every, c.p);
        const std::string tag = "_" + std::to_string(k);
        rep.emplace_back("delta" + tag, detail::fmt(r.delta));
        rep.emplace_back("epsilon" + tag, detail::fmt(r.epsilon));
        rep.emplace_back("max_distance" + tag, detail::fmt(r.max_distance));
        cfl = cfl || r.cfl_warning;
    }
    rep.emplace_back("cfl_warning", detail::fmt(cfl));
    rep.emplace_back("seed", std::to_string(c.seed));
    detail::emit_report(c.report, rep);
    return solve_converged ? exit_ok : exit_no_convergence;
}

inline int run_diagnose(const RunConfig& c) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(c.input))
        throw std::invalid_argument("--input '" + c.input + "' is not a directory");
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(c.input))
        if (entry.is_regular_file() && entry.path().extension() == ".vpf")
            paths.push_back(entry.path());
    if (paths.empty())
        throw std::invalid_argument("--input '" + c.input + "' holds no .vpf files");
    std::sort(paths.begin(), paths.end());

    std::vector<Field> seq;
    seq.reserve(paths.size());
    for (const fs::path& p : paths) seq.push_back(read_vpf_file(p.string()));

    const CCReport cc = cc_classify(seq, c.radii);
    const BoundReport bounds = bound_report(seq.back(), c.p);
    detail::emit_report(c.report, {
        {"fields", detail::fmt(static_cast<int>(seq.size()))},
        {"cc_label", to_string(cc.label)},
        {"cc_beta_last", detail::fmt(cc.beta.back())},
        {"cc_alpha", detail::fmt(cc.alpha)},
        {"cc_residual", detail::fmt(cc.residual)},
        {"cc_separation", detail::fmt(cc.separation)},
        {"stream_over_height", detail::fmt(bounds.stream_over_height)},
        {"gradient_sup", detail::fmt(bounds.gradient_sup)},
        {"global_growth", detail::fmt(bounds.global_growth)},
        {"high_altitude", detail::fmt(bounds.high_altitude)},
        {"tail_applicable", detail::fmt(bounds.tail_applicable)},
        {"tail_start", detail::fmt(bounds.tail_start)},
        {"tail_constant", detail::fmt(bounds.tail_constant)},
        {"tail_exponent", detail::fmt(bounds.tail_exponent)},
        {"seed", std::to_string(c.seed)},
    });
    return exit_ok;
}

namespace detail {

inline void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--grid", c.grid_text, "cells as nx,ny")->capture_default_str();
    sub->add_option("--domain", c.domain_text, "half-width and height as L,Z")
        ->capture_default_str();
    sub->add_option("--p", c.p, "norm exponent, must exceed 2")->capture_default_str();
    sub->add_option("--report", c.report, "key=value report path (default: stdout)");
    sub->add_option("--seed", c.seed, "recorded in the report; runs are deterministic")
        ->capture_default_str();
}

inline void add_solver_flags(CLI::App* sub, RunConfig& c, bool impulse_required) {
    auto* imp = sub->add_option("--impulse", c.impulse, "impulse budget i0");
    if (impulse_required) imp->required();
    sub->add_option("--profile", c.profile, "builtin:patch, builtin:annulus, or a VPF path")
        ->capture_default_str();
    sub->add_option("--energy-tol", c.energy_tol, "relative energy stall threshold")
        ->capture_default_str();
    sub->add_option("--impulse-tol", c.impulse_tol, "relative slack on the budget")
        ->capture_default_str();
    sub->add_option("--lambda-tol", c.lambda_tol, "relative multiplier bisection width")
        ->capture_default_str();
    sub->add_option("--max-iters", c.max_iters, "iteration cap")->capture_default_str();
}

inline void add_time_flags(CLI::App* sub, RunConfig& c) {
    sub->add_option("--dt", c.dt, "time step")->capture_default_str();
    sub->add_option("--T", c.T, "horizon")->capture_default_str();
    sub->add_option("--record-every", c.record_every, "steps between recorded samples")
        ->capture_default_str();
}

inline void build(CLI::App& app, RunConfig& c) {
    app.require_subcommand(1);
    CLI::App* solve = app.add_subcommand("solve", "maximize energy at fixed impulse");
    add_common(solve, c);
    add_solver_flags(solve, c, true);
    solve->add_option("--out", c.out, "write the maximizer as VPF");
    solve->add_option("--trace", c.trace, "write the per-iteration trace");

    CLI::App* evolve = app.add_subcommand("evolve", "advect a vorticity field");
    add_common(evolve, c);
    evolve->add_option("--profile", c.profile, "builtin:patch, builtin:annulus, or a VPF path")
        ->capture_default_str();
    add_time_flags(evolve, c);
    evolve->add_option("--out", c.out, "write the final field as VPF");
    evolve->add_option("--snapshots", c.snapshots, "directory for VPF snapshots and index.txt");

    CLI::App* stability = app.add_subcommand("stability", "perturb a maximizer and track it");
    add_common(stability, c);
    add_solver_flags(stability, c, false);
    add_time_flags(stability, c);
    stability->add_option("--delta", c.deltas, "perturbation sizes (repeatable)")
        ->delimiter(',')
        ->capture_default_str();
    stability->add_option("--state", c.state, "VPF maximizer to reuse instead of solving");
    stability->add_option("--out", c.out, "write the reference field as VPF");

    CLI::App* diagnose = app.add_subcommand("diagnose", "classify stored fields and fit bounds");
    add_common(diagnose, c);
    diagnose->add_option("--input", c.input, "directory of VPF files, read in name order")
        ->required();
    diagnose->add_option("--radii", c.radii, "disc radius ladder")
        ->delimiter(',')
        ->capture_default_str();
}

// every problem is collected so one pass over the message fixes the call
inline void validate(RunConfig& c) {
    std::vector<std::string> problems;
    char tail = 0;
    if (std::sscanf(c.grid_text.c_str(), "%d,%d%c", &c.nx, &c.ny, &tail) != 2)
        problems.push_back("--grid expects nx,ny (got '" + c.grid_text + "')");
    else if (c.nx < 2 || c.ny < 2)
        problems.push_back("--grid needs at least 2 cells per direction");
    if (std::sscanf(c.domain_text.c_str(), "%lf,%lf%c", &c.L, &c.Z, &tail) != 2)
        problems.push_back("--domain expects L,Z (got '" + c.domain_text + "')");
    else if (!(c.L > 0.0) || !(c.Z > 0.0))
        problems.push_back("--domain extents must be positive");
    if (!(c.p > 2.0)) problems.push_back("--p must exceed 2 (got " + fmt(c.p) + ")");

    const bool solving = c.subcommand == "solve" ||
                         (c.subcommand == "stability" && c.state.empty());
    if (solving) {
        if (!(c.impulse > 0.0))
            problems.push_back(c.subcommand == "solve"
                                   ? "--impulse must be positive"
                                   : "--impulse must be positive when --state is not given");
        if (!(c.energy_tol > 0.0)) problems.push_back("--energy-tol must be positive");
        if (!(c.impulse_tol > 0.0)) problems.push_back("--impulse-tol must be positive");
        if (!(c.lambda_tol > 0.0)) problems.push_back("--lambda-tol must be positive");
        if (c.max_iters < 1) problems.push_back("--max-iters must be at least 1");
    }
    if (c.subcommand == "evolve" || c.subcommand == "stability") {
        if (!(c.dt > 0.0)) problems.push_back("--dt must be positive");
        if (!(c.T > 0.0)) problems.push_back("--T must be positive");
        if (c.record_every < 1) problems.push_back("--record-every must be at least 1");
    }
    if (c.subcommand == "stability") {
        if (c.deltas.empty()) problems.push_back("--delta needs at least one value");
        for (double v : c.deltas)
            if (v < 0.0) problems.push_back("--delta values must be nonnegative");
    }
    if (c.subcommand == "diagnose") {
        if (c.radii.empty()) problems.push_back("--radii needs at least one value");
        for (double v : c.radii)
            if (!(v > 0.0)) problems.push_back("--radii values must be positive");
    }
    if ((c.subcommand == "solve" || c.subcommand == "evolve" || c.subcommand == "stability") &&
        c.profile.empty())
        problems.push_back("--profile must be nonempty");

    if (!problems.empty()) {
        std::string all;
        for (const std::string& p : problems) {
            if (!all.empty()) all += '\n';
            all += p;
        }
        throw std::invalid_argument(all);
    }
}

}  // namespace detail

inline int dispatch(const RunConfig& c) {
    if (c.subcommand == "solve") return run_solve(c);
    if (c.subcommand == "evolve") return run_evolve(c);
    if (c.subcommand == "stability") return run_stability(c);
    if (c.subcommand == "diagnose") return run_diagnose(c);
    throw std::invalid_argument("unknown subcommand '" + c.subcommand + "'");
}

// parse and validate a full command line (no program name); throws
// std::invalid_argument with one line per problem
inline RunConfig parse_config(const std::string& command_line) {
    RunConfig c;
    CLI::App app{"planar vortex-pair tools"};
    detail::build(app, c);
    try {
        app.parse(command_line, false);
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(e.what());
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    detail::validate(c);
    return c;
}

inline int run(int argc, char** argv) {
    RunConfig c;
    CLI::App app{"planar vortex-pair tools"};
    detail::build(app, c);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_bad_config;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    try {
        detail::validate(c);
        return dispatch(c);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_bad_config;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    }
}

}  // namespace vortexpair::cli
