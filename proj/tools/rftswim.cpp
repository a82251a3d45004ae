// rftswim: command-line front end for the filament simulators, modal analytics,
// optimizer and studies.

#include "rftswim/io.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace rftswim;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3, kAcceptanceFailure = 4 };

std::string manifest_path_for(const std::string& out) { return out + ".manifest.json"; }

RunManifest start_manifest(const std::string& command, int argc, char** argv) {
    RunManifest m;
    m.command = command;
    for (int i = 0; i < argc; ++i) m.argv.emplace_back(argv[i]);
    return m;
}

struct SimOverrides {
    std::string config, case_id, coefficients, method, out = "trajectory.csv";
    int n = 0;
    double dt = 0, t_end = -1, amplitude = 0;
};

RunConfig load_config(const std::string& path) {
    if (path.empty()) return parse_config(Json::object());
    return parse_config_file(path);
}

// Re-validates the configuration after command-line overrides are merged into it.
RunConfig apply_overrides(const SimOverrides& o) {
    Json doc = o.config.empty() ? Json::object() : load_config(o.config).source;
    if (!o.case_id.empty()) doc["case"] = o.case_id;
    if (!o.coefficients.empty()) doc["coefficients"] = o.coefficients;
    if (!o.method.empty()) doc["method"] = o.method;
    if (o.amplitude != 0) doc["amplitude"] = o.amplitude;
    if (o.n) doc["simulation"]["n_segments"] = o.n;
    if (o.dt > 0) doc["simulation"]["dt"] = o.dt;
    if (o.t_end >= 0) doc["simulation"]["t_end"] = o.t_end;
    return parse_config(doc);
}

int cmd_basis(int k_max, int grid, int samples, const std::string& out, RunManifest man) {
    const auto basis = EigenBasis::build(k_max, grid);
    man.config = {{"k_max", k_max}, {"grid", grid}, {"samples", samples}};
    man.outputs = {out};
    man.write(manifest_path_for(out));
    auto f = detail::open_out(out);
    f << "k,xi_k,lambda_k\n";
    for (int k = 1; k <= k_max; ++k) f << k << ',' << fmt17(basis.xi(k)) << ',' << fmt17(basis.lambda(k)) << '\n';
    f << "\ns";
    for (int k = 1; k <= k_max; ++k) f << ",psi_" << k;
    f << '\n';
    for (int i = 0; i < samples; ++i) {
        const double s = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
        f << fmt17(s);
        for (int k = 1; k <= k_max; ++k) f << ',' << fmt17(basis.psi(k, s));
        f << '\n';
    }
    f << "\nS";
    for (int l = 1; l <= k_max; ++l) f << ",l" << l;
    f << '\n';
    for (int k = 1; k <= k_max; ++k) {
        f << "k" << k;
        for (int l = 1; l <= k_max; ++l) f << ',' << fmt17(basis.coupling()(k - 1, l - 1));
        f << '\n';
    }
    std::cout << "wrote " << out << '\n';
    return kOk;
}

int cmd_simulate(const SimOverrides& o, RunManifest man) {
    const RunConfig rc = apply_overrides(o);
    man.config = resolved_config(rc);
    man.seed = rc.study.seed;
    if (!o.config.empty()) man.add_input(o.config);
    if (!rc.coefficients_path.empty()) man.add_input(rc.coefficients_path);
    man.outputs = {o.out};
    man.write(manifest_path_for(o.out));
    const ForcingSpec f = resolve_forcing(rc);
    const Trajectory tr = simulate(rc.method, rc.sim, f, initial_state(rc));
    write_trajectory(o.out, tr);
    const auto& last = tr.back();
    std::cout << "method " << method_tag(rc.method) << ", N = " << rc.sim.n_segments << ", " << tr.size()
              << " records, t_end = " << last.state.time << ", x0 = (" << last.state.x0.x() << ", "
              << last.state.x0.y() << ")\nwrote " << o.out << '\n';
    return kOk;
}

int cmd_optimize(OptProblem p, const std::string& out, RunManifest man) {
    man.config = {{"problem", to_string(p.constraints)}, {"m_max", p.m_max}, {"k_max", p.k_max},
                  {"omega", p.omega}, {"gamma", p.gamma}, {"restarts", p.restarts},
                  {"seed", p.seed}, {"work_target", p.work_target}};
    man.seed = p.seed;
    man.outputs = {out};
    man.write(manifest_path_for(out));
    const auto basis = EigenBasis::build(p.k_max);
    const OptResult r = optimize(p, basis);
    write_coefficients(out, r.coeffs);
    std::cout.precision(10);
    std::cout << "problem " << to_string(p.constraints) << ": speed " << r.speed << ", work " << r.work;
    for (double c : r.constraint_residuals) std::cout << ", residual " << c;
    if (p.constraints == ConstraintSet::Work) std::cout << (r.degenerate ? ", degenerate" : "");
    else std::cout << "\nbest restart " << r.best_restart << " of " << r.restarts.size() << ", distinct optima "
                   << r.distinct_optima;
    const VectorX frac = work_fraction_by_mode(r.coeffs, p.omega, basis);
    std::cout << "\nwork fraction by m:";
    for (Eigen::Index m = 0; m < frac.size(); ++m) std::cout << ' ' << frac[m];
    std::cout << "\nwrote " << out << '\n';
    return kOk;
}

int cmd_analyze(const std::string& traj_path, const SimOverrides& o, const std::string& out, RunManifest man) {
    const RunConfig rc = apply_overrides(o);
    man.config = resolved_config(rc);
    man.add_input(traj_path);
    man.outputs = {out};
    man.write(manifest_path_for(out));
    Trajectory tr = read_trajectory(traj_path);
    if (tr.empty()) throw ConfigError(traj_path + ": no records to analyze");
    const ForcingSpec f = resolve_forcing(rc);
    auto file = detail::open_out(out);
    file << "t,U,predicted_dx,observed_dx,Wdot,work\n";
    double pred = 0.0, work = 0.0;
    const double x_start = tr.records.front().state.x0.x();
    for (std::size_t i = 0; i < tr.size(); ++i) {
        auto& r = tr.records[i];
        const double u = instantaneous_speed(r.state, f, rc.sim.gamma);
        if (i > 0) {
            const auto& p = tr.records[i - 1];
            const double dt = r.state.time - p.state.time;
            pred += 0.5 * dt * (u + instantaneous_speed(p.state, f, rc.sim.gamma));
            work += 0.5 * dt * (r.diag.work_rate + p.diag.work_rate);
        }
        file << fmt17(r.state.time) << ',' << fmt17(u) << ',' << fmt17(pred) << ','
             << fmt17(r.state.x0.x() - x_start) << ',' << fmt17(r.diag.work_rate) << ',' << fmt17(work) << '\n';
    }
    std::cout << "records " << tr.size() << ", predicted dx " << pred << ", observed dx "
              << tr.back().state.x0.x() - x_start << ", work " << work << "\nwrote " << out << '\n';
    return kOk;
}

int cmd_speed(const std::string& coeff_path, double omega, double gamma) {
    const ModalCoeffs c = read_coefficients(coeff_path);
    const auto basis = EigenBasis::build(c.k_max());
    std::cout.precision(17);
    std::cout << "speed " << avg_speed(c, omega, gamma, basis) << "\nwork " << avg_work(c, omega, basis) << '\n';
    return kOk;
}

int cmd_validate(const std::string& study, const SimOverrides& o, const std::string& dir, bool strict,
                 RunManifest man) {
    RunConfig rc = apply_overrides(o);
    man.config = resolved_config(rc);
    man.config["study_id"] = study;
    man.seed = rc.study.seed;
    if (!o.config.empty()) man.add_input(o.config);
    const std::string manifest = (fs::path(dir) / (study + "_manifest.json")).string();
    man.write(manifest);
    StudyOptions opts = rc.study;
    opts.sink = [&](const std::string& label, const Trajectory& tr) {
        const std::string f = (fs::path(dir) / "trajectories" / (study + "_" + label + ".csv")).string();
        write_trajectory(f, tr);
        return f;
    };
    const StudyReport rep = run_study(study, opts);
    auto files = write_report(dir, rep);
    man.outputs = files;
    man.outputs.insert(man.outputs.end(), rep.trajectory_files.begin(), rep.trajectory_files.end());
    man.write(manifest);
    for (const auto& c : rep.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " in [" << c.lo << ", " << c.hi
                  << "]\n";
    for (const auto& [k, v] : rep.slopes) std::cout << "slope " << k << " = " << v << '\n';
    std::cout << "report " << files.back() << '\n';
    if (strict && !rep.passed()) return kAcceptanceFailure;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar elastic filament swimmers under resistive force theory"};
    app.require_subcommand(1);

    int k_max = 12, grid = kDefaultBasisGrid, samples = 101;
    std::string out;
    auto* basis = app.add_subcommand("basis", "clamped eigenfunction roots, samples and coupling matrix");
    basis->add_option("--kmax", k_max, "number of eigenmodes")->check(CLI::Range(1, kMaxStableModes));
    basis->add_option("--grid", grid, "odd quadrature point count");
    basis->add_option("--samples", samples, "psi sample count on [0,1]")->check(CLI::PositiveNumber);
    basis->add_option("--out", out, "output CSV")->default_val("basis.csv");

    SimOverrides so;
    auto add_sim_flags = [&](CLI::App* c) {
        c->add_option("--config", so.config, "JSON configuration");
        c->add_option("--case", so.case_id, "catalogue case id (case1..case9)");
        c->add_option("--coefficients", so.coefficients, "modal forcing coefficients (m,k,a,b CSV)");
        c->add_option("--method", so.method, "a (angle scheme) or b (node scheme)");
        c->add_option("--n", so.n, "segment count");
        c->add_option("--dt", so.dt, "time step");
        c->add_option("--t-end", so.t_end, "integration time");
        c->add_option("--amplitude", so.amplitude, "forcing amplitude multiplier");
    };
    auto* sim = app.add_subcommand("simulate", "integrate one filament and write its trajectory");
    add_sim_flags(sim);
    sim->add_option("--out", so.out, "trajectory CSV");

    OptProblem op;
    std::string problem = "work";
    std::string coeff_out = "coefficients.csv";
    auto* opt = app.add_subcommand("optimize", "optimal modal forcing");
    opt->add_option("--problem", problem, "work, work-bending or bending");
    opt->add_option("--kmax", op.k_max);
    opt->add_option("--mmax", op.m_max);
    opt->add_option("--omega", op.omega);
    opt->add_option("--gamma", op.gamma);
    opt->add_option("--restarts", op.restarts);
    opt->add_option("--seed", op.seed);
    opt->add_option("--work", op.work_target, "work target");
    opt->add_option("--out", coeff_out, "coefficient CSV (m,k,a,b)");

    std::string traj_in, analysis_out = "analysis.csv";
    auto* ana = app.add_subcommand("analyze", "U(t), displacement and work along a stored trajectory");
    ana->add_option("--trajectory", traj_in, "trajectory CSV")->required();
    add_sim_flags(ana);
    ana->add_option("--out", analysis_out, "analysis CSV");

    std::string coeff_in;
    double omega = 2 * kPi, gamma = 1.0;
    auto* spd = app.add_subcommand("speed", "time-averaged speed and work of a coefficient file");
    spd->add_option("--coefficients", coeff_in)->required();
    spd->add_option("--omega", omega);
    spd->add_option("--gamma", gamma);

    std::string study, outdir = "study_out";
    bool strict = false;
    auto* val = app.add_subcommand("validate", "run a study and write its report");
    val->add_option("--study", study)->required()->check(CLI::IsMember(study_ids()));
    add_sim_flags(val);
    val->add_option("--out", outdir, "output directory");
    val->add_flag("--strict", strict, "exit 4 if any registered check fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*basis) return cmd_basis(k_max, grid, samples, out, start_manifest("basis", argc, argv));
        if (*sim) return cmd_simulate(so, start_manifest("simulate", argc, argv));
        if (*opt) {
            op.constraints = parse_constraint_set(problem);
            return cmd_optimize(op, coeff_out, start_manifest("optimize", argc, argv));
        }
        if (*ana) return cmd_analyze(traj_in, so, analysis_out, start_manifest("analyze", argc, argv));
        if (*spd) return cmd_speed(coeff_in, omega, gamma);
        if (*val) return cmd_validate(study, so, outdir, strict, start_manifest("validate", argc, argv));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return kOk;
}
