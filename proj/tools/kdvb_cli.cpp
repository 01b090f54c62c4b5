// kdvb command-line front end: reference runs, projective runs, error
// tables, speedup accounting and CSV emission.

#include <CLI11.hpp>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kdvb/harness.hpp"

namespace {

using namespace kdvb;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::vector<double> parse_init(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput("cannot parse initial state entry '" + item + "'");
        }
    }
    return values;
}

struct CommonOptions {
    std::string init;
    int n = 0;  // 0: take the length of --init
    double nu = 1e-4;
    double dt = 0.0;  // 0: period / steps_per_period
    int periods = 10;
    int euler_step = 3;
    int avg_periods = 1;
    int steps_per_period = 50;
    std::string out;

    [[nodiscard]] State state() const {
        std::vector<double> values = parse_init(init);
        if (n != 0 && static_cast<std::size_t>(n) != values.size()) {
            throw InvalidInput("--n = " + std::to_string(n) + " does not match --init length " +
                               std::to_string(values.size()));
        }
        return State(std::move(values));
    }

    [[nodiscard]] ProjectiveConfig config() const {
        ProjectiveConfig cfg;
        cfg.nu = nu;
        cfg.euler_step_periods = euler_step;
        cfg.averaging_periods = avg_periods;
        cfg.steps_per_period = steps_per_period;
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonOptions& opt, const std::string& default_init, bool with_nu) {
    opt.init = default_init;
    cmd->set_config("--config", "", "flat key=value config file; flags override");
    cmd->add_option("--init", opt.init, "initial state as a comma-separated list")
        ->capture_default_str();
    cmd->add_option("--n", opt.n, "lattice size (cross-checks --init length)");
    if (with_nu) cmd->add_option("--nu", opt.nu, "diffusion strength")->capture_default_str();
    cmd->add_option("--dt", opt.dt, "integrator step; 0 selects period/steps-per-period");
    cmd->add_option("--periods", opt.periods, "horizon in fast periods")->capture_default_str();
    cmd->add_option("--euler-step", opt.euler_step, "projective Euler step length in periods")
        ->capture_default_str();
    cmd->add_option("--avg-periods", opt.avg_periods, "orbits averaged per measure")
        ->capture_default_str();
    cmd->add_option("--steps-per-period", opt.steps_per_period,
                    "integration steps per fast period")
        ->capture_default_str();
    cmd->add_option("--out", opt.out, "output CSV path");
}

// Arbitrary user states land at arbitrary torus phases, so the CLI uses the
// tolerant return-depth gate of the projective runs.
PeriodEstimate detect_period_cli(const State& state, double dt = 1e-3) {
    return estimate_fast_period(state, 10.0, dt, ProjectiveConfig{}.period_threshold);
}

void simulate(const CommonOptions& opt, double nu) {
    const State state = opt.state();
    const PeriodEstimate est = detect_period_cli(state);
    const double dt = opt.dt > 0.0 ? opt.dt : est.period / opt.steps_per_period;
    const double t_end = static_cast<double>(opt.periods) * est.period;

    const Field field = nu > 0.0 ? full_field(nu) : fast_field();
    const Trajectory traj = integrate_record(field, state, t_end, dt, 1);
    if (!opt.out.empty()) export_csv(traj, opt.out);
    std::printf("integrated %lld steps to t = %.6g (%d periods, dt = %.6g)\n",
                static_cast<long long>(traj.steps_taken), t_end, opt.periods, dt);
    if (!opt.out.empty()) std::printf("trajectory written to %s\n", opt.out.c_str());
}

void run_project(Method method, const CommonOptions& opt) {
    const State state = opt.state();
    const ObservableSeries series = run_multiscale(method, state, opt.config(), opt.periods);
    if (!opt.out.empty()) export_csv(series, opt.out);

    std::printf("%s run: %zu checkpoints to t = %.6g, %lld rhs evals\n", method_name(method),
                series.times.size(), series.times.back(),
                static_cast<long long>(series.rhs_eval_count));
    const ObservableVector& last = series.values.back();
    for (std::size_t j = 0; j < last.size(); ++j) {
        std::printf("  v_%zu(end) = %.12g\n", j + 1, last[j]);
    }
    if (!opt.out.empty()) std::printf("series written to %s\n", opt.out.c_str());
}

void run_table(Method method, const CommonOptions& opt, int checkpoint_periods) {
    const State state = opt.state();
    const ErrorTable table =
        make_error_table(method, state, opt.config(), checkpoint_periods, {3, 6, 12});
    std::fputs(render_table(table).c_str(), stdout);
    if (!opt.out.empty()) {
        std::string csv = "step_periods";
        const std::size_t cols = table.scaled_errors.front().size();
        for (std::size_t j = 0; j < cols; ++j) csv += ",v_" + std::to_string(j + 2);
        csv += "\n";
        for (std::size_t r = 0; r < table.step_periods.size(); ++r) {
            csv += std::to_string(table.step_periods[r]);
            for (double e : table.scaled_errors[r]) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), ",%.17g", e);
                csv += buf;
            }
            csv += "\n";
        }
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) throw IoError("cannot open '" + opt.out + "' for writing");
        out << csv;
        std::printf("table written to %s\n", opt.out.c_str());
    }
}

void run_export(const std::string& preset, const CommonOptions& opt) {
    if (preset == "fig-torus") {
        CommonOptions torus = opt;
        if (torus.out.empty()) torus.out = "fig-torus.csv";
        simulate(torus, 0.0);
    } else if (preset == "fig-decay") {
        const std::string base = opt.out.empty() ? "fig-decay" : opt.out;
        const State state = opt.state();
        const PeriodEstimate est = detect_period_cli(state);
        const double dt = opt.dt > 0.0 ? opt.dt : est.period / opt.steps_per_period;
        const Field field = full_field(opt.nu);

        State cursor = state;
        int reached = 0;
        for (int checkpoint : {600, 1200, 1800, 2400, 3000}) {
            const double span = (checkpoint - reached) * est.period;
            Trajectory leg = integrate_record(field, cursor, span, dt,
                                              std::max<std::int64_t>(1, std::llround(span / dt)));
            cursor = leg.states.back();
            reached = checkpoint;

            // Two densely sampled orbits at this epoch: the torus snapshot.
            Trajectory snap = integrate_record(field, cursor, 2.0 * est.period, dt, 1);
            for (double& t : snap.times) t += reached * est.period;
            const std::string path = base + "_" + std::to_string(checkpoint) + ".csv";
            export_csv(snap, path);
            std::printf("snapshot at %d periods written to %s\n", checkpoint, path.c_str());
        }
    } else {
        throw InvalidInput("unknown preset '" + preset + "' (expected fig-torus or fig-decay)");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fast-slow lattice simulator: Lax invariants, measure-averaged and "
                 "equation-free projective integration"};
    app.require_subcommand(1);

    auto* sim_fast = app.add_subcommand("simulate-fast", "integrate the pure fast system");
    CommonOptions fast_opt;
    add_common(sim_fast, fast_opt, "1,1,1,3,2,1", false);

    auto* sim_full = app.add_subcommand("simulate-full", "integrate the full fast-slow system");
    CommonOptions full_opt;
    add_common(sim_full, full_opt, "1,1,1,3,2,1", true);

    auto* period = app.add_subcommand("period", "estimate the fast period");
    CommonOptions period_opt;
    add_common(period, period_opt, "1,1,1,3,2,1", false);
    std::string period_method = "return";
    period->add_option("--method", period_method, "return | peaks")->capture_default_str();
    double period_threshold = 0.05;
    period->add_option("--threshold", period_threshold, "return-depth gate")
        ->capture_default_str();

    auto* observables = app.add_subcommand("observables", "print the slow observables of a state");
    CommonOptions obs_opt;
    add_common(observables, obs_opt, "1,1,1,3,2,1", false);

    auto* project_ym =
        app.add_subcommand("project-ym", "projective run via invariant-measure drift averaging");
    CommonOptions ym_opt;
    add_common(project_ym, ym_opt, "1,1,1,1,4,1", true);

    auto* project_ef =
        app.add_subcommand("project-ef", "projective run via equation-free chord slopes");
    CommonOptions ef_opt;
    add_common(project_ef, ef_opt, "1,1,1,1,4,1", true);

    auto* table1 = app.add_subcommand(
        "table1", "checkpoint errors of the measure-averaging scheme");
    CommonOptions t1_opt;
    add_common(table1, t1_opt, "1,1,1,1,4,1", true);
    int t1_checkpoint = 600;
    table1->add_option("--checkpoint-periods", t1_checkpoint, "checkpoint in fast periods")
        ->capture_default_str();

    auto* table2 = app.add_subcommand(
        "table2", "checkpoint errors of the equation-free scheme");
    CommonOptions t2_opt;
    add_common(table2, t2_opt, "1,1,1,1,4,1", true);
    int t2_checkpoint = 600;
    table2->add_option("--checkpoint-periods", t2_checkpoint, "checkpoint in fast periods")
        ->capture_default_str();

    auto* speedup = app.add_subcommand("speedup", "decay-tracking cost accounting");
    CommonOptions sp_opt;
    sp_opt.nu = 1e-3;
    add_common(speedup, sp_opt, "1,1,1,3,2,1", true);
    double decay_target = 1e-5;
    int projective_steps = 100;
    speedup->add_option("--decay-target", decay_target, "tracked dissipative reduction factor")
        ->capture_default_str();
    speedup->add_option("--projective-steps", projective_steps, "projective step budget")
        ->capture_default_str();

    auto* exporter = app.add_subcommand("export", "emit figure-ready CSV presets");
    CommonOptions ex_opt;
    ex_opt.periods = 20;
    add_common(exporter, ex_opt, "1,1,1,3,2,1", true);
    std::string preset = "fig-torus";
    exporter->add_option("--preset", preset, "fig-torus | fig-decay")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalidInput;
    }

    try {
        if (sim_fast->parsed()) {
            simulate(fast_opt, 0.0);
        } else if (sim_full->parsed()) {
            simulate(full_opt, full_opt.nu);
        } else if (period->parsed()) {
            const State state = period_opt.state();
            const double dt = period_opt.dt > 0.0 ? period_opt.dt : 1e-3;
            PeriodEstimate est;
            if (period_method == "peaks") {
                est = estimate_period_from_peaks(state, 10.0, dt);
            } else if (period_method == "return") {
                est = estimate_fast_period(state, 10.0, dt, period_threshold);
            } else {
                throw InvalidInput("unknown period method '" + period_method + "'");
            }
            std::printf("period = %.6f (return distance %.3g, %s)\n", est.period,
                        est.return_distance, est.confident ? "confident" : "low confidence");
        } else if (observables->parsed()) {
            const State state = obs_opt.state();
            const ObservableVector v = observable_vector(state);
            for (std::size_t j = 0; j < v.size(); ++j) {
                std::printf("v_%zu = %.17g\n", j + 1, v[j]);
            }
            if (!obs_opt.out.empty()) {
                ObservableSeries single;
                single.method = Method::reference;
                single.times.push_back(0.0);
                single.values.push_back(v);
                export_csv(single, obs_opt.out);
            }
        } else if (project_ym->parsed()) {
            run_project(Method::young_measure, ym_opt);
        } else if (project_ef->parsed()) {
            run_project(Method::equation_free, ef_opt);
        } else if (table1->parsed()) {
            run_table(Method::young_measure, t1_opt, t1_checkpoint);
        } else if (table2->parsed()) {
            run_table(Method::equation_free, t2_opt, t2_checkpoint);
        } else if (speedup->parsed()) {
            const State state = sp_opt.state();
            const PeriodEstimate est = detect_period_cli(state);
            const CostReport report =
                speedup_accounting(sp_opt.nu, decay_target, est.period, sp_opt.steps_per_period,
                                   projective_steps, sp_opt.avg_periods);
            std::fputs(render_report(report).c_str(), stdout);
        } else if (exporter->parsed()) {
            if (preset == "fig-decay" && exporter->count("--init") == 0) {
                ex_opt.init = "1,1,1,1,4,1";
            }
            run_export(preset, ex_opt);
        }
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitInvalidInput;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
