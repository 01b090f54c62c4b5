#include "kdvb/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kdvb {

ObservableSeries run_reference(const State& state0, double nu, double t_end, double dt,
                               std::int64_t sample_every) {
    if (!(nu >= 0.0)) throw InvalidInput("nu must be >= 0");
    const Field field = full_field(nu);
    Trajectory traj = integrate_record(field, state0, t_end, dt, sample_every);

    ObservableSeries series;
    series.method = Method::reference;
    series.rhs_eval_count = traj.rhs_evals;
    series.times = std::move(traj.times);
    series.values.reserve(traj.states.size());
    for (const State& s : traj.states) series.values.push_back(observable_vector(s));
    return series;
}

ObservableSeries reference_at_times(const State& state0, double nu,
                                    const std::vector<double>& times, double dt_target) {
    if (!(dt_target > 0.0)) throw InvalidInput("dt_target must be > 0");
    const Field field = full_field(nu);

    ObservableSeries series;
    series.method = Method::reference;

    State state = state0;
    double t = 0.0;
    for (double target : times) {
        if (target < t) throw InvalidInput("times must be increasing");
        const double span = target - t;
        if (span > 0.0) {
            const auto n = std::max<std::int64_t>(1, std::llround(span / dt_target));
            const double dt = span / static_cast<double>(n);
            Trajectory seg = integrate_record(field, state, span, dt, n);
            state = seg.states.back();
            series.rhs_eval_count += seg.rhs_evals;
        }
        t = target;
        series.times.push_back(target);
        series.values.push_back(observable_vector(state));
    }
    return series;
}

ErrorTable make_error_table(Method method, const State& state0, const ProjectiveConfig& cfg,
                            int checkpoint_periods, const std::vector<int>& step_set,
                            int reference_steps_per_period) {
    if (method == Method::reference) throw InvalidInput("error table expects a projective method");
    if (step_set.empty()) throw InvalidInput("step_set must not be empty");
    if (checkpoint_periods < 1) throw InvalidInput("checkpoint_periods must be >= 1");

    ErrorTable table;
    table.method = method;
    table.checkpoint_periods = checkpoint_periods;

    for (int s : step_set) {
        if (checkpoint_periods % s != 0) {
            throw InvalidInput("checkpoint_periods must be divisible by every step length; " +
                               std::to_string(s) + " does not divide " +
                               std::to_string(checkpoint_periods));
        }
        ProjectiveConfig run_cfg = cfg;
        run_cfg.euler_step_periods = s;
        ObservableSeries proj;
        try {
            proj = run_multiscale(method, state0, run_cfg, checkpoint_periods);
        } catch (const MultiscaleAborted& err) {
            throw NumericalError("table cell for step length " + std::to_string(s) +
                                 " failed: " + err.what());
        }

        const double t_final = proj.times.back();
        const double period_approx = proj.times[1] / static_cast<double>(s);
        const ObservableSeries ref = reference_at_times(
            state0, cfg.nu, {t_final}, period_approx / static_cast<double>(reference_steps_per_period));

        const ObservableVector& vp = proj.values.back();
        const ObservableVector& vr = ref.values.back();
        std::vector<double> row;
        for (std::size_t j = 1; j < vp.size(); ++j) {
            row.push_back(std::abs(vp[j] - vr[j]) * 1e3);
        }
        table.step_periods.push_back(s);
        table.scaled_errors.push_back(std::move(row));
        table.checkpoint_time = t_final;
    }
    return table;
}

namespace {

std::string format_g(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

}  // namespace

std::string render_table(const ErrorTable& table) {
    std::ostringstream os;
    const std::size_t cols = table.scaled_errors.empty() ? 0 : table.scaled_errors.front().size();
    os << "errors x 1e3 at t = " << format_g(table.checkpoint_time, 8) << " ("
       << table.checkpoint_periods << " fast periods), method " << method_name(table.method)
       << "\n";
    os << "step(periods)";
    for (std::size_t j = 0; j < cols; ++j) os << "\tv_" << (j + 2);
    os << "\n";
    for (std::size_t r = 0; r < table.step_periods.size(); ++r) {
        os << table.step_periods[r];
        for (double e : table.scaled_errors[r]) os << "\t" << format_g(e, 4);
        os << "\n";
    }
    return os.str();
}

CostReport cost_report(const ObservableSeries& reference, const ObservableSeries& multiscale) {
    if (reference.times.empty() || multiscale.times.empty()) {
        throw InvalidInput("cost report needs nonempty series");
    }
    const double t_ref = reference.times.back();
    const double t_ms = multiscale.times.back();
    const double span = std::max(std::abs(t_ref), std::abs(t_ms));
    if (span > 0.0 && std::abs(t_ref - t_ms) > 0.05 * span) {
        throw InvalidInput("series horizons differ by more than 5%: " + std::to_string(t_ref) +
                           " vs " + std::to_string(t_ms));
    }

    CostReport report;
    report.rhs_evals_direct = reference.rhs_eval_count;
    report.rhs_evals_multiscale = multiscale.rhs_eval_count;
    report.speedup = static_cast<double>(report.rhs_evals_direct) /
                     static_cast<double>(std::max<std::int64_t>(1, report.rhs_evals_multiscale));
    report.assumptions = "measured eval counters, horizon " + format_g(t_ref, 8);
    return report;
}

CostReport speedup_accounting(double nu, double decay_target, double period, int steps_per_period,
                              int projective_steps, int averaging_periods) {
    if (!(nu > 0.0)) throw InvalidInput("nu must be > 0");
    if (!(decay_target > 0.0 && decay_target < 1.0)) {
        throw InvalidInput("decay_target must be in (0, 1)");
    }
    if (!(period > 0.0)) throw InvalidInput("period must be > 0");
    if (steps_per_period < 1 || projective_steps < 1 || averaging_periods < 1) {
        throw InvalidInput("counts must be >= 1");
    }

    const double horizon = std::log(1.0 / decay_target) / nu;
    const auto direct_steps =
        static_cast<std::int64_t>(std::ceil(horizon / (period / steps_per_period)));
    const std::int64_t multiscale_steps = static_cast<std::int64_t>(projective_steps) *
                                          averaging_periods * steps_per_period;

    CostReport report;
    report.rhs_evals_direct = 4 * direct_steps;
    report.rhs_evals_multiscale = 4 * multiscale_steps;
    report.speedup =
        static_cast<double>(report.rhs_evals_direct) / static_cast<double>(report.rhs_evals_multiscale);
    std::ostringstream os;
    os << "nu = " << format_g(nu) << ", horizon = " << format_g(horizon, 8) << " (decay to "
       << format_g(decay_target) << "), period = " << format_g(period, 8) << ", "
       << steps_per_period << " steps/period, " << projective_steps << " projective steps x "
       << averaging_periods << " averaging period(s)";
    report.assumptions = os.str();
    return report;
}

std::string render_report(const CostReport& report) {
    std::ostringstream os;
    os << "direct rhs evals:     " << report.rhs_evals_direct << "\n"
       << "multiscale rhs evals: " << report.rhs_evals_multiscale << "\n"
       << "speedup:              " << format_g(report.speedup, 4) << " : 1\n"
       << "assumptions:          " << report.assumptions << "\n";
    return os.str();
}

namespace {

void append_value(std::string& line, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace

void export_csv(const Trajectory& trajectory, const std::string& path) {
    std::string content = "time";
    const std::size_t n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
    for (std::size_t k = 1; k <= n; ++k) content += ",U_" + std::to_string(k);
    content += "\n";
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        std::string line;
        append_value(line, trajectory.times[i]);
        for (std::size_t k = 0; k < n; ++k) {
            line += ',';
            append_value(line, trajectory.states[i][k]);
        }
        line += '\n';
        content += line;
    }
    write_file(path, content);
}

void export_csv(const ObservableSeries& series, const std::string& path) {
    std::string content = "time";
    const std::size_t m = series.values.empty() ? 0 : series.values.front().size();
    for (std::size_t j = 1; j <= m; ++j) content += ",v_" + std::to_string(j);
    content += ",method\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        std::string line;
        append_value(line, series.times[i]);
        for (double v : series.values[i]) {
            line += ',';
            append_value(line, v);
        }
        line += ',';
        line += method_name(series.method);
        line += '\n';
        content += line;
    }
    write_file(path, content);
}

}  // namespace kdvb
