#include "kdvb/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kdvb/linalg.hpp"

namespace kdvb {

void validate_config(const ProjectiveConfig& cfg) {
    if (cfg.averaging_periods < 1) throw InvalidInput("averaging_periods must be >= 1");
    if (cfg.steps_per_period < 2) throw InvalidInput("steps_per_period must be >= 2");
    if (cfg.euler_step_periods < 1) throw InvalidInput("euler_step_periods must be >= 1");
    if (!(cfg.nu >= 0.0)) throw InvalidInput("nu must be >= 0");
    if (!(cfg.lift_tolerance > 0.0)) throw InvalidInput("lift_tolerance must be > 0");
    if (cfg.lift_max_iters < 1) throw InvalidInput("lift_max_iters must be >= 1");
    if (cfg.measure_substeps < 1) throw InvalidInput("measure_substeps must be >= 1");
    if (!(cfg.period_search_dt > 0.0)) throw InvalidInput("period_search_dt must be > 0");
}

const char* method_name(Method m) noexcept {
    switch (m) {
        case Method::reference: return "reference";
        case Method::young_measure: return "young_measure";
        case Method::equation_free: return "equation_free";
    }
    return "unknown";
}

namespace {

PeriodEstimate detect_period(const State& state, const ProjectiveConfig& cfg,
                             std::optional<double> hint) {
    // The search needs two return minima: up to one period of phase offset
    // plus two circulations, hence the 3.5x margin over the hint. If the
    // hinted horizon comes up short, retry once with the cold-start horizon.
    if (hint) {
        try {
            return estimate_fast_period(state, 3.5 * *hint, cfg.period_search_dt,
                                        cfg.period_threshold);
        } catch (const NoReturnFound&) {
        }
    }
    return estimate_fast_period(state, 10.0, cfg.period_search_dt, cfg.period_threshold);
}

}  // namespace

EmpiricalMeasure build_measure(const State& state0, const ProjectiveConfig& cfg,
                               std::optional<double> period_hint) {
    validate_config(cfg);
    const PeriodEstimate pe = detect_period(state0, cfg, period_hint);

    const std::int64_t per_orbit = static_cast<std::int64_t>(cfg.steps_per_period) * cfg.measure_substeps;
    const double dt = pe.period / static_cast<double>(per_orbit);
    const double t_end = static_cast<double>(cfg.averaging_periods) * pe.period;

    const Field field = fast_field();
    Trajectory traj = integrate_record(field, state0, t_end, dt, cfg.measure_substeps);

    EmpiricalMeasure measure;
    measure.period = pe.period;
    measure.sample_dt = dt * static_cast<double>(cfg.measure_substeps);
    measure.rhs_evals = traj.rhs_evals + pe.rhs_evals;
    // Right endpoints only: the window start is the trajectory's own t = 0
    // sample, the window end becomes the lift template.
    measure.samples.assign(std::make_move_iterator(traj.states.begin() + 1),
                           std::make_move_iterator(traj.states.end()));
    return measure;
}

std::vector<double> average_drift(const EmpiricalMeasure& measure) {
    if (measure.samples.size() < 2) throw InvalidInput("measure needs at least 2 samples");
    const std::size_t rows = observable_count(measure.samples.front().size());
    std::vector<double> acc(rows, 0.0);
    for (const State& s : measure.samples) {
        const std::vector<double> d = drift_integrands(s);
        for (std::size_t j = 0; j < rows; ++j) acc[j] += d[j];
    }
    const double w = measure.weight();
    for (double& v : acc) v *= w;
    acc[0] = 0.0;  // mass drift is identically zero
    return acc;
}

std::vector<int> default_fixed_indices(std::size_t n) {
    std::vector<int> idx(n / 2 - 1);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

namespace {

enum class LiftStatus { converged, singular, stalled, left_orthant, out_of_iters };

struct NewtonOutcome {
    LiftStatus status = LiftStatus::out_of_iters;
    std::vector<double> u;
    int iterations = 0;
    double residual = 0.0;
};

double scaled_residual_norm(const ObservableVector& v, const ObservableVector& target) {
    double worst = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        worst = std::max(worst, std::abs(v[j] - target[j]) / std::max(1.0, std::abs(target[j])));
    }
    return worst;
}

NewtonOutcome newton_lift(const ObservableVector& v_target, const State& template_state,
                          const std::vector<int>& fixed, double tolerance, int max_iters) {
    const std::size_t n = template_state.size();
    const std::size_t rows = observable_count(n);

    std::vector<bool> is_fixed(n, false);
    for (int idx : fixed) is_fixed[static_cast<std::size_t>(idx)] = true;
    std::vector<std::size_t> free_idx;
    for (std::size_t k = 0; k < n; ++k) {
        if (!is_fixed[k]) free_idx.push_back(k);
    }
    // N - (N/2 - 1) unknowns against N/2 + 1 equations: square by construction.

    NewtonOutcome out;
    out.u = template_state.vec();
    out.residual = scaled_residual_norm(observable_vector(State(out.u)), v_target);

    for (int iter = 0; iter < max_iters; ++iter) {
        if (out.residual <= tolerance) {
            out.status = LiftStatus::converged;
            out.iterations = iter;
            return out;
        }

        const State current(out.u);
        const ObservableVector v = observable_vector(current);
        const std::vector<double> grads = observable_gradients(current);

        std::vector<double> jac(rows * rows);
        std::vector<double> rhs(rows);
        for (std::size_t j = 0; j < rows; ++j) {
            rhs[j] = v_target[j] - v[j];
            for (std::size_t m = 0; m < rows; ++m) {
                jac[j * rows + m] = grads[j * n + free_idx[m]];
            }
        }
        if (!solve_linear_inplace(jac, rhs, rows)) {
            out.status = LiftStatus::singular;
            out.iterations = iter;
            return out;
        }

        // Damped update: halve until the iterate stays positive and the
        // scaled residual decreases.
        bool accepted = false;
        bool positivity_blocked = true;
        for (double lambda = 1.0; lambda >= 1e-8; lambda *= 0.5) {
            std::vector<double> trial = out.u;
            bool positive = true;
            for (std::size_t m = 0; m < rows; ++m) {
                trial[free_idx[m]] += lambda * rhs[m];
                positive = positive && trial[free_idx[m]] > 0.0;
            }
            if (!positive) continue;
            positivity_blocked = false;
            const double trial_res = scaled_residual_norm(observable_vector(State(trial)), v_target);
            if (trial_res < out.residual * (1.0 - 1e-4 * lambda) || trial_res <= tolerance) {
                out.u = std::move(trial);
                out.residual = trial_res;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.status = positivity_blocked ? LiftStatus::left_orthant : LiftStatus::stalled;
            out.iterations = iter + 1;
            return out;
        }
    }
    out.status = out.residual <= tolerance ? LiftStatus::converged : LiftStatus::out_of_iters;
    out.iterations = max_iters;
    return out;
}

}  // namespace

LiftResult lift_detailed(const ObservableVector& v_target, const State& template_state,
                         const std::vector<int>& fixed_indices, double tolerance, int max_iters) {
    const std::size_t n = template_state.size();
    const std::size_t rows = observable_count(n);

    if (v_target.size() != rows) {
        throw InvalidInput("target has " + std::to_string(v_target.size()) + " entries, expected " +
                           std::to_string(rows));
    }
    if (!(v_target.front() > 0.0)) throw InvalidInput("target mass entry must be positive");
    if (!(v_target.back() > 0.0)) throw InvalidInput("target product entry must be positive");
    if (fixed_indices.size() != n / 2 - 1) {
        throw InvalidInput("need exactly N/2 - 1 fixed indices, got " +
                           std::to_string(fixed_indices.size()));
    }
    std::vector<bool> seen(n, false);
    for (int idx : fixed_indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n) {
            throw InvalidInput("fixed index " + std::to_string(idx) + " out of range");
        }
        if (seen[static_cast<std::size_t>(idx)]) {
            throw InvalidInput("fixed index " + std::to_string(idx) + " repeated");
        }
        seen[static_cast<std::size_t>(idx)] = true;
    }

    // The carried-over selection is free, so a failing attempt (singular
    // Jacobian, stalled damping, lost positivity) rotates the index set
    // cyclically and retries with a different slice of free components.
    std::vector<int> fixed = fixed_indices;
    std::size_t singular = 0;
    NewtonOutcome best;
    best.residual = std::numeric_limits<double>::infinity();
    for (std::size_t attempt = 0; attempt < n; ++attempt) {
        NewtonOutcome out = newton_lift(v_target, template_state, fixed, tolerance, max_iters);
        if (out.status == LiftStatus::converged) {
            return LiftResult{State(std::move(out.u)), out.iterations, out.residual, fixed};
        }
        if (out.status == LiftStatus::singular) ++singular;
        if (out.residual < best.residual) best = out;
        for (int& idx : fixed) idx = (idx + 1) % static_cast<int>(n);
        std::sort(fixed.begin(), fixed.end());
    }
    if (singular == n) {
        throw SingularJacobian("lift Jacobian singular for all " + std::to_string(n) +
                               " rotations of the fixed-index set");
    }
    if (best.status == LiftStatus::left_orthant) {
        throw LeftPositiveOrthant("lift damping could not keep the iterate positive for any of " +
                                  std::to_string(n) + " fixed-index rotations (best residual " +
                                  std::to_string(best.residual) + ")");
    }
    throw MaxItersExceeded("lift did not reach tolerance " + std::to_string(tolerance) +
                           " for any of " + std::to_string(n) +
                           " fixed-index rotations (best residual " +
                           std::to_string(best.residual) + " after " +
                           std::to_string(best.iterations) + " iterations)");
}

State lift(const ObservableVector& v_target, const State& template_state) {
    return lift_detailed(v_target, template_state, default_fixed_indices(template_state.size()))
        .state;
}

ProjectiveStep ym_projective_step(const State& state, const ProjectiveConfig& cfg,
                                  std::optional<double> period_hint,
                                  const std::optional<ObservableVector>& v_start) {
    validate_config(cfg);
    const ObservableVector v_old = v_start ? *v_start : observable_vector(state);

    EmpiricalMeasure measure = build_measure(state, cfg, period_hint);
    const std::vector<double> drift = average_drift(measure);

    ProjectiveStep step{state, v_old, 0.0, measure.period, measure.rhs_evals, 0};
    step.dt_slow = static_cast<double>(cfg.euler_step_periods) * measure.period;
    for (std::size_t j = 0; j < step.v_new.size(); ++j) {
        step.v_new[j] += step.dt_slow * cfg.nu * drift[j];
    }

    LiftResult lifted =
        lift_detailed(step.v_new, measure.samples.back(), default_fixed_indices(state.size()),
                      cfg.lift_tolerance, cfg.lift_max_iters);
    step.state = std::move(lifted.state);
    step.lift_iterations = lifted.iterations;
    return step;
}

ProjectiveStep ef_projective_step(const State& state, const ProjectiveConfig& cfg,
                                  std::optional<double> period_hint,
                                  const std::optional<ObservableVector>& v_start) {
    validate_config(cfg);
    const PeriodEstimate pe = detect_period(state, cfg, period_hint);

    const std::int64_t burst_steps =
        static_cast<std::int64_t>(cfg.steps_per_period) * cfg.measure_substeps;
    const double dt = pe.period / static_cast<double>(burst_steps);

    const Field field = full_field(cfg.nu);
    Trajectory burst = integrate_record(field, state, pe.period, dt, burst_steps);
    const State& end_state = burst.states.back();

    // The chord is measured on the burst itself; the projected values advance
    // the caller's running observables (v_start) when chaining steps.
    const ObservableVector v_burst = observable_vector(state);
    const ObservableVector v_end = observable_vector(end_state);
    const ObservableVector v_old = v_start ? *v_start : v_burst;

    ProjectiveStep step{state, v_old, 0.0, pe.period, burst.rhs_evals + pe.rhs_evals, 0};
    step.dt_slow = static_cast<double>(cfg.euler_step_periods) * pe.period;
    for (std::size_t j = 1; j < v_old.size(); ++j) {
        const double slope = (v_end[j] - v_burst[j]) / pe.period;  // chord over one period
        step.v_new[j] = v_old[j] + slope * step.dt_slow;
    }
    // j = 0 untouched: the mass chord is zero by conservation.

    const std::vector<int> fixed = default_fixed_indices(state.size());
    LiftResult lifted =
        lift_detailed(step.v_new, end_state, fixed, cfg.lift_tolerance, cfg.lift_max_iters);
    step.state = std::move(lifted.state);
    step.lift_iterations = lifted.iterations;
    return step;
}

ObservableSeries run_multiscale(Method method, const State& state0, const ProjectiveConfig& cfg,
                                int total_periods) {
    validate_config(cfg);
    if (method == Method::reference) {
        throw InvalidInput("run_multiscale expects a projective method");
    }
    if (total_periods < 0) throw InvalidInput("total_periods must be >= 0");
    if (total_periods % cfg.euler_step_periods != 0) {
        throw InvalidInput("total_periods must be a multiple of euler_step_periods");
    }

    ObservableSeries series;
    series.method = method;
    series.times.push_back(0.0);
    series.values.push_back(observable_vector(state0));

    const int n_steps = total_periods / cfg.euler_step_periods;
    State state = state0;
    ObservableVector v_current = series.values.front();
    double t = 0.0;
    std::optional<double> hint;

    for (int i = 0; i < n_steps; ++i) {
        ProjectiveStep step{state, {}, 0.0, 0.0, 0, 0};
        try {
            step = method == Method::young_measure
                       ? ym_projective_step(state, cfg, hint, v_current)
                       : ef_projective_step(state, cfg, hint, v_current);
        } catch (const NumericalError& err) {
            throw MultiscaleAborted("projective step " + std::to_string(i) + " failed: " +
                                        err.what(),
                                    std::move(series), i);
        }
        t += step.dt_slow;
        state = std::move(step.state);
        hint = step.period;
        v_current = step.v_new;
        series.times.push_back(t);
        series.values.push_back(std::move(step.v_new));
        series.rhs_eval_count += step.rhs_evals;
    }
    return series;
}

}  // namespace kdvb
