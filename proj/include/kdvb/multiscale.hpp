#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kdvb/integrate.hpp"
#include "kdvb/observables.hpp"
#include "kdvb/state.hpp"

namespace kdvb {

/// Equally weighted samples along one fast orbit, the computational surrogate
/// for the invariant measure the slow drift is averaged against. All samples
/// lie on one invariant set: their observable vectors agree to the
/// conservation tolerance of the integrator.
struct EmpiricalMeasure {
    std::vector<State> samples;  ///< uniform spacing, right endpoints of the averaging window
    double period = 0.0;         ///< fast period detected at the window's start state
    double sample_dt = 0.0;      ///< spacing = period / steps_per_period
    std::int64_t rhs_evals = 0;  ///< integration cost of building the measure

    [[nodiscard]] double weight() const noexcept {
        return 1.0 / static_cast<double>(samples.size());
    }
};

/// Knobs of both projective schemes.
struct ProjectiveConfig {
    int averaging_periods = 1;    ///< orbits used to build the measure
    int steps_per_period = 50;    ///< quadrature samples per orbit
    int euler_step_periods = 3;   ///< projective Euler step length, in fast periods
    double nu = 1e-4;             ///< diffusion strength of the slow drift

    // Lifting solves N/2+1 equations for N/2+1 free components; the other
    // N/2-1 are carried over from the template.
    double lift_tolerance = 1e-10;
    int lift_max_iters = 30;

    /// Substeps of the integrator between recorded quadrature samples; raises
    /// accuracy without changing the sample spacing. The default keeps the
    /// observable spread across measure samples below 1e-6 relative.
    int measure_substeps = 2;

    double period_search_dt = 1e-3;
    /// Return-depth gate for mid-run period detection. Looser than the
    /// standalone default: the depth of the closest return varies with the
    /// phase at which a lifted state lands on its torus.
    double period_threshold = 0.2;
};

void validate_config(const ProjectiveConfig& cfg);

/// Which scheme produced a series.
enum class Method { reference, young_measure, equation_free };

[[nodiscard]] const char* method_name(Method m) noexcept;

/// Time-stamped observable vectors with provenance and cost accounting.
struct ObservableSeries {
    std::vector<double> times;
    std::vector<ObservableVector> values;
    Method method = Method::reference;
    std::int64_t rhs_eval_count = 0;
};

/// Samples one fast orbit starting at state0 into an empirical measure:
/// averaging_periods x steps_per_period states at uniform spacing along the
/// nu = 0 flow (a Riemann-sum quadrature of the orbit average). The fast
/// period is detected from state0 first; detection failures propagate.
[[nodiscard]] EmpiricalMeasure build_measure(const State& state0, const ProjectiveConfig& cfg,
                                             std::optional<double> period_hint = std::nullopt);

/// Average of drift_integrands over the measure: the bare (nu-free) drift of
/// each observable. Entry 1 is exactly zero (mass).
[[nodiscard]] std::vector<double> average_drift(const EmpiricalMeasure& measure);

/// Result of a lifting solve.
struct LiftResult {
    State state;
    int iterations = 0;
    double residual = 0.0;            ///< max relative residual over entries
    std::vector<int> fixed_indices;   ///< the index set that succeeded
};

/// Reconstructs a state whose observables equal v_target, holding the
/// components at fixed_indices to the template's values (carry-over) and
/// solving for the remaining N/2+1 by damped Newton with the analytic
/// observable gradients as Jacobian.
///
/// Throws SingularJacobian after all cyclic rotations of the fixed-index set
/// fail, MaxItersExceeded when Newton stalls, LeftPositiveOrthant when
/// damping cannot keep an iterate positive, InvalidInput for infeasible
/// targets (non-positive mass or product entries).
[[nodiscard]] LiftResult lift_detailed(const ObservableVector& v_target, const State& template_state,
                                       const std::vector<int>& fixed_indices,
                                       double tolerance = 1e-10, int max_iters = 30);

/// lift_detailed with the default fixed set (first N/2 - 1 components).
[[nodiscard]] State lift(const ObservableVector& v_target, const State& template_state);

/// First N/2 - 1 indices, the default carry-over set.
[[nodiscard]] std::vector<int> default_fixed_indices(std::size_t n);

/// One projective step of the measure-averaging scheme: build the measure at
/// the current state, advance the observables by forward Euler over
/// euler_step_periods fast periods with rate nu * average_drift, and lift
/// back using the final sample of the averaging orbit as template.
struct ProjectiveStep {
    State state;              ///< lifted state consistent with v_new
    ObservableVector v_new;   ///< projected observables
    double dt_slow = 0.0;     ///< time advanced = euler_step_periods * period
    double period = 0.0;
    std::int64_t rhs_evals = 0;
    int lift_iterations = 0;
};

/// v_start, when given, is the scheme's running observable state (a chained
/// run advances in observable space; the lifted state only seeds the next
/// burst and reproduces v_start within lift tolerance, not exactly). When
/// absent the observables of `state` are used.
[[nodiscard]] ProjectiveStep ym_projective_step(
    const State& state, const ProjectiveConfig& cfg,
    std::optional<double> period_hint = std::nullopt,
    const std::optional<ObservableVector>& v_start = std::nullopt);

/// One projective step of the equation-free scheme: integrate the full system
/// (nu > 0) over one detected fast period, take the chord slope of each
/// observable over that period, advance by forward Euler over
/// euler_step_periods periods, and lift back from the burst's end state.
/// The mass slope is zero by conservation.
[[nodiscard]] ProjectiveStep ef_projective_step(
    const State& state, const ProjectiveConfig& cfg,
    std::optional<double> period_hint = std::nullopt,
    const std::optional<ObservableVector>& v_start = std::nullopt);

/// Raised when a projective run fails mid-way; carries the completed part.
class MultiscaleAborted : public NumericalError {
public:
    MultiscaleAborted(std::string what, ObservableSeries partial, int failed_step)
        : NumericalError(std::move(what)), partial(std::move(partial)), failed_step(failed_step) {}

    ObservableSeries partial;
    int failed_step;
};

/// Runs total_periods fast periods of projective integration with the chosen
/// method, one checkpoint per projective step. total_periods must be a
/// multiple of cfg.euler_step_periods. Deterministic for fixed inputs.
[[nodiscard]] ObservableSeries run_multiscale(Method method, const State& state0,
                                              const ProjectiveConfig& cfg, int total_periods);

}  // namespace kdvb
