#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdvb/integrate.hpp"
#include "kdvb/multiscale.hpp"
#include "kdvb/state.hpp"

namespace kdvb {

/// Direct integration of the full system, observables at the samples; the
/// "true" series the projective runs are judged against.
[[nodiscard]] ObservableSeries run_reference(const State& state0, double nu, double t_end,
                                             double dt, std::int64_t sample_every = 1);

/// Reference observables at exactly the requested (increasing) times: each
/// segment is integrated with a fixed step near dt_target that divides the
/// segment, so no interpolation enters the comparison.
[[nodiscard]] ObservableSeries reference_at_times(const State& state0, double nu,
                                                  const std::vector<double>& times,
                                                  double dt_target);

/// Checkpoint errors of a projective method against the reference,
/// one row per Euler step length.
struct ErrorTable {
    Method method = Method::young_measure;
    int checkpoint_periods = 0;
    double checkpoint_time = 0.0;      ///< realized time of the last row computed
    std::vector<int> step_periods;     ///< row keys
    std::vector<std::vector<double>> scaled_errors;  ///< |v_proj - v_ref| * 1e3, columns j = 2..N/2+1
};

/// Runs the projective scheme to checkpoint_periods fast periods for every
/// Euler step length in step_set and tabulates the scaled observable errors
/// against a matching-time reference integration.
[[nodiscard]] ErrorTable make_error_table(Method method, const State& state0,
                                          const ProjectiveConfig& cfg, int checkpoint_periods,
                                          const std::vector<int>& step_set,
                                          int reference_steps_per_period = 250);

/// Plain-text rendering of an error table.
[[nodiscard]] std::string render_table(const ErrorTable& table);

/// Cost comparison between a direct and a multiscale series.
struct CostReport {
    std::int64_t rhs_evals_direct = 0;
    std::int64_t rhs_evals_multiscale = 0;
    double speedup = 0.0;
    std::string assumptions;
};

/// Reads the eval counters off two series covering comparable horizons.
[[nodiscard]] CostReport cost_report(const ObservableSeries& reference,
                                     const ObservableSeries& multiscale);

/// Step-count accounting for a decay-tracking scenario: a direct run needs
/// horizon/(period/steps_per_period) steps where horizon = ln(1/decay)/nu,
/// while the projective run needs projective_steps bursts of
/// averaging_periods*steps_per_period steps each. Both sides count 4 evals
/// per RK4 step.
[[nodiscard]] CostReport speedup_accounting(double nu, double decay_target, double period,
                                            int steps_per_period, int projective_steps,
                                            int averaging_periods);

[[nodiscard]] std::string render_report(const CostReport& report);

/// Writes a trajectory as CSV: header time,U_1..U_N then one row per sample.
/// 17 significant digits, '.' decimal point, ',' separator, LF endings;
/// byte-identical output for identical inputs.
void export_csv(const Trajectory& trajectory, const std::string& path);

/// Writes an observable series as CSV: header time,v_1..v_{N/2+1},method.
void export_csv(const ObservableSeries& series, const std::string& path);

}  // namespace kdvb
