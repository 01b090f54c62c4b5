#pragma once

#include <cstdint>
#include <vector>

#include "kdvb/dynamics.hpp"
#include "kdvb/state.hpp"

namespace kdvb {

/// Uniformly sampled solution record. times[i] = i * sample_every * dt.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    double dt = 0.0;
    Field::Kind field_kind = Field::Kind::fast;
    double nu = 0.0;
    std::int64_t steps_taken = 0;
    std::int64_t rhs_evals = 0;
};

/// One classical 4th-order Runge-Kutta step. Positivity of the result is
/// re-validated; a violated component raises PositivityLost (step too large).
[[nodiscard]] State rk4_step(const Field& field, const State& state, double dt);

/// Fixed-step RK4 integration to t_end, recording every sample_every-th step
/// (the initial state included). A request shorter than one step returns just
/// the initial state.
[[nodiscard]] Trajectory integrate_record(const Field& field, const State& state0, double t_end,
                                          double dt, std::int64_t sample_every = 1);

/// Nearest-return period estimate.
struct PeriodEstimate {
    double period = 0.0;           ///< refined location of the first near-return
    double return_distance = 0.0;  ///< normalized ||U(T) - U(0)|| / ||U(0)|| at the return
    bool confident = false;        ///< return_distance at or below the threshold
    std::int64_t rhs_evals = 0;    ///< search cost, for the speedup accounting
};

/// Estimates the approximate fast period of the orbit through state0 by
/// nearest return in full state space: integrate the fast system, track
/// d(t) = ||U(t) - U(0)|| / ||U(0)||, and locate its local minima after an
/// exclusion window of 10*dt, each refined by quadratic interpolation over
/// the three adjacent samples. The first minimum must fall below threshold
/// (it certifies that the orbit nearly returns); the period is the spacing
/// between the first two minima, which cancels the phase offset the orbit's
/// precession puts on the first return location.
///
/// Throws FixedPointError if state0 is an equilibrium of the fast field and
/// NoReturnFound if fewer than two qualifying minima exist within
/// search_horizon.
[[nodiscard]] PeriodEstimate estimate_fast_period(const State& state0, double search_horizon = 10.0,
                                                  double dt = 1e-3, double threshold = 0.05);

/// Diagnostic fallback: period from the average spacing of successive maxima
/// of the first component along the fast trajectory.
[[nodiscard]] PeriodEstimate estimate_period_from_peaks(const State& state0,
                                                        double search_horizon = 10.0,
                                                        double dt = 1e-3);

namespace detail {
/// In-place RK4 kernel on raw buffers; returns false when the step leaves the
/// positive orthant (u is then garbage). work must hold 5*n doubles.
bool rk4_step_raw(const Field& field, std::vector<double>& u, double dt,
                  std::vector<double>& work);
}  // namespace detail

}  // namespace kdvb
