#include "kdvb/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace kdvb {

namespace detail {

bool rk4_step_raw(const Field& field, std::vector<double>& u, double dt,
                  std::vector<double>& work) {
    const std::size_t n = u.size();
    std::span<double> k1(work.data(), n);
    std::span<double> k2(work.data() + n, n);
    std::span<double> k3(work.data() + 2 * n, n);
    std::span<double> k4(work.data() + 3 * n, n);
    std::span<double> tmp(work.data() + 4 * n, n);

    field(u, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    field(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    field(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
    field(tmp, k4);

    bool positive = true;
    for (std::size_t i = 0; i < n; ++i) {
        u[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        positive = positive && (u[i] > 0.0) && std::isfinite(u[i]);
    }
    return positive;
}

}  // namespace detail

State rk4_step(const Field& field, const State& state, double dt) {
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive, got " + std::to_string(dt));
    std::vector<double> u = state.vec();
    std::vector<double> work(5 * u.size());
    if (!detail::rk4_step_raw(field, u, dt, work)) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!(u[i] > 0.0) || !std::isfinite(u[i])) throw PositivityLost(i, u[i], dt);
        }
    }
    return State(std::move(u));
}

Trajectory integrate_record(const Field& field, const State& state0, double t_end, double dt,
                            std::int64_t sample_every) {
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive, got " + std::to_string(dt));
    if (!(t_end >= 0.0)) throw InvalidInput("t_end must be nonnegative");
    if (sample_every < 1) throw InvalidInput("sample_every must be >= 1");

    Trajectory traj;
    traj.dt = dt;
    traj.field_kind = field.kind;
    traj.nu = field.nu;
    traj.times.push_back(0.0);
    traj.states.push_back(state0);

    const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));
    const std::int64_t evals_before = field.eval_count;

    std::vector<double> u = state0.vec();
    std::vector<double> work(5 * u.size());
    for (std::int64_t s = 1; s <= steps; ++s) {
        if (!detail::rk4_step_raw(field, u, dt, work)) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (!(u[i] > 0.0) || !std::isfinite(u[i])) {
                    throw PositivityLost(i, u[i], static_cast<double>(s) * dt);
                }
            }
        }
        if (s % sample_every == 0) {
            traj.times.push_back(static_cast<double>(s) * dt);
            traj.states.push_back(State(u));
        }
    }
    traj.steps_taken = steps;
    traj.rhs_evals = field.eval_count - evals_before;
    return traj;
}

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void require_not_fixed_point(const State& state0) {
    std::vector<double> f = fast_rhs(state0);
    const double scale = norm2(state0.values());
    if (norm2(f) <= 1e-12 * scale) {
        throw FixedPointError("state is an equilibrium of the fast field; no period exists");
    }
}

}  // namespace

PeriodEstimate estimate_fast_period(const State& state0, double search_horizon, double dt,
                                    double threshold) {
    if (!(dt > 0.0) || !(search_horizon > dt)) {
        throw InvalidInput("need dt > 0 and search_horizon > dt");
    }
    require_not_fixed_point(state0);

    const Field field = fast_field();
    const std::size_t n = state0.size();
    const std::vector<double> u0 = state0.vec();
    const double ref_norm = norm2(u0);

    const auto steps = static_cast<std::int64_t>(std::llround(search_horizon / dt));
    const std::int64_t exclusion = 10;  // skip the trivial minimum at t = 0

    std::vector<double> u = u0;
    std::vector<double> work(5 * n);
    std::vector<double> diff(n);

    // Collect every local minimum of the return distance over the horizon,
    // each refined by quadratic interpolation over its three samples.
    struct ReturnMin {
        double t;
        double depth;
    };
    std::vector<ReturnMin> minima;

    std::int64_t last_min_step = 0;
    double d_prev2 = 0.0;
    double d_prev1 = 0.0;
    for (std::int64_t s = 1; s <= steps; ++s) {
        if (!detail::rk4_step_raw(field, u, dt, work)) {
            throw PositivityLost(0, u[0], static_cast<double>(s) * dt);
        }
        for (std::size_t i = 0; i < n; ++i) diff[i] = u[i] - u0[i];
        const double d = norm2(diff) / ref_norm;

        if (s >= exclusion + 2 && s >= last_min_step + exclusion && d_prev1 < d_prev2 &&
            d_prev1 < d) {
            const double denom = d_prev2 - 2.0 * d_prev1 + d;
            double offset = 0.0;
            if (denom > 0.0) offset = 0.5 * (d_prev2 - d) / denom;
            offset = std::clamp(offset, -1.0, 1.0);
            minima.push_back({(static_cast<double>(s - 1) + offset) * dt,
                              std::max(0.0, d_prev1 - 0.25 * (d_prev2 - d) * offset)});
            last_min_step = s;
        }
        d_prev2 = d_prev1;
        d_prev1 = d;
    }

    // The deepest minimum is the genuine closest return; it must pass the
    // threshold. The circulation time is the spacing to the next return,
    // which precession leaves within a small factor of the anchor's depth,
    // while the shallow dips the torus geometry produces mid-orbit are far
    // off that scale and are rejected.
    const ReturnMin* anchor = nullptr;
    for (const ReturnMin& m : minima) {
        if (anchor == nullptr || m.depth < anchor->depth) anchor = &m;
    }
    if (anchor == nullptr || anchor->depth > threshold) {
        throw NoReturnFound("no near-return below threshold " + std::to_string(threshold) +
                            " within horizon " + std::to_string(search_horizon));
    }
    const double successor_gate = std::max(3.0 * anchor->depth, 1e-6);
    for (const ReturnMin& m : minima) {
        if (m.t > anchor->t && m.depth <= successor_gate) {
            PeriodEstimate est;
            est.period = m.t - anchor->t;
            est.return_distance = anchor->depth;
            est.confident = anchor->depth <= threshold;
            est.rhs_evals = 4 * steps;
            return est;
        }
    }
    throw NoReturnFound("only one near-return within horizon " + std::to_string(search_horizon) +
                        "; two are needed to measure the circulation time");
}

PeriodEstimate estimate_period_from_peaks(const State& state0, double search_horizon, double dt) {
    if (!(dt > 0.0) || !(search_horizon > dt)) {
        throw InvalidInput("need dt > 0 and search_horizon > dt");
    }
    require_not_fixed_point(state0);

    const Field field = fast_field();
    const auto steps = static_cast<std::int64_t>(std::llround(search_horizon / dt));

    std::vector<double> u = state0.vec();
    std::vector<double> work(5 * u.size());
    std::vector<double> peak_times;

    double p2 = state0[0];
    double p1 = state0[0];
    for (std::int64_t s = 1; s <= steps; ++s) {
        if (!detail::rk4_step_raw(field, u, dt, work)) {
            throw PositivityLost(0, u[0], static_cast<double>(s) * dt);
        }
        const double v = u[0];
        if (s >= 2 && p1 > p2 && p1 > v) {
            const double denom = p2 - 2.0 * p1 + v;
            const double offset = denom < 0.0 ? std::clamp(0.5 * (p2 - v) / denom, -1.0, 1.0) : 0.0;
            peak_times.push_back((static_cast<double>(s - 1) + offset) * dt);
        }
        p2 = p1;
        p1 = v;
    }
    if (peak_times.size() < 2) {
        throw NoReturnFound("fewer than two maxima of U_1 within horizon " +
                            std::to_string(search_horizon));
    }
    PeriodEstimate est;
    est.period = (peak_times.back() - peak_times.front()) /
                 static_cast<double>(peak_times.size() - 1);
    est.return_distance = 0.0;
    est.confident = peak_times.size() >= 3;
    est.rhs_evals = 4 * steps;
    return est;
}

}  // namespace kdvb
