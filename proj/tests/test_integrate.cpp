#include <doctest.h>

#include <cmath>

#include "kdvb/integrate.hpp"
#include "kdvb/observables.hpp"
#include "test_support.hpp"

using namespace kdvb;

namespace {

double max_rel_observable_drift(const Trajectory& traj) {
    const ObservableVector v0 = observable_vector(traj.states.front());
    double worst = 0.0;
    for (const State& s : traj.states) {
        const ObservableVector v = observable_vector(s);
        for (std::size_t j = 0; j < v.size(); ++j) {
            worst = std::max(worst, std::abs(v[j] - v0[j]) / std::abs(v0[j]));
        }
    }
    return worst;
}

std::vector<double> integrate_plain(const Field& field, const State& s0, double t_end, double dt) {
    return integrate_record(field, s0, t_end, dt, std::llround(t_end / dt)).states.back().vec();
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("rk4_step basics") {
    const Field fast = fast_field();
    const State constant(std::vector<double>(6, 1.4));
    CHECK(rk4_step(fast, constant, 0.3) == constant);

    CHECK_THROWS_AS((void)rk4_step(fast, constant, 0.0), InvalidInput);
    CHECK_THROWS_AS((void)rk4_step(fast, constant, -1.0), InvalidInput);

    // Mass is conserved by a single step of the full field to roundoff.
    const Field full = full_field(0.37);
    const State s({1, 1, 1, 3, 2, 1});
    const State next = rk4_step(full, s, 1e-2);
    CHECK(test::rel_diff(next.sum(), s.sum()) < 1e-13);
}

TEST_CASE("rk4 positivity guard") {
    // A huge step throws the iterate out of the positive orthant.
    const Field fast = fast_field();
    const State s({1, 1, 1, 3, 2, 1});
    CHECK_THROWS_AS((void)rk4_step(fast, s, 50.0), PositivityLost);
}

TEST_CASE("rk4 local order is five") {
    const Field fast = fast_field();
    const State s({1, 1, 1, 3, 2, 1});
    const double dt = 0.2;

    // One-step error at dt and at dt/2, each against an eightfold-finer
    // reference over the same span; the ratio targets 2^5 = 32.
    const std::vector<double> ref_full = integrate_plain(fast, s, dt, dt / 8.0);
    const double e1 = l2_diff(rk4_step(fast, s, dt).vec(), ref_full);
    const std::vector<double> ref_half = integrate_plain(fast, s, dt / 2.0, dt / 16.0);
    const double e2 = l2_diff(rk4_step(fast, s, dt / 2.0).vec(), ref_half);

    CHECK(e1 / e2 == doctest::Approx(32.0).epsilon(0.3));
}

TEST_CASE("rk4 global order on conserved observables") {
    const State s({1, 1, 1, 3, 2, 1});
    const double t_end = 25.0;

    auto drift_at = [&](double dt) {
        const Field fast = fast_field();
        const std::int64_t steps = std::llround(t_end / dt);
        Trajectory t = integrate_record(fast, s, t_end, dt, steps / 50);
        return max_rel_observable_drift(t);
    };

    const double d1 = drift_at(4e-3);
    const double d2 = drift_at(2e-3);
    const double d3 = drift_at(1e-3);
    CHECK(d1 / d2 == doctest::Approx(16.0).epsilon(0.25));
    CHECK(d2 / d3 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("integrate_record sampling") {
    const Field fast = fast_field();
    const State s({1, 1, 1, 3, 2, 1});

    // Shorter than one step: only the initial state.
    const Trajectory none = integrate_record(fast, s, 1e-4, 1e-3);
    REQUIRE(none.states.size() == 1);
    CHECK(none.states.front() == s);
    CHECK(none.times == std::vector<double>{0.0});

    const Trajectory t = integrate_record(fast, s, 1.0, 1e-2, 10);
    REQUIRE(t.times.size() == 11);
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        CHECK(t.times[i] == doctest::Approx(0.1 * static_cast<double>(i)));
    }
    CHECK(t.steps_taken == 100);
    CHECK(t.rhs_evals == 400);
    CHECK(t.field_kind == Field::Kind::fast);

    CHECK_THROWS_AS((void)integrate_record(fast, s, 1.0, -1e-2), InvalidInput);
    CHECK_THROWS_AS((void)integrate_record(fast, s, 1.0, 1e-2, 0), InvalidInput);
}

TEST_CASE("observable conservation along the fast flow") {
    // Ten fast periods at dt = 1e-3: every invariant holds to far better
    // than 1e-6 relative.
    const Field fast = fast_field();
    const State s({1, 1, 1, 3, 2, 1});
    const Trajectory t = integrate_record(fast, s, 24.868, 1e-3, 1000);
    CHECK(max_rel_observable_drift(t) < 1e-6);
}

TEST_CASE("diffusion flattens the state") {
    const Field full = full_field(1e-3);
    const State s({1, 1, 1, 3, 2, 1});
    const Trajectory t = integrate_record(full, s, 1500.0, 1e-2, 25000);

    auto spread = [](const State& st) {
        const double mean = st.mean();
        double worst = 0.0;
        for (std::size_t k = 0; k < st.size(); ++k) worst = std::max(worst, std::abs(st[k] - mean));
        return worst;
    };

    // After the transient the envelope shrinks monotonically.
    REQUIRE(t.states.size() >= 4);
    double prev = spread(t.states[1]);
    for (std::size_t i = 2; i < t.states.size(); ++i) {
        const double cur = spread(t.states[i]);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("fast period of the reference orbit") {
    const State s({1, 1, 1, 3, 2, 1});
    const PeriodEstimate est = estimate_fast_period(s, 10.0, 1e-3, 0.05);
    CHECK(std::abs(est.period - 2.4868) <= 0.01);
    CHECK(est.return_distance <= 0.05);
    CHECK(est.confident);

    // Halving dt barely moves the estimate.
    const PeriodEstimate fine = estimate_fast_period(s, 10.0, 5e-4, 0.05);
    CHECK(test::rel_diff(fine.period, est.period) < 1e-3);
}

TEST_CASE("period estimation error cases") {
    const State constant(std::vector<double>(6, 2.0));
    CHECK_THROWS_AS((void)estimate_fast_period(constant, 10.0, 1e-3, 0.05), FixedPointError);

    // Alternating states are equilibria of the fast field too.
    const State alternating({1, 2, 1, 2, 1, 2});
    CHECK_THROWS_AS((void)estimate_fast_period(alternating, 10.0, 1e-3, 0.05), FixedPointError);

    const State s({1, 1, 1, 3, 2, 1});
    CHECK_THROWS_AS((void)estimate_fast_period(s, 1.0, 1e-3, 0.05), NoReturnFound);
    // A horizon covering one return but not two is also insufficient.
    CHECK_THROWS_AS((void)estimate_fast_period(s, 3.5, 1e-3, 0.05), NoReturnFound);
    CHECK_THROWS_AS((void)estimate_fast_period(s, 10.0, 1e-3, 1e-9), NoReturnFound);
    CHECK_THROWS_AS((void)estimate_fast_period(s, 10.0, -1.0, 0.05), InvalidInput);
}

TEST_CASE("peak fallback agrees roughly with nearest return") {
    const State s({1, 1, 1, 3, 2, 1});
    const PeriodEstimate ret = estimate_fast_period(s, 10.0, 1e-3, 0.05);
    const PeriodEstimate peaks = estimate_period_from_peaks(s, 10.0, 1e-3);
    CHECK(peaks.period == doctest::Approx(ret.period).epsilon(0.05));
}

TEST_CASE("half-period symmetry is preserved along the flow") {
    const Field fast = fast_field();
    const State s({3, 2, 1, 3, 2, 1});
    const Trajectory t = integrate_record(fast, s, 25.0, 1e-3, 500);
    for (const State& st : t.states) {
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(std::abs(st[k] - st[k + 3]) < 1e-9);
        }
    }
}
