#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "kdvb/observables.hpp"
#include "kdvb/state.hpp"

namespace kdvb::test {

/// Deterministic random positive states for property tests.
class StateGen {
public:
    explicit StateGen(unsigned seed = 20240817u) : rng_(seed) {}

    State next(std::size_t n = 6, double lo = 0.5, double hi = 3.0) {
        std::uniform_real_distribution<double> dist(lo, hi);
        std::vector<double> u(n);
        for (double& v : u) v = dist(rng_);
        return State(std::move(u));
    }

private:
    std::mt19937 rng_;
};

/// Central finite-difference gradient of observable j, relative step
/// h_k = step_scale * u_k. Independent oracle for the analytic gradients.
inline std::vector<double> fd_observable_gradient(const State& state, int j,
                                                  double step_scale = 1e-6) {
    const std::size_t n = state.size();
    std::vector<double> grad(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> up = state.vec();
        std::vector<double> dn = state.vec();
        const double h = step_scale * state[k];
        up[k] += h;
        dn[k] -= h;
        const double vp = observable_vector(State(std::move(up)))[static_cast<std::size_t>(j - 1)];
        const double vm = observable_vector(State(std::move(dn)))[static_cast<std::size_t>(j - 1)];
        grad[k] = (vp - vm) / (2.0 * h);
    }
    return grad;
}

/// Closed-form cross-check for tr L^4: sum of 2 u_k u_{k+1} + (u_k + u_{k-1})^2.
inline double fourth_trace_closed_form(const State& state) {
    const std::size_t n = state.size();
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double uk = state[k];
        const double up = state[(k + 1) % n];
        const double um = state[(k + n - 1) % n];
        s += 2.0 * uk * up + (uk + um) * (uk + um);
    }
    return s;
}

/// The closed-form candidate for tr L^6 at N = 6. It disagrees with the
/// direct matrix trace (72 vs 132 at the all-ones state, where it evaluates
/// to tr(L^6)/2 + 6 prod a_k); the matrix power is the canonical definition
/// and this expression is kept only to pin down the documented discrepancy.
inline double sixth_trace_closed_form_n6(const State& state) {
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) {
        const double uk = state[k];
        const double up = state[(k + 1) % 6];
        const double um = state[(k + 5) % 6];
        const double band = um + uk + up;
        s += uk * band * band + um * uk * up;
    }
    double prod_a = 1.0;
    for (std::size_t k = 0; k < 6; ++k) prod_a *= std::sqrt(state[k]);
    return s + 12.0 * prod_a;
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b)));
}

}  // namespace kdvb::test
