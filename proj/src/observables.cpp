#include "kdvb/observables.hpp"

#include <cmath>

#include "kdvb/dynamics.hpp"
#include "kdvb/lax.hpp"

namespace kdvb {

namespace {

void check_observable_index(const State& state, int j) {
    const int count = static_cast<int>(observable_count(state.size()));
    if (j < 1 || j > count) {
        throw InvalidInput("observable index j = " + std::to_string(j) + " out of range [1, " +
                           std::to_string(count) + "]");
    }
}

/// Gradient of tr(L^p) taken from M = L^{p-1}: p * M[k][k+1] / a_k.
std::vector<double> trace_gradient_from_power(const State& state, const Matrix& l_pm1, int p) {
    const std::size_t n = state.size();
    std::vector<double> grad(n);
    for (std::size_t k = 0; k < n; ++k) {
        grad[k] = static_cast<double>(p) * l_pm1(k, (k + 1) % n) / std::sqrt(state[k]);
    }
    return grad;
}

/// Gradient of the product observable: prod_{m != k} u_m, computed by
/// exclusion rather than division.
std::vector<double> product_gradient(const State& state) {
    const std::size_t n = state.size();
    std::vector<double> grad(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            if (m != k) grad[k] *= state[m];
        }
    }
    return grad;
}

}  // namespace

double trace_power(const State& state, int p) {
    const int n = static_cast<int>(state.size());
    if (p < 2 || p > n || p % 2 != 0) {
        throw InvalidInput("trace power p = " + std::to_string(p) + " must be even and in [2, " +
                           std::to_string(n) + "]");
    }
    const Matrix l = lax_matrix(state);
    Matrix power = l;
    for (int q = 2; q <= p; ++q) power = power * l;
    return power.trace();
}

ProductInvariants product_invariants(const State& state) {
    ProductInvariants p;
    p.all = 1.0;
    p.even = 1.0;
    p.odd = 1.0;
    for (std::size_t k = 0; k < state.size(); ++k) {
        p.all *= state[k];
        // 1-based position k+1: odd positions are even 0-based indices.
        if (k % 2 == 0) {
            p.odd *= state[k];
        } else {
            p.even *= state[k];
        }
    }
    return p;
}

ObservableVector observable_vector(const State& state) {
    const std::size_t n = state.size();
    ObservableVector v;
    v.reserve(observable_count(n));

    const Matrix l = lax_matrix(state);
    Matrix power = l;
    for (std::size_t q = 2; q <= n; ++q) {
        power = power * l;
        if (q % 2 == 0) v.push_back(power.trace());
    }
    v.push_back(product_invariants(state).all);
    return v;
}

std::vector<double> observable_gradient(const State& state, int j) {
    check_observable_index(state, j);
    const std::size_t n = state.size();
    if (j == static_cast<int>(observable_count(n))) return product_gradient(state);

    const int p = 2 * j;
    const Matrix l = lax_matrix(state);
    Matrix power = Matrix::identity(n);
    for (int q = 1; q <= p - 1; ++q) power = power * l;
    return trace_gradient_from_power(state, power, p);
}

std::vector<double> observable_gradients(const State& state) {
    const std::size_t n = state.size();
    const std::size_t rows = observable_count(n);
    std::vector<double> out(rows * n);

    const Matrix l = lax_matrix(state);
    Matrix power = l;  // L^1
    std::size_t row = 0;
    for (std::size_t p = 2; p <= n; p += 2, ++row) {
        // power currently holds L^{p-1}.
        const std::vector<double> grad = trace_gradient_from_power(state, power, static_cast<int>(p));
        for (std::size_t k = 0; k < n; ++k) out[row * n + k] = grad[k];
        if (p < n) power = (power * l) * l;
    }
    const std::vector<double> pg = product_gradient(state);
    for (std::size_t k = 0; k < n; ++k) out[row * n + k] = pg[k];
    return out;
}

double drift_integrand(const State& state, int j) {
    check_observable_index(state, j);
    if (j == 1) return 0.0;  // constant gradient against a zero-sum stencil

    const std::vector<double> grad = observable_gradient(state, j);
    const std::vector<double> stencil = diffusion_stencil(state);
    double dot = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) dot += grad[k] * stencil[k];
    return dot;
}

std::vector<double> drift_integrands(const State& state) {
    const std::size_t n = state.size();
    const std::size_t rows = observable_count(n);
    const std::vector<double> grads = observable_gradients(state);
    const std::vector<double> stencil = diffusion_stencil(state);

    std::vector<double> out(rows, 0.0);
    for (std::size_t j = 1; j < rows; ++j) {  // row 0 is the mass observable, exactly zero
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += grads[j * n + k] * stencil[k];
        out[j] = dot;
    }
    return out;
}

}  // namespace kdvb
