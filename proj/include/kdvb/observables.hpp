#pragma once

#include <vector>

#include "kdvb/state.hpp"

namespace kdvb {

/// Slow observables of a state: v_j = tr(L^{2j}) for j = 1..N/2 followed by
/// v_{N/2+1} = prod_k u_k. Every entry is a first integral of the fast flow.
using ObservableVector = std::vector<double>;

/// Number of slow observables for lattice size n, i.e. n/2 + 1.
[[nodiscard]] constexpr std::size_t observable_count(std::size_t n) noexcept { return n / 2 + 1; }

/// tr(L^p) for even p in [2, N], computed from explicit matrix powers.
/// The closed-form polynomials for p = 2, 4 serve as test cross-checks only.
[[nodiscard]] double trace_power(const State& state, int p);

/// The three product invariants of the fast flow.
struct ProductInvariants {
    double all = 0.0;   ///< u_1 u_2 ... u_N
    double even = 0.0;  ///< u_2 u_4 ... u_N   (even positions, 1-based)
    double odd = 0.0;   ///< u_1 u_3 ... u_{N-1}

    friend bool operator==(const ProductInvariants&, const ProductInvariants&) = default;
};

[[nodiscard]] ProductInvariants product_invariants(const State& state);

/// Assembles [tr L^2, tr L^4, ..., tr L^N, prod u_k]. Entry 1 equals
/// 2 * sum(u) for every state.
[[nodiscard]] ObservableVector observable_vector(const State& state);

/// Analytic gradient of observable j (1-based, 1 <= j <= N/2+1) with respect
/// to the state components. For trace observables,
/// d tr(L^p) / du_k = p (L^{p-1})_{k,k+1} / a_k; for the product,
/// d/du_k = prod_{m != k} u_m.
[[nodiscard]] std::vector<double> observable_gradient(const State& state, int j);

/// All observable gradients stacked as a (N/2+1) x N row-major matrix,
/// sharing one pass over the Lax-matrix powers.
[[nodiscard]] std::vector<double> observable_gradients(const State& state);

/// Directional derivative of observable j along the bare diffusion stencil,
/// grad v_j . D(u). Callers apply the nu scaling. Identically zero for j = 1:
/// the gradient is the constant 2 and the stencil telescopes.
[[nodiscard]] double drift_integrand(const State& state, int j);

/// drift_integrand for every j at once, one gradient pass.
[[nodiscard]] std::vector<double> drift_integrands(const State& state);

}  // namespace kdvb
