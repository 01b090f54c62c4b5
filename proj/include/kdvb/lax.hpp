#pragma once

#include "kdvb/linalg.hpp"
#include "kdvb/state.hpp"

namespace kdvb {

/// Symmetric Lax matrix of a state: L[k][k+1] = L[k+1][k] = a_k = sqrt(u_k)
/// (indices mod N), zero diagonal, 2N positive entries in total.
[[nodiscard]] Matrix lax_matrix(const State& state);

/// Antisymmetric companion matrix: B[k][k+2] = a_k a_{k+1},
/// B[k][k-2] = -a_{k-1} a_{k-2} (indices mod N). Needs N >= 6 so the
/// +2 and -2 bands cannot collide.
[[nodiscard]] Matrix b_matrix(const State& state);

/// Time derivative of L along the fast flow, -1/2 [B, L]. Along a fast
/// trajectory U(t) this equals d/dt lax_matrix(U(t)); the unit-test and
/// acceptance suites verify that identity by central differences.
[[nodiscard]] Matrix lax_commutator_rate(const State& state);

}  // namespace kdvb
