#include "kdvb/lax.hpp"

#include <cmath>

namespace kdvb {

Matrix lax_matrix(const State& state) {
    const std::size_t n = state.size();
    Matrix l(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = std::sqrt(state[k]);
        l(k, (k + 1) % n) = a;
        l((k + 1) % n, k) = a;
    }
    return l;
}

Matrix b_matrix(const State& state) {
    const std::size_t n = state.size();
    if (n < 6) throw InvalidInput("b_matrix needs N >= 6, got " + std::to_string(n));
    Matrix b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ak = std::sqrt(state[k]);
        const double ak1 = std::sqrt(state[(k + 1) % n]);
        const double akm1 = std::sqrt(state[(k + n - 1) % n]);
        const double akm2 = std::sqrt(state[(k + n - 2) % n]);
        b(k, (k + 2) % n) = ak * ak1;
        b(k, (k + n - 2) % n) = -akm1 * akm2;
    }
    return b;
}

Matrix lax_commutator_rate(const State& state) {
    Matrix rate = commutator(b_matrix(state), lax_matrix(state));
    rate *= -0.5;
    return rate;
}

}  // namespace kdvb
