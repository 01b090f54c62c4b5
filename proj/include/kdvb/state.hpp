#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "kdvb/errors.hpp"

namespace kdvb {

/// Lattice state U_1..U_N with periodic indexing (U_0 == U_N, U_{N+1} == U_1).
///
/// Invariants enforced at construction: N even, N >= 6, every component
/// strictly positive and finite. Immutable value type; copying is cheap at
/// the lattice sizes this library targets (N <= ~64).
class State {
public:
    explicit State(std::vector<double> u);

    [[nodiscard]] std::size_t size() const noexcept { return u_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return u_[k]; }

    /// Periodic access: any integer offset is wrapped mod N.
    [[nodiscard]] double at_wrapped(long k) const noexcept {
        const long n = static_cast<long>(u_.size());
        long m = k % n;
        if (m < 0) m += n;
        return u_[static_cast<std::size_t>(m)];
    }

    [[nodiscard]] std::span<const double> values() const noexcept { return u_; }
    [[nodiscard]] const std::vector<double>& vec() const noexcept { return u_; }

    [[nodiscard]] double sum() const noexcept;
    [[nodiscard]] double mean() const noexcept { return sum() / static_cast<double>(size()); }

    friend bool operator==(const State&, const State&) = default;

private:
    std::vector<double> u_;
};

/// Validates a raw component array against the State invariants.
/// Throws InvalidInput naming the violated condition.
void validate_state_values(std::span<const double> u);

/// Lattice and coupling parameters.
///
/// The canonical time unit is the one of dU_k/dt = U_k(U_{k-1}-U_{k+1}) + nu*D_k;
/// slower bookkeeping units (tau = eps*t with nu = eps/(2h), and the Lax-flow
/// unit s = -t/2) are handled in documentation only, never as code paths.
struct SystemParams {
    int n = 6;        ///< lattice size, even, >= 6
    double nu = 0.0;  ///< diffusion strength, >= 0 (0 selects the pure fast system)

    /// Mesh width h = 2*pi/N, so h*N == 2*pi to roundoff.
    [[nodiscard]] double h() const noexcept {
        return 2.0 * std::numbers::pi / static_cast<double>(n);
    }
};

/// Throws InvalidInput unless n is even and >= 6 and nu >= 0.
void validate_params(const SystemParams& params);

/// Componentwise square roots of a state, a_k = sqrt(u_k).
struct AVector {
    std::vector<double> a;
};

/// Change of variables a_k = sqrt(u_k). Input positivity is guaranteed by State.
[[nodiscard]] AVector to_a(const State& state);

/// Inverse change of variables u_k = a_k^2. Throws InvalidInput on non-positive
/// entries or bad dimension.
[[nodiscard]] State from_a(const AVector& a);

}  // namespace kdvb
