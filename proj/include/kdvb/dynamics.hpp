#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kdvb/state.hpp"

namespace kdvb {

/// Fast advection field: dU_k/dt = -U_k (U_{k+1} - U_{k-1}), periodic.
/// The component sum of the output telescopes to zero.
[[nodiscard]] std::vector<double> fast_rhs(const State& state);

/// Periodic second difference D_k = U_{k+1} - 2 U_k + U_{k-1}.
/// Component sum telescopes to zero.
[[nodiscard]] std::vector<double> diffusion_stencil(const State& state);

/// Full field: fast_rhs + nu * diffusion_stencil. Linear in nu.
[[nodiscard]] std::vector<double> full_rhs(const State& state, const SystemParams& params);

/// A right-hand side together with the tag recorded on trajectories.
/// The rhs writes into a caller-provided buffer so integrators can run
/// allocation-free; eval_count tracks cost for the speedup accounting.
/// The counter makes a Field instance stateful: concurrent integrations
/// need one Field each.
struct Field {
    enum class Kind { fast, full };

    Kind kind = Kind::fast;
    double nu = 0.0;
    std::function<void(std::span<const double>, std::span<double>)> rhs;

    mutable std::int64_t eval_count = 0;

    void operator()(std::span<const double> u, std::span<double> out) const {
        ++eval_count;
        rhs(u, out);
    }
};

/// The pure fast system (nu = 0).
[[nodiscard]] Field fast_field();

/// The full fast-slow system with diffusion strength nu >= 0.
[[nodiscard]] Field full_field(double nu);

namespace detail {
/// Raw-buffer kernels shared by the State-level wrappers and the fields.
void fast_rhs_into(std::span<const double> u, std::span<double> out) noexcept;
void diffusion_stencil_into(std::span<const double> u, std::span<double> out) noexcept;
}  // namespace detail

}  // namespace kdvb
