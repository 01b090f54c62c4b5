#include "kdvb/dynamics.hpp"

namespace kdvb {

namespace detail {

void fast_rhs_into(std::span<const double> u, std::span<double> out) noexcept {
    const std::size_t n = u.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double up = u[(k + 1) % n];
        const double um = u[(k + n - 1) % n];
        out[k] = -u[k] * (up - um);
    }
}

void diffusion_stencil_into(std::span<const double> u, std::span<double> out) noexcept {
    const std::size_t n = u.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double up = u[(k + 1) % n];
        const double um = u[(k + n - 1) % n];
        out[k] = up - 2.0 * u[k] + um;
    }
}

}  // namespace detail

std::vector<double> fast_rhs(const State& state) {
    std::vector<double> out(state.size());
    detail::fast_rhs_into(state.values(), out);
    return out;
}

std::vector<double> diffusion_stencil(const State& state) {
    std::vector<double> out(state.size());
    detail::diffusion_stencil_into(state.values(), out);
    return out;
}

std::vector<double> full_rhs(const State& state, const SystemParams& params) {
    validate_params(params);
    if (static_cast<std::size_t>(params.n) != state.size()) {
        throw InvalidInput("params.n = " + std::to_string(params.n) + " does not match state size " +
                           std::to_string(state.size()));
    }
    std::vector<double> out = fast_rhs(state);
    if (params.nu != 0.0) {
        const std::vector<double> d = diffusion_stencil(state);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += params.nu * d[k];
    }
    return out;
}

void validate_params(const SystemParams& params) {
    if (params.n < 6 || params.n % 2 != 0) {
        throw InvalidInput("params.n must be even and >= 6, got " + std::to_string(params.n));
    }
    if (!(params.nu >= 0.0)) {
        throw InvalidInput("params.nu must be >= 0, got " + std::to_string(params.nu));
    }
}

Field fast_field() {
    Field f;
    f.kind = Field::Kind::fast;
    f.nu = 0.0;
    f.rhs = [](std::span<const double> u, std::span<double> out) {
        detail::fast_rhs_into(u, out);
    };
    return f;
}

Field full_field(double nu) {
    if (!(nu >= 0.0)) throw InvalidInput("nu must be >= 0, got " + std::to_string(nu));
    Field f;
    f.kind = Field::Kind::full;
    f.nu = nu;
    f.rhs = [nu](std::span<const double> u, std::span<double> out) {
        const std::size_t n = u.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double up = u[(k + 1) % n];
            const double um = u[(k + n - 1) % n];
            out[k] = -u[k] * (up - um) + nu * (up - 2.0 * u[k] + um);
        }
    };
    return f;
}

}  // namespace kdvb
