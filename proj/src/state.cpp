#include "kdvb/state.hpp"

#include <cmath>
#include <utility>

namespace kdvb {

void validate_state_values(std::span<const double> u) {
    const std::size_t n = u.size();
    if (n < 6) {
        throw InvalidInput("state needs N >= 6 components, got " + std::to_string(n));
    }
    if (n % 2 != 0) {
        throw InvalidInput("state needs an even number of components, got " + std::to_string(n));
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(u[k])) {
            throw InvalidInput("component " + std::to_string(k + 1) + " is not finite");
        }
        if (u[k] <= 0.0) {
            throw InvalidInput("component " + std::to_string(k + 1) + " is not strictly positive (" +
                               std::to_string(u[k]) + ")");
        }
    }
}

State::State(std::vector<double> u) : u_(std::move(u)) {
    validate_state_values(u_);
}

double State::sum() const noexcept {
    double s = 0.0;
    for (double v : u_) s += v;
    return s;
}

AVector to_a(const State& state) {
    std::vector<double> a(state.size());
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::sqrt(state[k]);
    return AVector{std::move(a)};
}

State from_a(const AVector& av) {
    std::vector<double> u(av.a.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (!(av.a[k] > 0.0)) {
            throw InvalidInput("A-vector component " + std::to_string(k + 1) + " is not positive");
        }
        u[k] = av.a[k] * av.a[k];
    }
    return State(std::move(u));
}

}  // namespace kdvb
