#include "vrb/adam.hpp"

#include <cmath>
#include <string>

#include "vrb/errors.hpp"

namespace vrb {

void adam_step(AdamState& state, ParamVector& params, std::span<const double> grad) {
    const std::size_t n = params.size();
    if (grad.size() != n || state.first_moment.size() != n || state.second_moment.size() != n) {
        throw ShapeError("adam_step length mismatch: params " + std::to_string(n) +
                         ", grad " + std::to_string(grad.size()) + ", moments " +
                         std::to_string(state.first_moment.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(grad[i])) {
            throw NumericError("non-finite gradient at index " + std::to_string(i));
        }
    }

    state.step_count += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    for (std::size_t i = 0; i < n; ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = b1 * m + (1.0 - b1) * grad[i];
        v = b2 * v + (1.0 - b2) * grad[i] * grad[i];
        const double m_hat = m / corr1;
        const double v_hat = v / corr2;
        params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon_stab);
    }
}

} // namespace vrb
