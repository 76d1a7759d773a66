#pragma once

#include <cstdint>
#include <span>

#include "vrb/mlp.hpp"

namespace vrb {

// Adam with bias correction. This module always steps in the descent
// direction; callers flip the gradient sign for ascent.
struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step_count = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_stab = 1e-8;

    static AdamState for_params(std::size_t n, double lr) {
        AdamState s;
        s.first_moment.assign(n, 0.0);
        s.second_moment.assign(n, 0.0);
        s.learning_rate = lr;
        return s;
    }
};

void adam_step(AdamState& state, ParamVector& params, std::span<const double> grad);

} // namespace vrb
