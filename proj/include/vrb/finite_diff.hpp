#pragma once

#include <functional>

#include "vrb/mlp.hpp"

namespace vrb {

// Central-difference gradient estimate, (loss(p + h e_i) - loss(p - h e_i)) / 2h.
// The verification oracle behind every gradient test in the suite.
ParamVector finite_diff_grad(const std::function<double(const ParamVector&)>& loss,
                             const ParamVector& params, double step);

} // namespace vrb
