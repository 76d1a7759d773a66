#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vrb {

struct GradCheckFamily {
    std::string name;
    int instances = 0;
    double max_rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckFamily> families;
    double max_rel_err = 0.0;
    int instances = 0;

    bool passed(double tol = 1e-4) const { return max_rel_err < tol; }
};

// Compares analytic gradients of the estimator and policy losses (plus raw
// network backward passes) against central finite differences on random
// small instances. Instances whose pre-activations sit within the
// finite-difference radius of a relu kink or a clip boundary are resampled.
GradCheckReport run_gradcheck(std::uint64_t seed, int instances_per_family = 25,
                              double fd_step = 1e-5);

} // namespace vrb
