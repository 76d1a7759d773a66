#include "vrb/finite_diff.hpp"

#include <cmath>
#include <string>

#include "vrb/errors.hpp"

namespace vrb {

ParamVector finite_diff_grad(const std::function<double(const ParamVector&)>& loss,
                             const ParamVector& params, double step) {
    if (!(step > 0.0)) {
        throw NumericError("finite_diff_grad step must be positive");
    }
    ParamVector grad(params.size(), 0.0);
    ParamVector p = params;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double saved = p[i];
        p[i] = saved + step;
        const double up = loss(p);
        p[i] = saved - step;
        const double down = loss(p);
        p[i] = saved;
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericError("non-finite loss while perturbing index " + std::to_string(i));
        }
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

} // namespace vrb
