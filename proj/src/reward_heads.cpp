#include "vrb/reward_heads.hpp"

#include <cmath>
#include <string>

#include "vrb/errors.hpp"

namespace vrb {

void RewardHeads::validate(int d_z) const {
    g_spec.validate();
    h_spec.validate();
    if (g_spec.input_width() != d_z || h_spec.input_width() != d_z) {
        throw ShapeError("reward heads must read d_z = " + std::to_string(d_z) + " inputs");
    }
    if (g_spec.output_width() != 1 || h_spec.output_width() != 1) {
        throw ShapeError("reward heads must output a single scalar");
    }
    if (g_params.size() != g_spec.param_count() || h_params.size() != h_spec.param_count()) {
        throw ShapeError("reward head parameter vectors do not match their specs");
    }
}

RewardHeads RewardHeads::init(int d_z, int hidden, RngStream& rng) {
    RewardHeads heads;
    heads.g_spec = MlpSpec{{d_z, hidden, 1}};
    heads.h_spec = MlpSpec{{d_z, hidden, 1}};
    heads.g_params = init_params(heads.g_spec, rng);
    heads.h_params = init_params(heads.h_spec, rng);
    return heads;
}

double f_score(const RewardHeads& heads, const LatentTriple& lat, double gamma,
               ShapingSign sign) {
    const double dg = mlp_forward(heads.g_spec, heads.g_params, lat.z_g)[0];
    const double dh_next = mlp_forward(heads.h_spec, heads.h_params, lat.z_hp)[0];
    const double dh_cur = mlp_forward(heads.h_spec, heads.h_params, lat.z_h)[0];
    const double s = sign == ShapingSign::airl_minus ? -1.0 : 1.0;
    // grouping the shaping terms keeps them cancelling exactly when gamma = 1
    // and D_h is constant
    return dg + (gamma * dh_next + s * dh_cur);
}

double discriminator_prob(double f, double log_pi) {
    if (!std::isfinite(f) || !std::isfinite(log_pi)) {
        throw NumericError("discriminator_prob needs finite inputs");
    }
    double t = f - log_pi;
    // clamp in log-odds space so the result stays strictly inside (0, 1)
    if (t > 36.0) t = 36.0;
    if (t < -708.0) t = -708.0;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double shaped_reward(double f, double log_pi) {
    return f - log_pi;
}

} // namespace vrb
