#pragma once

#include "vrb/encoder.hpp"

namespace vrb {

// Sign of the current-state shaping term in the three-term score. The
// default gives f = D_g(z_g) + gamma * D_h(z'_h) - D_h(z_h), the
// potential-based form; paper_plus flips the last sign.
enum class ShapingSign { airl_minus, paper_plus };

// Scalar score heads over latents: D_g is the disentangled reward
// approximator, D_h the shaping term.
struct RewardHeads {
    MlpSpec g_spec, h_spec; // d_z -> 1
    ParamVector g_params, h_params;

    void validate(int d_z) const;
    static RewardHeads init(int d_z, int hidden, RngStream& rng);
};

struct VrbConfig {
    double gamma = 0.99;
    double phi = 0.001;
    double i_c = 0.5;
    bool adaptive_phi = false;
    double phi_step = 0.0;
    bool encoder_noise = true; // false: z = mu everywhere (bottleneck-free mode)
    ShapingSign shaping_sign = ShapingSign::airl_minus;
};

double f_score(const RewardHeads& heads, const LatentTriple& lat, double gamma,
               ShapingSign sign = ShapingSign::airl_minus);

// D = exp(f) / (exp(f) + pi), evaluated as a numerically stable logistic of
// f - log_pi; never returns exactly 0 or 1.
double discriminator_prob(double f, double log_pi);

// r_hat = f - log_pi; equals log D - log(1 - D).
double shaped_reward(double f, double log_pi);

} // namespace vrb
