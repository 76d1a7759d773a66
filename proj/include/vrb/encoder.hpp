#pragma once

#include "vrb/mlp.hpp"

namespace vrb {

// Log-variances are clamped to this range before use; keeps the KL and the
// reparameterized samples finite for any parameter setting.
inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 5.0;

// Stochastic encoder heads. E_g reads [x_t; a_t] (the action bits are
// appended so the score can discriminate actions), E_h reads a bare state
// and is shared between x_t and x_{t+1}. Each head outputs mean and
// log-variance halves of width d_z.
struct EncoderParams {
    MlpSpec g_spec, h_spec;
    ParamVector g_params, h_params;
    int d_z = 16;

    void validate() const;
    static EncoderParams init(int state_dim, int action_dim, int d_z, int hidden,
                              RngStream& rng);
};

// Sampled latent codes with everything needed to reproduce them: Gaussian
// parameters per head and the standard-normal draws used.
struct LatentTriple {
    std::vector<double> z_g, z_h, z_hp;
    std::vector<double> mu_g, logvar_g;
    std::vector<double> mu_h, logvar_h;
    std::vector<double> mu_hp, logvar_hp;
    std::vector<double> noise_g, noise_h, noise_hp;
};

// KL( N(mu, diag(exp(logvar))) || N(0, I) ), in closed form.
double kl_std_normal(std::span<const double> mean, std::span<const double> log_variance);

// Reparameterized sampling: z = mu + exp(logvar / 2) * noise. Noise order per
// transition: g head, then h(x_t), then h(x_{t+1}).
LatentTriple encode(const EncoderParams& enc, std::span<const double> x_t,
                    std::span<const double> x_next, std::span<const double> action,
                    RngStream& rng);
LatentTriple encode_with_noise(const EncoderParams& enc, std::span<const double> x_t,
                               std::span<const double> x_next, std::span<const double> action,
                               std::span<const double> noise /* 3 * d_z */);
// Deterministic variant (z = mu); used for policy-side reward estimation and
// the bottleneck-free objective.
LatentTriple encode_mean(const EncoderParams& enc, std::span<const double> x_t,
                         std::span<const double> x_next, std::span<const double> action);

} // namespace vrb
