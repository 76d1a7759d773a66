#include "vrb/encoder.hpp"

#include <cmath>
#include <string>

#include "vrb/errors.hpp"

namespace vrb {

void EncoderParams::validate() const {
    g_spec.validate();
    h_spec.validate();
    if (g_spec.output_width() != 2 * d_z || h_spec.output_width() != 2 * d_z) {
        throw ShapeError("encoder heads must output 2*d_z = " + std::to_string(2 * d_z) +
                         " values, got " + std::to_string(g_spec.output_width()) + " and " +
                         std::to_string(h_spec.output_width()));
    }
    if (g_params.size() != g_spec.param_count() || h_params.size() != h_spec.param_count()) {
        throw ShapeError("encoder parameter vectors do not match their specs");
    }
}

EncoderParams EncoderParams::init(int state_dim, int action_dim, int d_z, int hidden,
                                  RngStream& rng) {
    EncoderParams enc;
    enc.d_z = d_z;
    enc.g_spec = MlpSpec{{state_dim + action_dim, hidden, 2 * d_z}};
    enc.h_spec = MlpSpec{{state_dim, hidden, 2 * d_z}};
    enc.g_params = init_params(enc.g_spec, rng);
    enc.h_params = init_params(enc.h_spec, rng);
    return enc;
}

double kl_std_normal(std::span<const double> mean, std::span<const double> log_variance) {
    if (mean.size() != log_variance.size()) {
        throw ShapeError("kl_std_normal width mismatch: " + std::to_string(mean.size()) +
                         " vs " + std::to_string(log_variance.size()));
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double mu = mean[i];
        const double lv = log_variance[i];
        if (!std::isfinite(mu) || !std::isfinite(lv)) {
            throw NumericError("non-finite Gaussian parameter at index " + std::to_string(i));
        }
        kl += 0.5 * (mu * mu + std::exp(lv) - 1.0 - lv);
    }
    return kl;
}

namespace {

struct HeadOut {
    std::vector<double> mu, logvar;
};

HeadOut eval_head(const MlpSpec& spec, const ParamVector& params,
                  std::span<const double> input, int d_z) {
    const std::vector<double> raw = mlp_forward(spec, params, input);
    HeadOut out;
    out.mu.assign(raw.begin(), raw.begin() + d_z);
    out.logvar.resize(d_z);
    for (int i = 0; i < d_z; ++i) {
        double lv = raw[d_z + i];
        out.logvar[i] = lv < kLogVarMin ? kLogVarMin : (lv > kLogVarMax ? kLogVarMax : lv);
    }
    return out;
}

std::vector<double> sample_z(const HeadOut& h, std::span<const double> noise) {
    std::vector<double> z(h.mu.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = h.mu[i] + std::exp(0.5 * h.logvar[i]) * noise[i];
    }
    return z;
}

} // namespace

LatentTriple encode_with_noise(const EncoderParams& enc, std::span<const double> x_t,
                               std::span<const double> x_next, std::span<const double> action,
                               std::span<const double> noise) {
    enc.validate();
    if (noise.size() != static_cast<std::size_t>(3 * enc.d_z)) {
        throw ShapeError("encode noise length " + std::to_string(noise.size()) + " != 3*d_z");
    }
    const std::size_t g_in = static_cast<std::size_t>(enc.g_spec.input_width());
    if (x_t.size() + action.size() != g_in) {
        throw ShapeError("encoder g input " + std::to_string(x_t.size() + action.size()) +
                         " != expected " + std::to_string(g_in));
    }

    std::vector<double> g_input;
    g_input.reserve(g_in);
    g_input.insert(g_input.end(), x_t.begin(), x_t.end());
    g_input.insert(g_input.end(), action.begin(), action.end());

    const HeadOut g = eval_head(enc.g_spec, enc.g_params, g_input, enc.d_z);
    const HeadOut h = eval_head(enc.h_spec, enc.h_params, x_t, enc.d_z);
    const HeadOut hp = eval_head(enc.h_spec, enc.h_params, x_next, enc.d_z);

    LatentTriple lat;
    lat.noise_g.assign(noise.begin(), noise.begin() + enc.d_z);
    lat.noise_h.assign(noise.begin() + enc.d_z, noise.begin() + 2 * enc.d_z);
    lat.noise_hp.assign(noise.begin() + 2 * enc.d_z, noise.end());
    lat.mu_g = g.mu;
    lat.logvar_g = g.logvar;
    lat.mu_h = h.mu;
    lat.logvar_h = h.logvar;
    lat.mu_hp = hp.mu;
    lat.logvar_hp = hp.logvar;
    lat.z_g = sample_z(g, lat.noise_g);
    lat.z_h = sample_z(h, lat.noise_h);
    lat.z_hp = sample_z(hp, lat.noise_hp);
    return lat;
}

LatentTriple encode(const EncoderParams& enc, std::span<const double> x_t,
                    std::span<const double> x_next, std::span<const double> action,
                    RngStream& rng) {
    std::vector<double> noise(3 * enc.d_z);
    for (double& n : noise) n = rng.normal();
    return encode_with_noise(enc, x_t, x_next, action, noise);
}

LatentTriple encode_mean(const EncoderParams& enc, std::span<const double> x_t,
                         std::span<const double> x_next, std::span<const double> action) {
    const std::vector<double> noise(3 * enc.d_z, 0.0);
    return encode_with_noise(enc, x_t, x_next, action, noise);
}

} // namespace vrb
