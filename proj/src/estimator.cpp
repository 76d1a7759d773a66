#include "vrb/estimator.hpp"

#include <cmath>
#include <string>

#include "vrb/errors.hpp"

namespace vrb {

void TransitionSide::validate() const {
    if (x_next.size() != x.size() || action.size() != x.size() || log_pi.size() != x.size()) {
        throw ShapeError("transition side columns are not aligned: " + std::to_string(x.size()) +
                         "/" + std::to_string(x_next.size()) + "/" +
                         std::to_string(action.size()) + "/" + std::to_string(log_pi.size()));
    }
}

void EstimatorGrads::resize_like(const EstimatorModel& model) {
    enc_g.assign(model.enc.g_params.size(), 0.0);
    enc_h.assign(model.enc.h_params.size(), 0.0);
    head_g.assign(model.heads.g_params.size(), 0.0);
    head_h.assign(model.heads.h_params.size(), 0.0);
}

void EstimatorGrads::zero() {
    std::fill(enc_g.begin(), enc_g.end(), 0.0);
    std::fill(enc_h.begin(), enc_h.end(), 0.0);
    std::fill(head_g.begin(), head_g.end(), 0.0);
    std::fill(head_h.begin(), head_h.end(), 0.0);
}

NoiseMatrix draw_noise(const EstimatorBatch& batch, int d_z, RngStream& rng) {
    NoiseMatrix noise;
    noise.row_width = 3 * d_z;
    noise.values.resize((batch.expert.size() + batch.policy.size()) * noise.row_width);
    for (double& v : noise.values) v = rng.normal();
    return noise;
}

NoiseMatrix zero_noise(const EstimatorBatch& batch, int d_z) {
    NoiseMatrix noise;
    noise.row_width = 3 * d_z;
    noise.values.assign((batch.expert.size() + batch.policy.size()) * noise.row_width, 0.0);
    return noise;
}

namespace {

struct HeadEval {
    MlpWorkspace ws;
    std::vector<double> raw; // 2*d_z network output
    std::vector<double> mu, logvar, z;
    std::vector<char> clamped;

    void run(const MlpSpec& spec, const ParamVector& params, std::span<const double> input,
             std::span<const double> noise, int d_z) {
        mlp_forward(spec, params, input, ws, raw);
        mu.assign(raw.begin(), raw.begin() + d_z);
        logvar.resize(d_z);
        clamped.resize(d_z);
        z.resize(d_z);
        for (int i = 0; i < d_z; ++i) {
            const double lv = raw[d_z + i];
            clamped[i] = lv < kLogVarMin || lv > kLogVarMax;
            logvar[i] = lv < kLogVarMin ? kLogVarMin : (lv > kLogVarMax ? kLogVarMax : lv);
            z[i] = mu[i] + std::exp(0.5 * logvar[i]) * noise[i];
        }
    }

    // Folds dz (+ optional KL weight) into the raw output cotangent.
    std::vector<double> raw_grad(std::span<const double> dz, double w_kl, int d_z) const {
        std::vector<double> g(2 * d_z, 0.0);
        for (int i = 0; i < d_z; ++i) {
            double dmu = dz[i];
            double dlv = dz[i] * 0.5 * (z[i] - mu[i]);
            if (w_kl != 0.0) {
                dmu += w_kl * mu[i];
                dlv += w_kl * 0.5 * (std::exp(logvar[i]) - 1.0);
            }
            g[i] = dmu;
            g[d_z + i] = clamped[i] ? 0.0 : dlv;
        }
        return g;
    }

    double kl() const { return kl_std_normal(mu, logvar); }
};

// Per-transition scratch; one instance per block, reused across items.
struct TransitionEval {
    HeadEval g, h, hp;
    MlpWorkspace ws_dg, ws_dh_next, ws_dh_cur;
    std::vector<double> g_input;
    std::vector<double> out_dg, out_dh_next, out_dh_cur;

    struct Result {
        double f = 0.0;
        double kl = 0.0;
    };

    Result forward(const EncoderParams& enc, const RewardHeads& heads, const VrbConfig& cfg,
                   std::span<const double> x, std::span<const double> x_next,
                   std::span<const double> action, std::span<const double> noise) {
        const int d_z = enc.d_z;
        g_input.assign(x.begin(), x.end());
        g_input.insert(g_input.end(), action.begin(), action.end());
        g.run(enc.g_spec, enc.g_params, g_input, noise.subspan(0, d_z), d_z);
        h.run(enc.h_spec, enc.h_params, x, noise.subspan(d_z, d_z), d_z);
        hp.run(enc.h_spec, enc.h_params, x_next, noise.subspan(2 * d_z, d_z), d_z);

        mlp_forward(heads.g_spec, heads.g_params, g.z, ws_dg, out_dg);
        mlp_forward(heads.h_spec, heads.h_params, hp.z, ws_dh_next, out_dh_next);
        mlp_forward(heads.h_spec, heads.h_params, h.z, ws_dh_cur, out_dh_cur);

        const double s = cfg.shaping_sign == ShapingSign::airl_minus ? -1.0 : 1.0;
        Result r;
        r.f = out_dg[0] + (cfg.gamma * out_dh_next[0] + s * out_dh_cur[0]);
        r.kl = g.kl() + h.kl() + hp.kl();
        return r;
    }

    void backward(const EncoderParams& enc, const RewardHeads& heads, const VrbConfig& cfg,
                  double w_f, double w_kl, EstimatorGrads& acc) {
        const int d_z = enc.d_z;
        const double s = cfg.shaping_sign == ShapingSign::airl_minus ? -1.0 : 1.0;
        const double cot_dg = w_f;
        const double cot_dh_next = w_f * cfg.gamma;
        const double cot_dh_cur = w_f * s;

        std::vector<double> dz_g, dz_hp, dz_h;
        mlp_backward(heads.g_spec, heads.g_params, std::span(&cot_dg, 1), ws_dg,
                     acc.head_g, &dz_g);
        mlp_backward(heads.h_spec, heads.h_params, std::span(&cot_dh_next, 1),
                     ws_dh_next, acc.head_h, &dz_hp);
        mlp_backward(heads.h_spec, heads.h_params, std::span(&cot_dh_cur, 1),
                     ws_dh_cur, acc.head_h, &dz_h);

        const std::vector<double> raw_g = g.raw_grad(dz_g, w_kl, d_z);
        const std::vector<double> raw_h = h.raw_grad(dz_h, w_kl, d_z);
        const std::vector<double> raw_hp = hp.raw_grad(dz_hp, w_kl, d_z);
        mlp_backward(enc.g_spec, enc.g_params, raw_g, g.ws, acc.enc_g, nullptr);
        mlp_backward(enc.h_spec, enc.h_params, raw_h, h.ws, acc.enc_h, nullptr);
        mlp_backward(enc.h_spec, enc.h_params, raw_hp, hp.ws, acc.enc_h, nullptr);
    }
};

EstimatorDiagnostics evaluate(const EstimatorBatch& batch, const EncoderParams& enc,
                              const RewardHeads& heads, const VrbConfig& cfg,
                              const NoiseMatrix& noise, EstimatorGrads* grads, ExecMode mode) {
    batch.expert.validate();
    batch.policy.validate();
    enc.validate();
    heads.validate(enc.d_z);
    const std::size_t n_e = batch.expert.size();
    const std::size_t n_p = batch.policy.size();
    if (n_e == 0 || n_p == 0) {
        throw StateError("estimator batch needs non-empty expert and policy sides");
    }
    if (noise.row_width != 3 * enc.d_z ||
        noise.values.size() != (n_e + n_p) * noise.row_width) {
        throw ShapeError("noise matrix does not match batch and d_z");
    }

    std::vector<double> f_slots(n_e + n_p);
    std::vector<double> kl_slots(n_p);

    const std::size_t total = n_e + n_p;
    const std::size_t nb = block_count(total);
    std::vector<EstimatorGrads> block_grads;
    if (grads != nullptr) {
        block_grads.resize(nb);
        for (EstimatorGrads& g : block_grads) {
            g.enc_g.assign(enc.g_params.size(), 0.0);
            g.enc_h.assign(enc.h_params.size(), 0.0);
            g.head_g.assign(heads.g_params.size(), 0.0);
            g.head_h.assign(heads.h_params.size(), 0.0);
        }
    }

    const double w_f_expert = -1.0 / static_cast<double>(n_e);
    const double w_f_policy = 1.0 / static_cast<double>(n_p);
    const double w_kl_policy = cfg.phi / static_cast<double>(n_p);

    for_each_block(total, mode, [&](std::size_t begin, std::size_t end, std::size_t b) {
        TransitionEval eval;
        for (std::size_t i = begin; i < end; ++i) {
            const bool is_expert = i < n_e;
            const TransitionSide& side = is_expert ? batch.expert : batch.policy;
            const std::size_t j = is_expert ? i : i - n_e;
            const auto r = eval.forward(enc, heads, cfg, side.x[j], side.x_next[j],
                                        side.action[j], noise.row(i));
            f_slots[i] = r.f;
            if (!is_expert) kl_slots[j] = r.kl;
            if (grads != nullptr) {
                const double w_f = is_expert ? w_f_expert : w_f_policy;
                const double w_kl = is_expert ? 0.0 : w_kl_policy;
                eval.backward(enc, heads, cfg, w_f, w_kl, block_grads[b]);
            }
        }
    });

    if (grads != nullptr) {
        grads->enc_g.assign(enc.g_params.size(), 0.0);
        grads->enc_h.assign(enc.h_params.size(), 0.0);
        grads->head_g.assign(heads.g_params.size(), 0.0);
        grads->head_h.assign(heads.h_params.size(), 0.0);
        for (const EstimatorGrads& g : block_grads) {
            for (std::size_t i = 0; i < g.enc_g.size(); ++i) grads->enc_g[i] += g.enc_g[i];
            for (std::size_t i = 0; i < g.enc_h.size(); ++i) grads->enc_h[i] += g.enc_h[i];
            for (std::size_t i = 0; i < g.head_g.size(); ++i) grads->head_g[i] += g.head_g[i];
            for (std::size_t i = 0; i < g.head_h.size(); ++i) grads->head_h[i] += g.head_h[i];
        }
    }

    EstimatorDiagnostics diag;
    double sum_e = 0.0, sum_p = 0.0, sum_kl = 0.0;
    for (std::size_t i = 0; i < n_e; ++i) sum_e += f_slots[i];
    for (std::size_t i = 0; i < n_p; ++i) sum_p += f_slots[n_e + i];
    for (double k : kl_slots) sum_kl += k;
    diag.mean_expert_f = sum_e / static_cast<double>(n_e);
    diag.mean_policy_f = sum_p / static_cast<double>(n_p);
    diag.mean_policy_kl = sum_kl / static_cast<double>(n_p);
    diag.phi = cfg.phi;
    diag.loss = -(diag.mean_expert_f - diag.mean_policy_f -
                  cfg.phi * (diag.mean_policy_kl - cfg.i_c));
    diag.next_phi = std::max(0.0, cfg.phi + cfg.phi_step * (diag.mean_policy_kl - cfg.i_c));
    if (!std::isfinite(diag.loss)) {
        throw NumericError("estimator loss is not finite");
    }
    return diag;
}

} // namespace

double bottleneck_penalty(const EstimatorBatch& batch, const EncoderParams& enc,
                          const VrbConfig& cfg, ExecMode mode) {
    batch.policy.validate();
    enc.validate();
    const std::size_t n_p = batch.policy.size();
    if (n_p == 0) throw StateError("bottleneck_penalty needs a non-empty policy side");

    std::vector<double> kl_slots(n_p);
    for_each_block(n_p, mode, [&](std::size_t begin, std::size_t end, std::size_t) {
        HeadEval g, h, hp;
        std::vector<double> g_input;
        const std::vector<double> no_noise(enc.d_z, 0.0);
        for (std::size_t j = begin; j < end; ++j) {
            const TransitionSide& side = batch.policy;
            g_input.assign(side.x[j].begin(), side.x[j].end());
            g_input.insert(g_input.end(), side.action[j].begin(), side.action[j].end());
            g.run(enc.g_spec, enc.g_params, g_input, no_noise, enc.d_z);
            h.run(enc.h_spec, enc.h_params, side.x[j], no_noise, enc.d_z);
            hp.run(enc.h_spec, enc.h_params, side.x_next[j], no_noise, enc.d_z);
            kl_slots[j] = g.kl() + h.kl() + hp.kl();
        }
    });
    double sum = 0.0;
    for (double k : kl_slots) sum += k;
    return sum / static_cast<double>(n_p) - cfg.i_c;
}

EstimatorDiagnostics vrb_loss_with_noise(const EstimatorBatch& batch, const EncoderParams& enc,
                                         const RewardHeads& heads, const VrbConfig& cfg,
                                         const NoiseMatrix& noise, ExecMode mode) {
    return evaluate(batch, enc, heads, cfg, noise, nullptr, mode);
}

EstimatorDiagnostics vrb_loss(const EstimatorBatch& batch, const EncoderParams& enc,
                              const RewardHeads& heads, const VrbConfig& cfg, RngStream& rng,
                              ExecMode mode) {
    const NoiseMatrix noise =
        cfg.encoder_noise ? draw_noise(batch, enc.d_z, rng) : zero_noise(batch, enc.d_z);
    return vrb_loss_with_noise(batch, enc, heads, cfg, noise, mode);
}

EstimatorDiagnostics vrb_loss_grad(const EstimatorBatch& batch, const EncoderParams& enc,
                                   const RewardHeads& heads, const VrbConfig& cfg,
                                   const NoiseMatrix& noise, EstimatorGrads& grads,
                                   ExecMode mode) {
    return evaluate(batch, enc, heads, cfg, noise, &grads, mode);
}

double airl_loss(const EstimatorBatch& batch, const EncoderParams& enc, const RewardHeads& heads,
                 const VrbConfig& cfg, ExecMode mode) {
    VrbConfig flat = cfg;
    flat.phi = 0.0;
    flat.encoder_noise = false;
    const NoiseMatrix noise = zero_noise(batch, enc.d_z);
    return vrb_loss_with_noise(batch, enc, heads, flat, noise, mode).loss;
}

EstimatorOptimizer EstimatorOptimizer::make(const EstimatorModel& model, double lr) {
    EstimatorOptimizer opt;
    opt.enc_g = AdamState::for_params(model.enc.g_params.size(), lr);
    opt.enc_h = AdamState::for_params(model.enc.h_params.size(), lr);
    opt.head_g = AdamState::for_params(model.heads.g_params.size(), lr);
    opt.head_h = AdamState::for_params(model.heads.h_params.size(), lr);
    return opt;
}

EstimatorDiagnostics update_estimator(EstimatorOptimizer& opt, EstimatorModel& model,
                                      const EstimatorBatch& batch, VrbConfig& cfg,
                                      RngStream& noise_rng, bool use_airl, ExecMode mode) {
    VrbConfig effective = cfg;
    if (use_airl) {
        effective.phi = 0.0;
        effective.encoder_noise = false;
    }
    const NoiseMatrix noise = effective.encoder_noise
                                  ? draw_noise(batch, model.enc.d_z, noise_rng)
                                  : zero_noise(batch, model.enc.d_z);
    EstimatorGrads grads;
    const EstimatorDiagnostics diag =
        vrb_loss_grad(batch, model.enc, model.heads, effective, noise, grads, mode);
    adam_step(opt.enc_g, model.enc.g_params, grads.enc_g);
    adam_step(opt.enc_h, model.enc.h_params, grads.enc_h);
    adam_step(opt.head_g, model.heads.g_params, grads.head_g);
    adam_step(opt.head_h, model.heads.h_params, grads.head_h);
    if (cfg.adaptive_phi && !use_airl) cfg.phi = diag.next_phi;
    return diag;
}

ParamVector pack_estimator_params(const EstimatorModel& model) {
    ParamVector flat;
    flat.reserve(model.enc.g_params.size() + model.enc.h_params.size() +
                 model.heads.g_params.size() + model.heads.h_params.size());
    flat.insert(flat.end(), model.enc.g_params.begin(), model.enc.g_params.end());
    flat.insert(flat.end(), model.enc.h_params.begin(), model.enc.h_params.end());
    flat.insert(flat.end(), model.heads.g_params.begin(), model.heads.g_params.end());
    flat.insert(flat.end(), model.heads.h_params.begin(), model.heads.h_params.end());
    return flat;
}

void unpack_estimator_params(const ParamVector& flat, EstimatorModel& model) {
    const std::size_t total = model.enc.g_params.size() + model.enc.h_params.size() +
                              model.heads.g_params.size() + model.heads.h_params.size();
    if (flat.size() != total) {
        throw ShapeError("flat estimator parameter vector has length " +
                         std::to_string(flat.size()) + ", expected " + std::to_string(total));
    }
    auto it = flat.begin();
    auto take = [&](ParamVector& dst) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
        it += static_cast<std::ptrdiff_t>(dst.size());
    };
    take(model.enc.g_params);
    take(model.enc.h_params);
    take(model.heads.g_params);
    take(model.heads.h_params);
}

ParamVector pack_estimator_grads(const EstimatorGrads& grads) {
    ParamVector flat;
    flat.insert(flat.end(), grads.enc_g.begin(), grads.enc_g.end());
    flat.insert(flat.end(), grads.enc_h.begin(), grads.enc_h.end());
    flat.insert(flat.end(), grads.head_g.begin(), grads.head_g.end());
    flat.insert(flat.end(), grads.head_h.begin(), grads.head_h.end());
    return flat;
}

std::vector<double> mean_f_scores(const TransitionSide& side, const EncoderParams& enc,
                                  const RewardHeads& heads, double gamma, ShapingSign sign,
                                  ExecMode mode) {
    side.validate();
    VrbConfig cfg;
    cfg.gamma = gamma;
    cfg.shaping_sign = sign;
    std::vector<double> out(side.size());
    for_each_block(side.size(), mode, [&](std::size_t begin, std::size_t end, std::size_t) {
        TransitionEval eval;
        const std::vector<double> no_noise(3 * enc.d_z, 0.0);
        for (std::size_t j = begin; j < end; ++j) {
            out[j] = eval.forward(enc, heads, cfg, side.x[j], side.x_next[j], side.action[j],
                                  no_noise).f;
        }
    });
    return out;
}

} // namespace vrb
