#include "vrb/ppo.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "vrb/errors.hpp"
#include "vrb/num_util.hpp"

namespace vrb {

namespace {

std::vector<double> normalized_advantages(const RolloutBatch& batch, bool enable) {
    std::vector<double> adv = batch.advantage;
    if (!enable || adv.size() < 2) return adv;
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(adv.size());
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= static_cast<double>(adv.size());
    const double denom = std::sqrt(var) + 1e-8;
    for (double& a : adv) a = (a - mean) / denom;
    return adv;
}

// Selected-branch value and d(term)/d(log pi) for one sample.
inline double clip_term(double lp, double lp_old, double adv, double eps, std::size_t index,
                        double* dlp, bool* clip_active) {
    const double ratio = std::exp(lp - lp_old);
    if (!std::isfinite(ratio)) {
        throw NumericError("non-finite probability ratio at transition " +
                           std::to_string(index));
    }
    const double lo = 1.0 - eps;
    const double hi = 1.0 + eps;
    const double clipped_ratio = ratio < lo ? lo : (ratio > hi ? hi : ratio);
    const double unclipped = ratio * adv;
    const double clipped = clipped_ratio * adv;
    if (clip_active != nullptr) *clip_active = std::abs(ratio - 1.0) > eps;
    if (unclipped <= clipped) {
        if (dlp != nullptr) *dlp = ratio * adv;
        return unclipped;
    }
    if (dlp != nullptr) *dlp = (ratio > lo && ratio < hi) ? ratio * adv : 0.0;
    return clipped;
}

} // namespace

double ppo_clip_loss(const PolicyParams& pol, const RolloutBatch& batch, const PpoConfig& cfg) {
    batch.validate(true);
    const std::vector<double> adv = normalized_advantages(batch, cfg.normalize_advantages);
    double sum = 0.0;
    for (std::size_t t = 0; t < batch.size(); ++t) {
        const double lp = action_log_prob(pol, batch.x[t], batch.action_indices[t]);
        sum += clip_term(lp, batch.log_pi_old[t], adv[t], cfg.epsilon_clip, t, nullptr, nullptr);
    }
    return -sum / static_cast<double>(batch.size());
}

double value_loss(const ValueParams& val, const RolloutBatch& batch) {
    batch.validate(true);
    double sum = 0.0;
    for (std::size_t t = 0; t < batch.size(); ++t) {
        const double err = state_value(val, batch.x[t]) - batch.ret[t];
        sum += err * err;
    }
    return sum / static_cast<double>(batch.size());
}

PolicyOptimizer PolicyOptimizer::make(const PolicyParams& pol, const ValueParams& val,
                                      const PpoConfig& cfg) {
    PolicyOptimizer opt;
    opt.policy = AdamState::for_params(pol.params.size(), cfg.policy_lr);
    opt.value = AdamState::for_params(val.params.size(), cfg.value_lr);
    return opt;
}

PolicyUpdateDiag update_policy(PolicyOptimizer& opt, PolicyParams& pol, ValueParams& val,
                               const RolloutBatch& batch, const PpoConfig& cfg,
                               RngStream& shuffle_rng, ExecMode mode) {
    batch.validate(true);
    const std::size_t n = batch.size();
    const std::vector<double> adv = normalized_advantages(batch, cfg.normalize_advantages);

    const std::size_t mb =
        cfg.minibatch_size > 0 ? static_cast<std::size_t>(cfg.minibatch_size) : n;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    ParamVector pol_grad(pol.params.size());
    ParamVector val_grad(val.params.size());

    for (int epoch = 0; epoch < cfg.epochs_per_batch; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += mb) {
            const std::size_t count = std::min(mb, n - start);
            const double scale = 1.0 / static_cast<double>(count);

            const std::size_t nb = block_count(count);
            std::vector<ParamVector> pol_blocks(nb), val_blocks(nb);
            for (std::size_t b = 0; b < nb; ++b) {
                pol_blocks[b].assign(pol.params.size(), 0.0);
                val_blocks[b].assign(val.params.size(), 0.0);
            }

            for_each_block(count, mode, [&](std::size_t begin, std::size_t end, std::size_t b) {
                MlpWorkspace ws_pol, ws_val;
                std::vector<double> logits, vout;
                std::vector<double> dlogits;
                for (std::size_t k = begin; k < end; ++k) {
                    const std::size_t t = order[start + k];
                    mlp_forward(pol.spec, pol.params, batch.x[t], ws_pol, logits);
                    double lp = 0.0;
                    for (std::size_t i = 0; i < logits.size(); ++i) {
                        lp += batch.action[t][i] != 0.0 ? num::log_bernoulli_on(logits[i])
                                                        : num::log_bernoulli_off(logits[i]);
                    }
                    double dlp = 0.0;
                    clip_term(lp, batch.log_pi_old[t], adv[t], cfg.epsilon_clip, t, &dlp,
                              nullptr);
                    // minimization: loss contribution is -term / count
                    const double w = -dlp * scale;
                    dlogits.resize(logits.size());
                    for (std::size_t i = 0; i < logits.size(); ++i) {
                        dlogits[i] = w * (batch.action[t][i] - num::sigmoid(logits[i]));
                    }
                    mlp_backward(pol.spec, pol.params, dlogits, ws_pol, pol_blocks[b], nullptr);

                    mlp_forward(val.spec, val.params, batch.x[t], ws_val, vout);
                    const double verr = vout[0] - batch.ret[t];
                    const double dv = cfg.value_coef * 2.0 * verr * scale;
                    mlp_backward(val.spec, val.params, std::span(&dv, 1), ws_val, val_blocks[b],
                                 nullptr);
                }
            });

            std::fill(pol_grad.begin(), pol_grad.end(), 0.0);
            std::fill(val_grad.begin(), val_grad.end(), 0.0);
            for (std::size_t b = 0; b < nb; ++b) {
                for (std::size_t i = 0; i < pol_grad.size(); ++i) pol_grad[i] += pol_blocks[b][i];
                for (std::size_t i = 0; i < val_grad.size(); ++i) val_grad[i] += val_blocks[b][i];
            }
            adam_step(opt.policy, pol.params, pol_grad);
            adam_step(opt.value, val.params, val_grad);
        }
    }

    PolicyUpdateDiag diag;
    double surrogate_sum = 0.0, vsum = 0.0, ratio_sum = 0.0, gap_sum = 0.0;
    int clipped = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double lp = action_log_prob(pol, batch.x[t], batch.action_indices[t]);
        bool active = false;
        surrogate_sum +=
            clip_term(lp, batch.log_pi_old[t], adv[t], cfg.epsilon_clip, t, nullptr, &active);
        if (active) ++clipped;
        const double ratio = std::exp(lp - batch.log_pi_old[t]);
        ratio_sum += ratio;
        gap_sum += std::abs(ratio - 1.0);
        const double verr = state_value(val, batch.x[t]) - batch.ret[t];
        vsum += verr * verr;
    }
    diag.policy_loss = -surrogate_sum / static_cast<double>(n);
    diag.value_loss = vsum / static_cast<double>(n);
    diag.clip_fraction = static_cast<double>(clipped) / static_cast<double>(n);
    diag.mean_ratio = ratio_sum / static_cast<double>(n);
    diag.mean_abs_ratio_gap = gap_sum / static_cast<double>(n);
    return diag;
}

} // namespace vrb
