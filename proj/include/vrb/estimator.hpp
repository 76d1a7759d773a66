#pragma once

#include <cstdint>

#include "vrb/adam.hpp"
#include "vrb/dialog_state.hpp"
#include "vrb/parallel.hpp"
#include "vrb/reward_heads.hpp"

namespace vrb {

// Aligned transition columns for one side of the adversarial objective.
struct TransitionSide {
    std::vector<StateVector> x;
    std::vector<StateVector> x_next;
    std::vector<std::vector<double>> action; // multi-hot
    std::vector<double> log_pi;

    std::size_t size() const { return x.size(); }
    void validate() const;
};

struct EstimatorBatch {
    TransitionSide expert;
    TransitionSide policy;
    std::uint64_t iteration_stamp = 0;
};

struct EstimatorModel {
    EncoderParams enc;
    RewardHeads heads;
};

struct EstimatorGrads {
    ParamVector enc_g, enc_h, head_g, head_h;

    void resize_like(const EstimatorModel& model);
    void zero();
};

struct EstimatorDiagnostics {
    double loss = 0.0;
    double mean_expert_f = 0.0;
    double mean_policy_f = 0.0;
    double mean_policy_kl = 0.0;
    double phi = 0.0;
    double next_phi = 0.0; // dual-ascent value; applied only when adaptive
};

// Standard-normal draws for the whole batch, expert side first; one row of
// 3 * d_z values per transition. Freezing the noise makes the loss a
// deterministic function of the parameters (finite differences rely on it).
struct NoiseMatrix {
    std::vector<double> values;
    int row_width = 0;

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * row_width, static_cast<std::size_t>(row_width)};
    }
};

NoiseMatrix draw_noise(const EstimatorBatch& batch, int d_z, RngStream& rng);
NoiseMatrix zero_noise(const EstimatorBatch& batch, int d_z);

// Mean-over-policy-samples of the summed three-head KL to N(0, I), minus the
// bound i_c. The multiplier phi is applied by vrb_loss.
double bottleneck_penalty(const EstimatorBatch& batch, const EncoderParams& enc,
                          const VrbConfig& cfg, ExecMode mode = ExecMode::serial);

// Minimization objective
//   L = -( mean_E f - mean_pi f - phi * (mean_pi KL - i_c) ).
EstimatorDiagnostics vrb_loss(const EstimatorBatch& batch, const EncoderParams& enc,
                              const RewardHeads& heads, const VrbConfig& cfg, RngStream& rng,
                              ExecMode mode = ExecMode::serial);
EstimatorDiagnostics vrb_loss_with_noise(const EstimatorBatch& batch, const EncoderParams& enc,
                                         const RewardHeads& heads, const VrbConfig& cfg,
                                         const NoiseMatrix& noise,
                                         ExecMode mode = ExecMode::serial);
// Also accumulates gradients for all four parameter blocks.
EstimatorDiagnostics vrb_loss_grad(const EstimatorBatch& batch, const EncoderParams& enc,
                                   const RewardHeads& heads, const VrbConfig& cfg,
                                   const NoiseMatrix& noise, EstimatorGrads& grads,
                                   ExecMode mode = ExecMode::serial);

// Bottleneck-free objective: same pipeline with phi = 0 and deterministic
// (mean) encoding.
double airl_loss(const EstimatorBatch& batch, const EncoderParams& enc, const RewardHeads& heads,
                 const VrbConfig& cfg, ExecMode mode = ExecMode::serial);

struct EstimatorOptimizer {
    AdamState enc_g, enc_h, head_g, head_h;

    static EstimatorOptimizer make(const EstimatorModel& model, double lr);
};

// One Adam step on every estimator parameter block. use_airl switches to the
// bottleneck-free objective; cfg.phi is dual-updated in place when
// cfg.adaptive_phi is set.
EstimatorDiagnostics update_estimator(EstimatorOptimizer& opt, EstimatorModel& model,
                                      const EstimatorBatch& batch, VrbConfig& cfg,
                                      RngStream& noise_rng, bool use_airl,
                                      ExecMode mode = ExecMode::serial);

// Flat views over all four estimator parameter blocks, in the order
// enc_g | enc_h | head_g | head_h; used by finite-difference checks.
ParamVector pack_estimator_params(const EstimatorModel& model);
void unpack_estimator_params(const ParamVector& flat, EstimatorModel& model);
ParamVector pack_estimator_grads(const EstimatorGrads& grads);

// f with mean encoding per transition; the reward-estimation pass.
std::vector<double> mean_f_scores(const TransitionSide& side, const EncoderParams& enc,
                                  const RewardHeads& heads, double gamma, ShapingSign sign,
                                  ExecMode mode = ExecMode::serial);

} // namespace vrb
