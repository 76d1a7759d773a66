#pragma once

#include "vrb/adam.hpp"
#include "vrb/gae.hpp"
#include "vrb/parallel.hpp"
#include "vrb/rng.hpp"

namespace vrb {

// Negated clipped surrogate, a minimization objective:
//   -mean_t min(xi_t * A_t, clip(xi_t, 1 - eps, 1 + eps) * A_t).
// Advantages are normalized to zero mean / unit variance over the given
// batch first when cfg.normalize_advantages is set.
double ppo_clip_loss(const PolicyParams& pol, const RolloutBatch& batch, const PpoConfig& cfg);

// Mean squared error between V(x_t) and the discounted reward-to-go.
double value_loss(const ValueParams& val, const RolloutBatch& batch);

struct PolicyOptimizer {
    AdamState policy;
    AdamState value;

    static PolicyOptimizer make(const PolicyParams& pol, const ValueParams& val,
                                const PpoConfig& cfg);
};

struct PolicyUpdateDiag {
    double policy_loss = 0.0;  // clipped surrogate after the update
    double value_loss = 0.0;   // after the update
    double clip_fraction = 0.0;
    double mean_ratio = 0.0;
    double mean_abs_ratio_gap = 0.0; // mean |xi - 1|
};

// epochs_per_batch passes of minibatched Adam on
// L_clip + value_coef * L_value. log_pi_old stays fixed for the whole batch;
// advantages are normalized once over the full batch.
PolicyUpdateDiag update_policy(PolicyOptimizer& opt, PolicyParams& pol, ValueParams& val,
                               const RolloutBatch& batch, const PpoConfig& cfg,
                               RngStream& shuffle_rng, ExecMode mode = ExecMode::serial);

} // namespace vrb
