#pragma once

#include <cstdint>

#include "vrb/policy_net.hpp"

namespace vrb {

struct PpoConfig {
    double gamma = 0.99;
    double lambda = 0.95;
    double epsilon_clip = 0.02;
    int epochs_per_batch = 4;
    int minibatch_size = 64;
    double value_coef = 0.5;
    bool normalize_advantages = true;
    double policy_lr = 1e-4;
    double value_lr = 1e-2;
    int act_threshold_max = 4; // greedy decoding keeps at most this many bits
};

// Aligned transition columns for PPO, in episode order. episode_start marks
// the first transition of each episode; terminal marks the last (its
// successor state bootstraps V = 0).
struct RolloutBatch {
    std::vector<StateVector> x;
    std::vector<StateVector> x_next;
    std::vector<std::vector<double>> action; // multi-hot
    std::vector<SysAction> action_indices;
    std::vector<double> log_pi_old;
    std::vector<double> value_pred;
    std::vector<double> reward;    // shaped reward r_hat
    std::vector<double> advantage; // filled by compute_gae
    std::vector<double> ret;       // discounted reward-to-go
    std::vector<std::uint8_t> episode_start;
    std::vector<std::uint8_t> terminal;
    std::uint64_t iteration_stamp = 0;

    std::size_t size() const { return x.size(); }
    void validate(bool need_advantages) const;
};

// Fills value predictions, advantages (backward recursion
// A_t = delta_t + gamma * lambda * A_{t+1} per episode) and discounted
// reward-to-go returns.
void compute_gae(RolloutBatch& batch, const ValueParams& val, const PpoConfig& cfg);

} // namespace vrb
