#include "vrb/gae.hpp"

#include <string>

#include "vrb/errors.hpp"

namespace vrb {

void RolloutBatch::validate(bool need_advantages) const {
    const std::size_t n = x.size();
    if (x_next.size() != n || action.size() != n || action_indices.size() != n ||
        log_pi_old.size() != n || reward.size() != n || episode_start.size() != n ||
        terminal.size() != n) {
        throw ShapeError("rollout batch columns are not aligned");
    }
    if (n == 0) throw StateError("rollout batch is empty");
    if (!episode_start[0]) {
        throw StateError("rollout batch must start at an episode boundary");
    }
    for (std::size_t t = 0; t + 1 < n; ++t) {
        if (terminal[t] != (episode_start[t + 1] ? 1 : 0)) {
            throw StateError("episode flags disagree at transition " + std::to_string(t));
        }
    }
    if (need_advantages && (advantage.size() != n || ret.size() != n || value_pred.size() != n)) {
        throw StateError("advantages/returns not computed for this batch");
    }
}

void compute_gae(RolloutBatch& batch, const ValueParams& val, const PpoConfig& cfg) {
    batch.validate(false);
    const std::size_t n = batch.size();
    batch.value_pred.resize(n);
    batch.advantage.assign(n, 0.0);
    batch.ret.assign(n, 0.0);

    std::vector<double> value_next(n);
    for (std::size_t t = 0; t < n; ++t) {
        batch.value_pred[t] = state_value(val, batch.x[t]);
        value_next[t] = batch.terminal[t] ? 0.0 : state_value(val, batch.x_next[t]);
    }

    double adv = 0.0;
    double rtg = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        if (batch.terminal[t]) {
            adv = 0.0;
            rtg = 0.0;
        }
        const double delta =
            batch.reward[t] + cfg.gamma * value_next[t] - batch.value_pred[t];
        adv = delta + cfg.gamma * cfg.lambda * adv;
        rtg = batch.reward[t] + cfg.gamma * rtg;
        batch.advantage[t] = adv;
        batch.ret[t] = rtg;
    }
}

} // namespace vrb
