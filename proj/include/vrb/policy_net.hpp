#pragma once

#include "vrb/acts.hpp"
#include "vrb/dialog_state.hpp"
#include "vrb/mlp.hpp"

namespace vrb {

// Dialog policy: one logit per system-act vocabulary entry, each bit an
// independent Bernoulli.
struct PolicyParams {
    MlpSpec spec;
    ParamVector params;

    static PolicyParams init(int state_dim, int act_dim, const std::vector<int>& hidden,
                             RngStream& rng);
};

struct ValueParams {
    MlpSpec spec;
    ParamVector params;

    static ValueParams init(int state_dim, const std::vector<int>& hidden, RngStream& rng);
};

std::vector<double> policy_logits(const PolicyParams& pol, const StateVector& x);
double state_value(const ValueParams& val, const StateVector& x);

struct SampledAction {
    SysAction action;
    double log_pi = 0.0;
    bool coerced = false;
};

// Draws every bit independently. An all-zero draw is coerced to the single
// highest-probability act (a turn must say something); its stored log_pi is
// the mass of that outcome under the coerced sampling rule,
// log(P(act alone) + P(all zeros)).
SampledAction sample_action(const PolicyParams& pol, const StateVector& x, RngStream& rng);

// Exact log-mass of the action under the plain multi-Bernoulli head
// (pre-coercion mass).
double action_log_prob(const PolicyParams& pol, const StateVector& x, const SysAction& a);

// Threshold 0.5 per bit, all-zero coerced to the argmax bit; at most
// max_acts bits (highest logits win). Used for evaluation rollouts.
SysAction greedy_action(const PolicyParams& pol, const StateVector& x, int max_acts);

} // namespace vrb
