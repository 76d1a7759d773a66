#include "vrb/policy_net.hpp"

#include <algorithm>
#include <cmath>

#include "vrb/errors.hpp"
#include "vrb/num_util.hpp"

namespace vrb {

namespace {

MlpSpec make_spec(int in, const std::vector<int>& hidden, int out) {
    MlpSpec spec;
    spec.layer_widths.push_back(in);
    for (int h : hidden) spec.layer_widths.push_back(h);
    spec.layer_widths.push_back(out);
    spec.validate();
    return spec;
}

} // namespace

PolicyParams PolicyParams::init(int state_dim, int act_dim, const std::vector<int>& hidden,
                                RngStream& rng) {
    PolicyParams p;
    p.spec = make_spec(state_dim, hidden, act_dim);
    p.params = init_params(p.spec, rng);
    return p;
}

ValueParams ValueParams::init(int state_dim, const std::vector<int>& hidden, RngStream& rng) {
    ValueParams v;
    v.spec = make_spec(state_dim, hidden, 1);
    v.params = init_params(v.spec, rng);
    return v;
}

std::vector<double> policy_logits(const PolicyParams& pol, const StateVector& x) {
    return mlp_forward(pol.spec, pol.params, x);
}

double state_value(const ValueParams& val, const StateVector& x) {
    return mlp_forward(val.spec, val.params, x)[0];
}

SampledAction sample_action(const PolicyParams& pol, const StateVector& x, RngStream& rng) {
    const std::vector<double> logits = policy_logits(pol, x);
    SampledAction out;
    double log_zero = 0.0; // log P(all bits zero)
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double p = num::sigmoid(logits[i]);
        const bool bit = rng.uniform01() < p;
        if (bit) {
            out.action.add(static_cast<int>(i));
            out.log_pi += num::log_bernoulli_on(logits[i]);
        } else {
            out.log_pi += num::log_bernoulli_off(logits[i]);
        }
        log_zero += num::log_bernoulli_off(logits[i]);
    }
    if (out.action.empty()) {
        const std::size_t best =
            std::max_element(logits.begin(), logits.end()) - logits.begin();
        out.action.add(static_cast<int>(best));
        out.coerced = true;
        // mass of "best alone" plus the coerced all-zero event
        const double log_single = log_zero - num::log_bernoulli_off(logits[best]) + num::log_bernoulli_on(logits[best]);
        const double hi = std::max(log_single, log_zero);
        out.log_pi = hi + std::log(std::exp(log_single - hi) + std::exp(log_zero - hi));
    }
    return out;
}

double action_log_prob(const PolicyParams& pol, const StateVector& x, const SysAction& a) {
    const std::vector<double> logits = policy_logits(pol, x);
    double lp = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        lp += a.contains(static_cast<int>(i)) ? num::log_bernoulli_on(logits[i]) : num::log_bernoulli_off(logits[i]);
    }
    return lp;
}

SysAction greedy_action(const PolicyParams& pol, const StateVector& x, int max_acts) {
    const std::vector<double> logits = policy_logits(pol, x);
    std::vector<std::size_t> on;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (logits[i] > 0.0) on.push_back(i);
    }
    if (on.empty()) {
        on.push_back(std::max_element(logits.begin(), logits.end()) - logits.begin());
    }
    if (max_acts > 0 && static_cast<int>(on.size()) > max_acts) {
        std::stable_sort(on.begin(), on.end(),
                         [&](std::size_t a, std::size_t b) { return logits[a] > logits[b]; });
        on.resize(max_acts);
    }
    SysAction act;
    for (std::size_t i : on) act.add(static_cast<int>(i));
    return act;
}

} // namespace vrb
