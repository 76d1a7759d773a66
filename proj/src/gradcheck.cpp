#include "vrb/gradcheck.hpp"

#include <cmath>

#include "vrb/estimator.hpp"
#include "vrb/finite_diff.hpp"
#include "vrb/ppo.hpp"

namespace vrb {

namespace {

double rel_err(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / scale;
}

double max_rel_err(const ParamVector& a, const ParamVector& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_err(a[i], b[i]));
    return worst;
}

// Smallest |pre-activation| over a forward pass; instances too close to a
// relu kink are resampled so central differences stay valid.
double preact_margin(const MlpSpec& spec, const ParamVector& params,
                     std::span<const double> input) {
    MlpWorkspace ws;
    std::vector<double> out;
    mlp_forward(spec, params, input, ws, out);
    double margin = 1e300;
    for (std::size_t l = 0; l + 1 < ws.preacts.size(); ++l) { // hidden layers only
        for (double p : ws.preacts[l]) margin = std::min(margin, std::abs(p));
    }
    return margin;
}

std::vector<double> random_vector(RngStream& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

struct VrbInstance {
    EstimatorModel model;
    EstimatorBatch batch;
    NoiseMatrix noise;
    VrbConfig cfg;
};

VrbInstance make_vrb_instance(RngStream& rng, bool with_noise, double margin) {
    const int state_dim = 5;
    const int act_dim = 3;
    const int d_z = 2;
    for (;;) {
        VrbInstance inst;
        inst.model.enc = EncoderParams::init(state_dim, act_dim, d_z, 4, rng);
        inst.model.heads = RewardHeads::init(d_z, 4, rng);
        inst.cfg.gamma = 0.99;
        inst.cfg.phi = rng.uniform(0.0, 0.01);
        inst.cfg.i_c = 0.5;
        inst.cfg.encoder_noise = with_noise;

        auto fill = [&](TransitionSide& side, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) {
                side.x.push_back(random_vector(rng, state_dim, -1.0, 1.0));
                side.x_next.push_back(random_vector(rng, state_dim, -1.0, 1.0));
                std::vector<double> a(act_dim, 0.0);
                a[rng.index(act_dim)] = 1.0;
                side.action.push_back(std::move(a));
                side.log_pi.push_back(rng.uniform(-2.0, 0.0));
            }
        };
        fill(inst.batch.expert, 3);
        fill(inst.batch.policy, 3);
        inst.noise = with_noise ? draw_noise(inst.batch, d_z, rng)
                                : zero_noise(inst.batch, d_z);

        // kink margin probe over every network evaluation in the pipeline
        double m = 1e300;
        auto probe_side = [&](const TransitionSide& side, std::size_t noise_base) {
            for (std::size_t i = 0; i < side.size(); ++i) {
                std::vector<double> g_in = side.x[i];
                g_in.insert(g_in.end(), side.action[i].begin(), side.action[i].end());
                m = std::min(m, preact_margin(inst.model.enc.g_spec, inst.model.enc.g_params, g_in));
                m = std::min(m, preact_margin(inst.model.enc.h_spec, inst.model.enc.h_params, side.x[i]));
                m = std::min(m, preact_margin(inst.model.enc.h_spec, inst.model.enc.h_params, side.x_next[i]));
                const LatentTriple lat = encode_with_noise(
                    inst.model.enc, side.x[i], side.x_next[i], side.action[i],
                    inst.noise.row(noise_base + i));
                m = std::min(m, preact_margin(inst.model.heads.g_spec, inst.model.heads.g_params, lat.z_g));
                m = std::min(m, preact_margin(inst.model.heads.h_spec, inst.model.heads.h_params, lat.z_h));
                m = std::min(m, preact_margin(inst.model.heads.h_spec, inst.model.heads.h_params, lat.z_hp));
            }
        };
        probe_side(inst.batch.expert, 0);
        probe_side(inst.batch.policy, inst.batch.expert.size());
        if (m > margin) return inst;
    }
}

double check_vrb_family(RngStream& rng, bool airl_mode, int instances, double step) {
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        VrbInstance inst = make_vrb_instance(rng, !airl_mode, 50.0 * step);
        VrbConfig cfg = inst.cfg;
        if (airl_mode) {
            cfg.phi = 0.0;
            cfg.encoder_noise = false;
        }
        EstimatorGrads grads;
        vrb_loss_grad(inst.batch, inst.model.enc, inst.model.heads, cfg, inst.noise, grads);
        const ParamVector analytic = pack_estimator_grads(grads);

        EstimatorModel scratch = inst.model;
        const ParamVector p0 = pack_estimator_params(scratch);
        const ParamVector fd = finite_diff_grad(
            [&](const ParamVector& p) {
                unpack_estimator_params(p, scratch);
                return vrb_loss_with_noise(inst.batch, scratch.enc, scratch.heads, cfg,
                                           inst.noise)
                    .loss;
            },
            p0, step);
        worst = std::max(worst, max_rel_err(analytic, fd));
    }
    return worst;
}

double check_mlp_family(RngStream& rng, int instances, double step) {
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        MlpSpec spec{{3, 4, 2}};
        ParamVector params;
        std::vector<double> input;
        for (;;) {
            params = init_params(spec, rng);
            input = random_vector(rng, 3, -1.0, 1.0);
            if (preact_margin(spec, params, input) > 50.0 * step) break;
        }
        const std::vector<double> cot = random_vector(rng, 2, -1.0, 1.0);
        const auto [param_grad, input_grad] = mlp_backward(spec, params, input, cot);
        const ParamVector fd = finite_diff_grad(
            [&](const ParamVector& p) {
                const std::vector<double> out = mlp_forward(spec, p, input);
                return out[0] * cot[0] + out[1] * cot[1];
            },
            params, step);
        worst = std::max(worst, max_rel_err(param_grad, fd));

        ParamVector in_as_params = input;
        const ParamVector fd_in = finite_diff_grad(
            [&](const ParamVector& p) {
                const std::vector<double> out = mlp_forward(spec, params, p);
                return out[0] * cot[0] + out[1] * cot[1];
            },
            in_as_params, step);
        worst = std::max(worst, max_rel_err(input_grad, fd_in));
    }
    return worst;
}

struct PpoInstance {
    PolicyParams pol;
    ValueParams val;
    RolloutBatch batch;
};

PpoInstance make_ppo_instance(RngStream& rng, double eps, double margin) {
    const int state_dim = 5;
    const int act_dim = 4;
    for (;;) {
        PpoInstance inst;
        inst.pol = PolicyParams::init(state_dim, act_dim, {6}, rng);
        inst.val = ValueParams::init(state_dim, {6}, rng);
        const std::size_t n = 6;
        bool ok = true;
        for (std::size_t t = 0; t < n; ++t) {
            StateVector x = random_vector(rng, state_dim, -1.0, 1.0);
            if (preact_margin(inst.pol.spec, inst.pol.params, x) < margin ||
                preact_margin(inst.val.spec, inst.val.params, x) < margin) {
                ok = false;
                break;
            }
            SysAction a;
            a.add(static_cast<int>(rng.index(act_dim)));
            if (rng.uniform01() < 0.5) a.add(static_cast<int>(rng.index(act_dim)));
            const double lp = action_log_prob(inst.pol, x, a);
            // keep the ratio away from the clip corners
            double delta = 0.0;
            bool found = false;
            for (int tries = 0; tries < 64 && !found; ++tries) {
                delta = rng.uniform(-0.06, 0.06);
                const double ratio = std::exp(delta);
                found = std::abs(ratio - (1.0 - eps)) > 2e-3 &&
                        std::abs(ratio - (1.0 + eps)) > 2e-3;
            }
            if (!found) {
                ok = false;
                break;
            }
            inst.batch.x.push_back(x);
            inst.batch.x_next.push_back(random_vector(rng, state_dim, -1.0, 1.0));
            std::vector<double> multihot(act_dim, 0.0);
            for (int idx : a.indices) multihot[idx] = 1.0;
            inst.batch.action.push_back(std::move(multihot));
            inst.batch.action_indices.push_back(a);
            inst.batch.log_pi_old.push_back(lp - delta);
            inst.batch.reward.push_back(rng.uniform(-1.0, 1.0));
            inst.batch.episode_start.push_back(t == 0 ? 1 : 0);
            inst.batch.terminal.push_back(t + 1 == n ? 1 : 0);
            inst.batch.value_pred.push_back(0.0);
            inst.batch.advantage.push_back(rng.uniform(-1.0, 1.0));
            inst.batch.ret.push_back(rng.uniform(-1.0, 1.0));
        }
        if (ok) return inst;
    }
}

double check_ppo_family(RngStream& rng, int instances, double step) {
    PpoConfig cfg;
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        PpoInstance inst = make_ppo_instance(rng, cfg.epsilon_clip, 50.0 * step);
        const ParamVector fd = finite_diff_grad(
            [&](const ParamVector& p) {
                PolicyParams pol = inst.pol;
                pol.params = p;
                return ppo_clip_loss(pol, inst.batch, cfg);
            },
            inst.pol.params, step);

        // analytic gradient through a zero-learning-rate update pass
        PpoConfig probe = cfg;
        probe.epochs_per_batch = 1;
        probe.minibatch_size = static_cast<int>(inst.batch.size());
        probe.value_coef = 0.0;
        PolicyParams pol = inst.pol;
        ValueParams val = inst.val;
        PolicyOptimizer opt = PolicyOptimizer::make(pol, val, probe);
        opt.policy.learning_rate = 0.0;
        opt.value.learning_rate = 0.0;
        RngStream shuffle(0, 0);
        update_policy(opt, pol, val, inst.batch, probe, shuffle);
        ParamVector analytic(pol.params.size(), 0.0);
        // recover the gradient from Adam's first moment: after one step from
        // zero state, m = (1 - beta1) * g
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            analytic[i] = opt.policy.first_moment[i] / (1.0 - opt.policy.beta1);
        }
        worst = std::max(worst, max_rel_err(analytic, fd));
    }
    return worst;
}

double check_value_family(RngStream& rng, int instances, double step) {
    PpoConfig cfg;
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        PpoInstance inst = make_ppo_instance(rng, cfg.epsilon_clip, 50.0 * step);
        const ParamVector fd = finite_diff_grad(
            [&](const ParamVector& p) {
                ValueParams val = inst.val;
                val.params = p;
                return value_loss(val, inst.batch);
            },
            inst.val.params, step);

        PpoConfig probe = cfg;
        probe.epochs_per_batch = 1;
        probe.minibatch_size = static_cast<int>(inst.batch.size());
        probe.value_coef = 1.0;
        PolicyParams pol = inst.pol;
        ValueParams val = inst.val;
        PolicyOptimizer opt = PolicyOptimizer::make(pol, val, probe);
        opt.policy.learning_rate = 0.0;
        opt.value.learning_rate = 0.0;
        RngStream shuffle(0, 0);
        update_policy(opt, pol, val, inst.batch, probe, shuffle);
        ParamVector analytic(val.params.size(), 0.0);
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            analytic[i] = opt.value.first_moment[i] / (1.0 - opt.value.beta1);
        }
        worst = std::max(worst, max_rel_err(analytic, fd));
    }
    return worst;
}

} // namespace

GradCheckReport run_gradcheck(std::uint64_t seed, int instances_per_family, double fd_step) {
    GradCheckReport rep;
    RngStream rng(seed, 0x6d0c);
    auto add = [&](const std::string& name, double err) {
        rep.families.push_back(GradCheckFamily{name, instances_per_family, err});
        rep.max_rel_err = std::max(rep.max_rel_err, err);
        rep.instances += instances_per_family;
    };
    add("mlp_backward", check_mlp_family(rng, instances_per_family, fd_step));
    add("vrb_loss", check_vrb_family(rng, false, instances_per_family, fd_step));
    add("airl_loss", check_vrb_family(rng, true, instances_per_family, fd_step));
    add("ppo_clip_loss", check_ppo_family(rng, instances_per_family, fd_step));
    add("value_loss", check_value_family(rng, instances_per_family, fd_step));
    return rep;
}

} // namespace vrb
