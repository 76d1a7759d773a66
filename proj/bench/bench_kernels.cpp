// Serial-vs-OpenMP timings for the data-parallel kernels. Both paths produce
// bit-identical results (see the unit tests); this target measures the win.

#include <benchmark/benchmark.h>

#include "vrb/estimator.hpp"
#include "vrb/ppo.hpp"
#include "vrb/rollout.hpp"

using namespace vrb;

namespace {

struct EstimatorSetup {
    EstimatorBatch batch;
    EstimatorModel model;
    NoiseMatrix noise;
    VrbConfig cfg;

    EstimatorSetup() {
        const int state_dim = 128;
        const int act_dim = 63;
        RngStream rng(1, 0);
        auto fill = [&](TransitionSide& side, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) {
                StateVector x(state_dim), xn(state_dim);
                for (double& v : x) v = rng.index(2);
                for (double& v : xn) v = rng.index(2);
                std::vector<double> a(act_dim, 0.0);
                a[rng.index(act_dim)] = 1.0;
                side.x.push_back(std::move(x));
                side.x_next.push_back(std::move(xn));
                side.action.push_back(std::move(a));
                side.log_pi.push_back(-1.0);
            }
        };
        fill(batch.expert, 128);
        fill(batch.policy, 128);
        model.enc = EncoderParams::init(state_dim, act_dim, 16, 64, rng);
        model.heads = RewardHeads::init(16, 32, rng);
        noise = draw_noise(batch, 16, rng);
    }
};

EstimatorSetup& estimator_setup() {
    static EstimatorSetup s;
    return s;
}

void BM_estimator_grad(benchmark::State& state) {
    EstimatorSetup& s = estimator_setup();
    const ExecMode mode = state.range(0) ? ExecMode::parallel : ExecMode::serial;
    EstimatorGrads grads;
    for (auto _ : state) {
        const EstimatorDiagnostics diag =
            vrb_loss_grad(s.batch, s.model.enc, s.model.heads, s.cfg, s.noise, grads, mode);
        benchmark::DoNotOptimize(diag.loss);
    }
}

void BM_mean_f_scores(benchmark::State& state) {
    EstimatorSetup& s = estimator_setup();
    const ExecMode mode = state.range(0) ? ExecMode::parallel : ExecMode::serial;
    for (auto _ : state) {
        const std::vector<double> f = mean_f_scores(s.batch.policy, s.model.enc, s.model.heads,
                                                    s.cfg.gamma, s.cfg.shaping_sign, mode);
        benchmark::DoNotOptimize(f.data());
    }
}

struct PolicySetup {
    PolicyParams pol;
    ValueParams val;
    RolloutBatch batch;
    PpoConfig cfg;

    PolicySetup() {
        const int state_dim = 128;
        const int act_dim = 63;
        RngStream rng(2, 0);
        pol = PolicyParams::init(state_dim, act_dim, {64, 64}, rng);
        val = ValueParams::init(state_dim, {64, 64}, rng);
        for (int t = 0; t < 128; ++t) {
            StateVector x(state_dim), xn(state_dim);
            for (double& v : x) v = rng.index(2);
            for (double& v : xn) v = rng.index(2);
            SysAction a;
            a.add(static_cast<int>(rng.index(act_dim)));
            std::vector<double> mh(act_dim, 0.0);
            for (int idx : a.indices) mh[idx] = 1.0;
            batch.x.push_back(std::move(x));
            batch.x_next.push_back(std::move(xn));
            batch.action.push_back(std::move(mh));
            batch.action_indices.push_back(a);
            batch.log_pi_old.push_back(-2.0);
            batch.reward.push_back(rng.uniform(-1.0, 1.0));
            batch.episode_start.push_back(t % 16 == 0 ? 1 : 0);
            batch.terminal.push_back(t % 16 == 15 ? 1 : 0);
        }
        compute_gae(batch, val, cfg);
    }
};

PolicySetup& policy_setup() {
    static PolicySetup s;
    return s;
}

void BM_policy_update(benchmark::State& state) {
    const ExecMode mode = state.range(0) ? ExecMode::parallel : ExecMode::serial;
    for (auto _ : state) {
        state.PauseTiming();
        PolicySetup fresh = policy_setup(); // updates mutate parameters
        PolicyOptimizer opt = PolicyOptimizer::make(fresh.pol, fresh.val, fresh.cfg);
        RngStream shuffle(3, 0);
        state.ResumeTiming();
        const PolicyUpdateDiag diag =
            update_policy(opt, fresh.pol, fresh.val, fresh.batch, fresh.cfg, shuffle, mode);
        benchmark::DoNotOptimize(diag.policy_loss);
    }
}

void BM_rollout_collection(benchmark::State& state) {
    const ExecMode mode = state.range(0) ? ExecMode::parallel : ExecMode::serial;
    static auto env = EnvBundle::toy();
    static RngStream prng(4, 0);
    static const StateLayout layout(env->vocab());
    static const PolicyParams pol =
        PolicyParams::init(layout.total(), env->vocab().sys_size(), {64, 64}, prng);
    for (auto _ : state) {
        const CollectedRollouts r = collect_training_rollouts(*env, pol, 16, 5, 0, mode);
        benchmark::DoNotOptimize(r.batch.size());
    }
}

} // namespace

BENCHMARK(BM_estimator_grad)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mean_f_scores)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_policy_update)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rollout_collection)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
