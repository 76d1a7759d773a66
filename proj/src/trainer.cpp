#include "vrb/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <numeric>

#include "vrb/errors.hpp"
#include "vrb/log.hpp"
#include "vrb/num_util.hpp"

namespace vrb {

namespace {

constexpr std::uint64_t kKindInit = 0x01;
constexpr std::uint64_t kKindExpert = 0x02;
constexpr std::uint64_t kKindNoise = 0x03;
constexpr std::uint64_t kKindShuffle = 0x04;
constexpr std::uint64_t kKindEval = 0x05;

struct ExpertPool {
    TransitionSide all;              // every corpus transition, flattened
    std::vector<SysAction> actions;  // aligned index form of all.action
};

ExpertPool build_expert_pool(const EnvBundle& env, const std::vector<Session>& corpus) {
    ExpertPool pool;
    const int act_dim = env.vocab().sys_size();
    for (const Session& s : corpus) {
        for (const Turn& t : s.turns) {
            pool.all.x.push_back(t.state_before);
            pool.all.x_next.push_back(t.state_after);
            std::vector<double> multihot(act_dim);
            env.vocab().encode_multihot(t.sys, multihot);
            pool.all.action.push_back(std::move(multihot));
            pool.all.log_pi.push_back(0.0); // filled per-iteration from the live policy
            pool.actions.push_back(t.sys);
        }
    }
    if (pool.all.size() == 0) throw ConfigError("expert corpus has no transitions");
    return pool;
}

// Supervised warm start: fit the policy logits to the corpus actions by
// multi-label cross entropy. Runs once, before the adversarial loop.
void pretrain_policy(PolicyParams& pol, const ExpertPool& pool, const TrainConfig& cfg,
                     RngStream rng, ExecMode mode) {
    if (cfg.bc_epochs == 0) return;
    const std::size_t n = pool.all.size();
    AdamState opt = AdamState::for_params(pol.params.size(), cfg.bc_lr);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t mb = static_cast<std::size_t>(cfg.bc_minibatch);

    for (int epoch = 0; epoch < cfg.bc_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += mb) {
            const std::size_t count = std::min(mb, n - start);
            const double scale = 1.0 / static_cast<double>(count);
            const std::size_t nb = block_count(count);
            std::vector<ParamVector> blocks(nb);
            for (ParamVector& b : blocks) b.assign(pol.params.size(), 0.0);
            for_each_block(count, mode, [&](std::size_t begin, std::size_t end, std::size_t b) {
                MlpWorkspace ws;
                std::vector<double> logits, dlogits;
                for (std::size_t k = begin; k < end; ++k) {
                    const std::size_t t = order[start + k];
                    mlp_forward(pol.spec, pol.params, pool.all.x[t], ws, logits);
                    dlogits.resize(logits.size());
                    for (std::size_t i = 0; i < logits.size(); ++i) {
                        dlogits[i] =
                            scale * (num::sigmoid(logits[i]) - pool.all.action[t][i]);
                    }
                    mlp_backward(pol.spec, pol.params, dlogits, ws, blocks[b], nullptr);
                }
            });
            ParamVector grad(pol.params.size(), 0.0);
            for (const ParamVector& b : blocks) {
                for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += b[i];
            }
            adam_step(opt, pol.params, grad);
        }
    }
}

std::unique_ptr<EnvBundle> make_env(const TrainConfig& cfg) {
    EnvConfig env_cfg;
    env_cfg.turn_cap = cfg.turn_cap;
    return cfg.schema_path.empty() ? EnvBundle::toy(env_cfg)
                                   : EnvBundle::from_file(cfg.schema_path, env_cfg);
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile_of(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

const MetricsReport* TrainReport::best_eval() const {
    const MetricsReport* best = nullptr;
    for (const EvalRecord& e : evals) {
        if (best == nullptr || e.metrics.success_rate >= best->success_rate) {
            best = &e.metrics;
        }
    }
    return best;
}

MetricsReport evaluate_policy(const Checkpoint& ckpt, const EnvBundle& env, int n_sessions,
                              const RngStream& rng, int max_acts, ExecMode mode) {
    if (ckpt.schema_hash != env.hash()) {
        throw ConfigError("checkpoint schema hash " + ckpt.schema_hash +
                          " does not match environment " + env.hash());
    }
    const std::vector<Session> sessions =
        collect_greedy_sessions(env, ckpt.policy, n_sessions, rng, max_acts, mode);
    return evaluate_sessions(sessions, env.vocab());
}

TrainResult train(const TrainConfig& cfg, const Checkpoint* resume, ExecMode mode) {
    cfg.validate();
    if (cfg.corpus_path.empty()) throw ConfigError("train needs a corpus path");

    std::unique_ptr<EnvBundle> env = make_env(cfg);
    const std::vector<Session> corpus = load_corpus(env->vocab(), cfg.corpus_path);
    const ExpertPool pool = build_expert_pool(*env, corpus);
    const StateLayout layout(env->vocab());
    const int state_dim = layout.total();
    const int act_dim = env->vocab().sys_size();

    Checkpoint state;
    VrbConfig vrb_cfg = cfg.vrb;
    if (resume != nullptr) {
        state = *resume;
        if (state.schema_hash != env->hash()) {
            throw ConfigError("resume checkpoint schema hash " + state.schema_hash +
                              " does not match environment " + env->hash());
        }
        if (state.variant != cfg.variant) {
            throw ConfigError("resume checkpoint was trained with variant " +
                              variant_name(state.variant) + ", config says " +
                              variant_name(cfg.variant));
        }
        vrb_cfg.phi = state.phi;
    } else {
        RngStream init_rng(cfg.seed, stream_key(kKindInit));
        state.seed = cfg.seed;
        state.iteration = 0;
        state.schema_hash = env->hash();
        state.variant = cfg.variant;
        state.policy = PolicyParams::init(state_dim, act_dim, cfg.policy_hidden, init_rng);
        state.value = ValueParams::init(state_dim, cfg.value_hidden, init_rng);
        state.estimator.enc =
            EncoderParams::init(state_dim, act_dim, cfg.d_z, cfg.encoder_hidden, init_rng);
        state.estimator.heads = RewardHeads::init(cfg.d_z, cfg.head_hidden, init_rng);
        state.pol_opt = PolicyOptimizer::make(state.policy, state.value, cfg.ppo);
        state.est_opt = EstimatorOptimizer::make(state.estimator, cfg.estimator_lr);
        state.phi = vrb_cfg.phi;
        pretrain_policy(state.policy, pool, cfg, init_rng, mode);
    }
    const bool use_airl = cfg.variant == TrainVariant::airl;

    TrainReport report;
    const std::uint64_t start = state.iteration;
    const std::uint64_t stop = static_cast<std::uint64_t>(cfg.iterations);
    if (start >= stop) {
        throw ConfigError("resume checkpoint is already at iteration " + std::to_string(start));
    }

    for (std::uint64_t iter = start; iter < stop; ++iter) {
        IterationRecord rec;
        rec.iteration = static_cast<int>(iter);

        // (1) sample expert transitions from the corpus
        rec.phase_trace.push_back("corpus_sample");
        // (2) gather dialog sessions with the current policy
        rec.phase_trace.push_back("rollout");
        CollectedRollouts rollouts =
            collect_training_rollouts(*env, state.policy, cfg.sessions_per_iteration, cfg.seed,
                                      iter, mode);
        RolloutBatch& batch = rollouts.batch;
        const std::size_t n_policy = batch.size();
        rec.policy_transitions = static_cast<int>(n_policy);

        RngStream expert_rng(cfg.seed, stream_key(kKindExpert, iter));
        EstimatorBatch est_batch;
        est_batch.iteration_stamp = iter;
        for (std::size_t i = 0; i < n_policy; ++i) {
            const std::size_t j = expert_rng.index(pool.all.size());
            est_batch.expert.x.push_back(pool.all.x[j]);
            est_batch.expert.x_next.push_back(pool.all.x_next[j]);
            est_batch.expert.action.push_back(pool.all.action[j]);
            est_batch.expert.log_pi.push_back(
                action_log_prob(state.policy, pool.all.x[j], pool.actions[j]));
        }
        est_batch.policy.x = batch.x;
        est_batch.policy.x_next = batch.x_next;
        est_batch.policy.action = batch.action;
        est_batch.policy.log_pi = batch.log_pi_old;

        // (3) encode both sides / (4) compute the information bottleneck
        rec.phase_trace.push_back("encode");
        rec.phase_trace.push_back("bottleneck");
        rec.bottleneck = bottleneck_penalty(est_batch, state.estimator.enc, vrb_cfg, mode);

        // (5) update the reward estimator
        rec.phase_trace.push_back("estimator_update");
        if (est_batch.iteration_stamp != iter || batch.iteration_stamp != iter) {
            throw StateError("update consuming a batch from another iteration");
        }
        RngStream noise_rng(cfg.seed, stream_key(kKindNoise, iter));
        EstimatorDiagnostics ediag;
        for (int step = 0; step < cfg.estimator_steps; ++step) {
            ediag = update_estimator(state.est_opt, state.estimator, est_batch, vrb_cfg,
                                     noise_rng, use_airl, mode);
        }
        state.phi = vrb_cfg.phi;
        rec.est_loss = ediag.loss;
        rec.mean_expert_f = ediag.mean_expert_f;
        rec.mean_policy_f = ediag.mean_policy_f;
        rec.f_gap = ediag.mean_expert_f - ediag.mean_policy_f;
        rec.mean_policy_kl = ediag.mean_policy_kl;
        rec.phi = ediag.phi;

        // (6) estimate the shaped reward with the updated estimator
        rec.phase_trace.push_back("reward_estimate");
        const std::vector<double> f = mean_f_scores(est_batch.policy, state.estimator.enc,
                                                    state.estimator.heads, vrb_cfg.gamma,
                                                    vrb_cfg.shaping_sign, mode);
        double reward_sum = 0.0;
        for (std::size_t i = 0; i < n_policy; ++i) {
            batch.reward[i] = shaped_reward(f[i], batch.log_pi_old[i]);
            reward_sum += batch.reward[i];
        }
        rec.mean_shaped_reward = reward_sum / static_cast<double>(n_policy);

        // (7) update value function and dialog policy
        rec.phase_trace.push_back("value_policy_update");
        compute_gae(batch, state.value, cfg.ppo);
        RngStream shuffle_rng(cfg.seed, stream_key(kKindShuffle, iter));
        const PolicyUpdateDiag pdiag =
            update_policy(state.pol_opt, state.policy, state.value, batch, cfg.ppo, shuffle_rng,
                          mode);
        rec.clip_fraction = pdiag.clip_fraction;
        rec.mean_ratio = pdiag.mean_ratio;
        rec.value_loss = pdiag.value_loss;

        state.iteration = iter + 1;
        report.iterations.push_back(std::move(rec));

        const bool last = iter + 1 == stop;
        if ((iter + 1) % static_cast<std::uint64_t>(cfg.eval_every) == 0 || last) {
            EvalRecord ev;
            ev.iteration = static_cast<int>(iter + 1);
            RngStream eval_rng(cfg.seed, stream_key(kKindEval, iter + 1));
            ev.metrics = evaluate_policy(state, *env, cfg.eval_sessions, eval_rng,
                                         cfg.ppo.act_threshold_max, mode);
            log::info("iter %d: success %.3f match %.3f f1 %.3f turns %.2f", ev.iteration,
                      ev.metrics.success_rate, ev.metrics.match_rate, ev.metrics.inform_f1,
                      ev.metrics.avg_turns);
            report.evals.push_back(std::move(ev));
        }
    }

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_report_csv(report, cfg.out_dir);
        save_checkpoint(state, cfg.out_dir + "/checkpoint.vrbc");
    }
    return TrainResult{std::move(state), std::move(report)};
}

std::vector<AblationRow> ablation_compare(const TrainConfig& cfg, int n_seeds) {
    if (n_seeds < 1) throw ConfigError("ablation needs at least one seed");

    struct Job {
        TrainVariant variant;
        std::uint64_t seed;
        MetricsReport metrics;
    };
    std::vector<Job> jobs;
    for (TrainVariant v : {TrainVariant::vrb, TrainVariant::airl}) {
        for (int s = 0; s < n_seeds; ++s) {
            jobs.push_back(Job{v, cfg.seed + static_cast<std::uint64_t>(s), {}});
        }
    }

    // runs fan out across threads; each run is single-threaded inside, and
    // results land in job order, so the outcome is scheduling-independent
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(cfg.run_workers, static_cast<int>(jobs.size())));
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
                    TrainConfig run_cfg = cfg;
                    run_cfg.variant = jobs[i].variant;
                    run_cfg.seed = jobs[i].seed;
                    run_cfg.out_dir.clear();
                    TrainResult res = train(run_cfg, nullptr, ExecMode::serial);
                    const MetricsReport* final_metrics = res.report.final_eval();
                    if (final_metrics == nullptr) {
                        throw StateError("training produced no evaluation snapshot");
                    }
                    jobs[i].metrics = *final_metrics;
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : threads) t.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<AblationRow> rows;
    for (TrainVariant v : {TrainVariant::vrb, TrainVariant::airl}) {
        AblationRow row;
        row.variant = v;
        std::vector<double> turns, match, f1, success;
        for (const Job& j : jobs) {
            if (j.variant != v) continue;
            row.per_seed.push_back(j.metrics);
            turns.push_back(j.metrics.avg_turns);
            match.push_back(j.metrics.match_rate);
            f1.push_back(j.metrics.inform_f1);
            success.push_back(j.metrics.success_rate);
        }
        auto cell = [](const std::vector<double>& v) {
            return AblationCell{median_of(v), quantile_of(v, 0.75) - quantile_of(v, 0.25)};
        };
        row.turns = cell(turns);
        row.match = cell(match);
        row.inform_f1 = cell(f1);
        row.success = cell(success);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string report_csv_text(const TrainReport& report) {
    std::ostringstream os;
    os << "iteration,est_loss,mean_expert_f,mean_policy_f,f_gap,mean_policy_kl,bottleneck,phi,"
          "clip_fraction,mean_ratio,value_loss,mean_shaped_reward,policy_transitions\n";
    for (const IterationRecord& r : report.iterations) {
        os << r.iteration << ',' << fmt_real(r.est_loss) << ',' << fmt_real(r.mean_expert_f)
           << ',' << fmt_real(r.mean_policy_f) << ',' << fmt_real(r.f_gap) << ','
           << fmt_real(r.mean_policy_kl) << ',' << fmt_real(r.bottleneck) << ','
           << fmt_real(r.phi) << ',' << fmt_real(r.clip_fraction) << ','
           << fmt_real(r.mean_ratio) << ',' << fmt_real(r.value_loss) << ','
           << fmt_real(r.mean_shaped_reward) << ',' << r.policy_transitions << '\n';
    }
    return os.str();
}

std::string eval_csv_text(const TrainReport& report) {
    std::ostringstream os;
    os << "iteration,avg_turns,match_rate,inform_precision,inform_recall,inform_f1,"
          "success_rate,session_count\n";
    for (const EvalRecord& e : report.evals) {
        const MetricsReport& m = e.metrics;
        os << e.iteration << ',' << fmt_real(m.avg_turns) << ',' << fmt_real(m.match_rate) << ','
           << fmt_real(m.inform_precision) << ',' << fmt_real(m.inform_recall) << ','
           << fmt_real(m.inform_f1) << ',' << fmt_real(m.success_rate) << ',' << m.session_count
           << '\n';
    }
    return os.str();
}

void write_report_csv(const TrainReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir + "/report.csv", std::ios::binary);
        if (!out) throw IoError("cannot write " + dir + "/report.csv");
        out << report_csv_text(report);
    }
    {
        std::ofstream out(dir + "/eval.csv", std::ios::binary);
        if (!out) throw IoError("cannot write " + dir + "/eval.csv");
        out << eval_csv_text(report);
    }
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "variant,turns_median,turns_iqr,match_median,match_iqr,inform_f1_median,"
           "inform_f1_iqr,success_median,success_iqr\n";
    for (const AblationRow& r : rows) {
        out << variant_name(r.variant) << ',' << fmt_real(r.turns.median) << ','
            << fmt_real(r.turns.iqr) << ',' << fmt_real(r.match.median) << ','
            << fmt_real(r.match.iqr) << ',' << fmt_real(r.inform_f1.median) << ','
            << fmt_real(r.inform_f1.iqr) << ',' << fmt_real(r.success.median) << ','
            << fmt_real(r.success.iqr) << '\n';
    }
}

} // namespace vrb
