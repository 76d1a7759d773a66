#pragma once

#include "vrb/checkpoint.hpp"
#include "vrb/rollout.hpp"

namespace vrb {

struct IterationRecord {
    int iteration = 0;
    double est_loss = 0.0;
    double mean_expert_f = 0.0;
    double mean_policy_f = 0.0;
    double f_gap = 0.0;
    double mean_policy_kl = 0.0;
    double bottleneck = 0.0; // pre-update penalty (mean KL - i_c)
    double phi = 0.0;
    double clip_fraction = 0.0;
    double mean_ratio = 0.0;
    double value_loss = 0.0;
    double mean_shaped_reward = 0.0;
    int policy_transitions = 0;
    std::vector<std::string> phase_trace; // per-iteration call order
};

struct EvalRecord {
    int iteration = 0;
    MetricsReport metrics;
};

struct TrainReport {
    std::vector<IterationRecord> iterations;
    std::vector<EvalRecord> evals;

    const MetricsReport* final_eval() const {
        return evals.empty() ? nullptr : &evals.back().metrics;
    }
    // metrics at the snapshot with the best success rate (ties: latest)
    const MetricsReport* best_eval() const;
};

struct TrainResult {
    Checkpoint checkpoint;
    TrainReport report;
};

// Runs the alternating estimator/policy loop for cfg.iterations iterations.
// Per iteration: sample expert transitions, roll out sessions with the
// current policy, encode both sides, compute the bottleneck penalty, update
// the estimator, re-estimate shaped rewards with the updated estimator, then
// update value function and policy. Fully deterministic per (config, seed).
// When resume is given, continues from its iteration counter; the result is
// bit-identical to an uninterrupted run.
TrainResult train(const TrainConfig& cfg, const Checkpoint* resume = nullptr,
                  ExecMode mode = ExecMode::parallel);

// Greedy-decoding evaluation of a checkpointed policy.
MetricsReport evaluate_policy(const Checkpoint& ckpt, const EnvBundle& env, int n_sessions,
                              const RngStream& rng, int max_acts,
                              ExecMode mode = ExecMode::parallel);

struct AblationCell {
    double median = 0.0;
    double iqr = 0.0;
};

struct AblationRow {
    TrainVariant variant = TrainVariant::vrb;
    AblationCell turns, match, inform_f1, success;
    std::vector<MetricsReport> per_seed; // final evaluation per seed
};

// Trains both objectives over the shared seed set cfg.seed .. cfg.seed+n-1
// and reports per-variant medians with interquartile ranges. Runs fan out
// over cfg.run_workers threads, each worker single-threaded inside.
std::vector<AblationRow> ablation_compare(const TrainConfig& cfg, int n_seeds);

// report.csv (one row per iteration) and eval.csv (snapshots); full 64-bit
// precision, stable formatting.
void write_report_csv(const TrainReport& report, const std::string& dir);
std::string report_csv_text(const TrainReport& report);
std::string eval_csv_text(const TrainReport& report);
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);

} // namespace vrb
