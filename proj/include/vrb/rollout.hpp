#pragma once

#include <memory>

#include "vrb/dialog_env.hpp"
#include "vrb/expert.hpp"
#include "vrb/gae.hpp"
#include "vrb/metrics.hpp"
#include "vrb/parallel.hpp"

namespace vrb {

// Owns schema + database + vocabulary together. The vocabulary holds
// pointers into the schema/database, so the bundle is pinned in place.
class EnvBundle {
public:
    EnvBundle(DomainSchema schema, Database db, EnvConfig cfg)
        : schema_(std::move(schema)), db_(std::move(db)), vocab_(schema_, db_), cfg_(cfg) {}
    EnvBundle(const EnvBundle&) = delete;
    EnvBundle& operator=(const EnvBundle&) = delete;

    static std::unique_ptr<EnvBundle> toy(EnvConfig cfg = {});
    static std::unique_ptr<EnvBundle> from_file(const std::string& path, EnvConfig cfg = {});

    const DomainSchema& schema() const { return schema_; }
    const Database& db() const { return db_; }
    const ActVocab& vocab() const { return vocab_; }
    const EnvConfig& env_config() const { return cfg_; }
    std::string hash() const { return schema_hash(schema_, db_); }

private:
    DomainSchema schema_;
    Database db_;
    ActVocab vocab_;
    EnvConfig cfg_;
};

struct CollectedRollouts {
    std::vector<Session> sessions;
    RolloutBatch batch; // transitions in episode order; rewards unfilled
};

// Stochastic rollouts for training. Episode e uses the derived stream
// (seed, key(kind_rollout, iteration, e)) for its goal and action draws, so
// results do not depend on the thread count; sessions merge in episode
// order.
CollectedRollouts collect_training_rollouts(const EnvBundle& env, const PolicyParams& pol,
                                            int n_episodes, std::uint64_t seed,
                                            std::uint64_t iteration,
                                            ExecMode mode = ExecMode::serial);

// Greedy (threshold 0.5, argmax coercion, act cap) evaluation episodes.
std::vector<Session> collect_greedy_sessions(const EnvBundle& env, const PolicyParams& pol,
                                             int n_episodes, const RngStream& goal_base,
                                             int max_acts, ExecMode mode = ExecMode::serial);

} // namespace vrb
