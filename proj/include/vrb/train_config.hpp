#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vrb/gae.hpp"
#include "vrb/reward_heads.hpp"

namespace vrb {

// Flat dotted-key configuration text: `section.key = value`, '#' comments.
// Unknown keys are rejected when applied, so typos fail loudly.
class KeyValueConfig {
public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_lines(const std::vector<std::string>& lines);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const;

private:
    std::map<std::string, std::string> entries_;
};

enum class TrainVariant { vrb, airl };

struct TrainConfig {
    // environment
    std::string schema_path; // empty: built-in toy world
    std::string corpus_path;
    int turn_cap = 20;

    // network sizes (the source never fixes these; see README)
    std::vector<int> policy_hidden{64, 64};
    std::vector<int> value_hidden{64, 64};
    int encoder_hidden = 64;
    int head_hidden = 32;
    int d_z = 16;

    // estimator
    VrbConfig vrb;
    double estimator_lr = 1e-4;
    int estimator_steps = 2; // gradient steps per iteration

    // policy
    PpoConfig ppo;

    // supervised warm start of the policy from the corpus ("initialize the
    // dialog policy"); 0 disables it
    int bc_epochs = 100;
    double bc_lr = 1e-3;
    int bc_minibatch = 64;

    // loop
    std::uint64_t seed = 0;
    int iterations = 300;
    int sessions_per_iteration = 16;
    int eval_every = 50;
    int eval_sessions = 100;
    TrainVariant variant = TrainVariant::vrb;
    std::string out_dir;
    int run_workers = 2; // concurrent seeds in multi-run drivers

    // accepted for config-file compatibility; the rule-based simulator has
    // nothing to learn, so the value is ignored (and logged as such)
    double user_sim_lr = 1e-3;

    static TrainConfig from_file(const std::string& path);
    void apply(const KeyValueConfig& kv);
    void validate() const;
};

std::string variant_name(TrainVariant v);
TrainVariant variant_from_name(const std::string& name);

} // namespace vrb
