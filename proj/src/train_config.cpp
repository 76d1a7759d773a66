#include "vrb/train_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "vrb/errors.hpp"
#include "vrb/log.hpp"

namespace vrb {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::from_lines(const std::vector<std::string>& lines) {
    KeyValueConfig kv;
    int lineno = 0;
    for (std::string line : lines) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        }
        kv.set(key, value);
    }
    return kv;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(lines);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_real(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a real number: " + it->second);
    }
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + it->second);
    }
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an unsigned integer: " + it->second);
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + it->second);
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              std::vector<int> fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<int> out;
    std::string body = it->second;
    for (char& c : body) {
        if (c == ',') c = ' ';
    }
    std::istringstream is(body);
    long long v;
    while (is >> v) out.push_back(static_cast<int>(v));
    if (!is.eof() || out.empty()) {
        throw ConfigError("config key " + key + " is not an integer list: " + it->second);
    }
    return out;
}

std::string variant_name(TrainVariant v) {
    return v == TrainVariant::vrb ? "vrb" : "airl";
}

TrainVariant variant_from_name(const std::string& name) {
    if (name == "vrb") return TrainVariant::vrb;
    if (name == "airl") return TrainVariant::airl;
    throw ConfigError("unknown variant: " + name + " (expected vrb or airl)");
}

TrainConfig TrainConfig::from_file(const std::string& path) {
    TrainConfig cfg;
    cfg.apply(KeyValueConfig::from_file(path));
    return cfg;
}

void TrainConfig::apply(const KeyValueConfig& kv) {
    static const std::set<std::string> known = {
        "env.schema", "env.turn_cap",
        "net.policy_hidden", "net.value_hidden", "net.encoder_hidden", "net.head_hidden",
        "net.d_z",
        "vrb.gamma", "vrb.phi", "vrb.i_c", "vrb.adaptive_phi", "vrb.phi_step",
        "vrb.encoder_noise", "vrb.shaping_sign",
        "est.learning_rate", "est.steps_per_iteration",
        "bc.epochs", "bc.learning_rate", "bc.minibatch_size",
        "ppo.gamma", "ppo.lambda", "ppo.epsilon_clip", "ppo.epochs_per_batch",
        "ppo.minibatch_size", "ppo.value_coef", "ppo.normalize_advantages",
        "ppo.policy_lr", "ppo.value_lr", "ppo.act_threshold_max",
        "train.seed", "train.iterations", "train.sessions_per_iteration", "train.eval_every",
        "train.eval_sessions", "train.variant", "train.corpus", "train.out",
        "train.run_workers",
        "sim.learning_rate",
    };
    for (const auto& [key, value] : kv.entries()) {
        if (known.find(key) == known.end()) {
            throw ConfigError("unknown config key: " + key);
        }
    }

    schema_path = kv.get_string("env.schema", schema_path);
    turn_cap = static_cast<int>(kv.get_int("env.turn_cap", turn_cap));
    policy_hidden = kv.get_int_list("net.policy_hidden", policy_hidden);
    value_hidden = kv.get_int_list("net.value_hidden", value_hidden);
    encoder_hidden = static_cast<int>(kv.get_int("net.encoder_hidden", encoder_hidden));
    head_hidden = static_cast<int>(kv.get_int("net.head_hidden", head_hidden));
    d_z = static_cast<int>(kv.get_int("net.d_z", d_z));

    vrb.gamma = kv.get_real("vrb.gamma", vrb.gamma);
    vrb.phi = kv.get_real("vrb.phi", vrb.phi);
    vrb.i_c = kv.get_real("vrb.i_c", vrb.i_c);
    vrb.adaptive_phi = kv.get_bool("vrb.adaptive_phi", vrb.adaptive_phi);
    vrb.phi_step = kv.get_real("vrb.phi_step", vrb.phi_step);
    vrb.encoder_noise = kv.get_bool("vrb.encoder_noise", vrb.encoder_noise);
    const std::string sign = kv.get_string(
        "vrb.shaping_sign",
        vrb.shaping_sign == ShapingSign::airl_minus ? "airl_minus" : "paper_plus");
    if (sign == "airl_minus") {
        vrb.shaping_sign = ShapingSign::airl_minus;
    } else if (sign == "paper_plus") {
        vrb.shaping_sign = ShapingSign::paper_plus;
    } else {
        throw ConfigError("vrb.shaping_sign must be airl_minus or paper_plus, got " + sign);
    }

    estimator_lr = kv.get_real("est.learning_rate", estimator_lr);
    estimator_steps = static_cast<int>(kv.get_int("est.steps_per_iteration", estimator_steps));
    bc_epochs = static_cast<int>(kv.get_int("bc.epochs", bc_epochs));
    bc_lr = kv.get_real("bc.learning_rate", bc_lr);
    bc_minibatch = static_cast<int>(kv.get_int("bc.minibatch_size", bc_minibatch));

    ppo.gamma = kv.get_real("ppo.gamma", ppo.gamma);
    ppo.lambda = kv.get_real("ppo.lambda", ppo.lambda);
    ppo.epsilon_clip = kv.get_real("ppo.epsilon_clip", ppo.epsilon_clip);
    ppo.epochs_per_batch = static_cast<int>(kv.get_int("ppo.epochs_per_batch", ppo.epochs_per_batch));
    ppo.minibatch_size = static_cast<int>(kv.get_int("ppo.minibatch_size", ppo.minibatch_size));
    ppo.value_coef = kv.get_real("ppo.value_coef", ppo.value_coef);
    ppo.normalize_advantages = kv.get_bool("ppo.normalize_advantages", ppo.normalize_advantages);
    ppo.policy_lr = kv.get_real("ppo.policy_lr", ppo.policy_lr);
    ppo.value_lr = kv.get_real("ppo.value_lr", ppo.value_lr);
    ppo.act_threshold_max = static_cast<int>(kv.get_int("ppo.act_threshold_max", ppo.act_threshold_max));

    seed = kv.get_u64("train.seed", seed);
    iterations = static_cast<int>(kv.get_int("train.iterations", iterations));
    sessions_per_iteration =
        static_cast<int>(kv.get_int("train.sessions_per_iteration", sessions_per_iteration));
    eval_every = static_cast<int>(kv.get_int("train.eval_every", eval_every));
    eval_sessions = static_cast<int>(kv.get_int("train.eval_sessions", eval_sessions));
    variant = variant_from_name(kv.get_string("train.variant", variant_name(variant)));
    corpus_path = kv.get_string("train.corpus", corpus_path);
    out_dir = kv.get_string("train.out", out_dir);
    run_workers = static_cast<int>(kv.get_int("train.run_workers", run_workers));

    if (kv.has("sim.learning_rate")) {
        user_sim_lr = kv.get_real("sim.learning_rate", user_sim_lr);
        log::info("sim.learning_rate = %g accepted but ignored: the user simulator is rule-based",
                  user_sim_lr);
    }
}

void TrainConfig::validate() const {
    if (iterations < 1) throw ConfigError("train.iterations must be >= 1");
    if (sessions_per_iteration < 1) throw ConfigError("train.sessions_per_iteration must be >= 1");
    if (eval_sessions < 1) throw ConfigError("train.eval_sessions must be >= 1");
    if (eval_every < 1) throw ConfigError("train.eval_every must be >= 1");
    if (estimator_steps < 1) throw ConfigError("est.steps_per_iteration must be >= 1");
    if (bc_epochs < 0) throw ConfigError("bc.epochs must be >= 0");
    if (bc_minibatch < 1) throw ConfigError("bc.minibatch_size must be >= 1");
    if (turn_cap < 2) throw ConfigError("env.turn_cap must be >= 2");
    if (d_z < 1) throw ConfigError("net.d_z must be >= 1");
    if (!(vrb.gamma > 0.0 && vrb.gamma <= 1.0)) throw ConfigError("vrb.gamma must be in (0, 1]");
    if (vrb.phi < 0.0) throw ConfigError("vrb.phi must be >= 0");
    if (!(vrb.i_c > 0.0)) throw ConfigError("vrb.i_c must be > 0");
    if (ppo.epochs_per_batch < 1) throw ConfigError("ppo.epochs_per_batch must be >= 1");
    if (ppo.minibatch_size < 1) throw ConfigError("ppo.minibatch_size must be >= 1");
    if (run_workers < 1) throw ConfigError("train.run_workers must be >= 1");
}

} // namespace vrb
