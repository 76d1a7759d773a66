#include "vrb/rollout.hpp"

#include "vrb/errors.hpp"
#include "vrb/log.hpp"

namespace vrb {

namespace {

// Stream-kind tags; combined with the seed they carve out independent
// deterministic streams per purpose.
constexpr std::uint64_t kKindRollout = 0x11;

} // namespace

std::unique_ptr<EnvBundle> EnvBundle::toy(EnvConfig cfg) {
    DomainSchema schema = toy_schema();
    Database db = toy_database(schema);
    return std::make_unique<EnvBundle>(std::move(schema), std::move(db), cfg);
}

std::unique_ptr<EnvBundle> EnvBundle::from_file(const std::string& path, EnvConfig cfg) {
    auto [schema, db] = load_schema(path);
    return std::make_unique<EnvBundle>(std::move(schema), std::move(db), cfg);
}

CollectedRollouts collect_training_rollouts(const EnvBundle& env, const PolicyParams& pol,
                                            int n_episodes, std::uint64_t seed,
                                            std::uint64_t iteration, ExecMode mode) {
    if (n_episodes < 1) throw ConfigError("rollout collection needs at least one episode");

    struct EpisodeLog {
        Session session;
        std::vector<double> log_pi;
    };
    std::vector<EpisodeLog> episodes(n_episodes);

    parallel_for(static_cast<std::size_t>(n_episodes), mode, [&](std::size_t e) {
        RngStream rng(seed, stream_key(kKindRollout, iteration, e));
        DialogEnv dialog(env.schema(), env.db(), env.vocab(), env.env_config());
        dialog.reset(sample_goal(env.schema(), env.db(), rng));
        EpisodeLog& ep = episodes[e];
        StepInfo info;
        do {
            SampledAction sampled = sample_action(pol, dialog.state(), rng);
            ep.log_pi.push_back(sampled.log_pi);
            info = dialog.apply(sampled.action);
        } while (!info.terminal);
        ep.session = dialog.take_session();
    }, /*block=*/1);

    CollectedRollouts out;
    out.batch.iteration_stamp = iteration;
    const int act_dim = env.vocab().sys_size();
    for (EpisodeLog& ep : episodes) {
        const Session& s = ep.session;
        for (std::size_t t = 0; t < s.turns.size(); ++t) {
            const Turn& turn = s.turns[t];
            out.batch.x.push_back(turn.state_before);
            out.batch.x_next.push_back(turn.state_after);
            std::vector<double> multihot(act_dim);
            env.vocab().encode_multihot(turn.sys, multihot);
            out.batch.action.push_back(std::move(multihot));
            out.batch.action_indices.push_back(turn.sys);
            out.batch.log_pi_old.push_back(ep.log_pi[t]);
            out.batch.reward.push_back(0.0);
            out.batch.episode_start.push_back(t == 0 ? 1 : 0);
            out.batch.terminal.push_back(t + 1 == s.turns.size() ? 1 : 0);
        }
        out.sessions.push_back(std::move(ep.session));
    }
    return out;
}

std::vector<Session> collect_greedy_sessions(const EnvBundle& env, const PolicyParams& pol,
                                             int n_episodes, const RngStream& goal_base,
                                             int max_acts, ExecMode mode) {
    if (n_episodes < 1) throw ConfigError("evaluation needs at least one episode");
    std::vector<Session> sessions(n_episodes);
    parallel_for(static_cast<std::size_t>(n_episodes), mode, [&](std::size_t e) {
        RngStream rng = goal_base.substream(e);
        DialogEnv dialog(env.schema(), env.db(), env.vocab(), env.env_config());
        dialog.reset(sample_goal(env.schema(), env.db(), rng));
        StepInfo info;
        do {
            info = dialog.apply(greedy_action(pol, dialog.state(), max_acts));
        } while (!info.terminal);
        sessions[e] = dialog.take_session();
    }, /*block=*/1);
    return sessions;
}

} // namespace vrb
