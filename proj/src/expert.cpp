#include "vrb/expert.hpp"

#include "vrb/errors.hpp"

namespace vrb {

SysAction expert_policy(const DialogEnv& env) {
    const ActVocab& vocab = env.vocab();
    const DomainSchema& schema = vocab.schema();
    const Database& db = vocab.db();
    const DialogLedger& ledger = env.ledger();
    const UserAction& user = env.last_user_action();
    const SysAction& prev = env.prev_sys_action();

    SysAction out;
    if (user.contains(vocab.user_bye())) {
        out.add(vocab.sys_bye());
        return out;
    }

    for (std::size_t d = 0; d < schema.domains.size(); ++d) {
        const int domain = static_cast<int>(d);
        const DomainDef& dom = schema.domains[d];
        const bool touched = ledger.belief.constraints[d] != 0 ||
                             ledger.belief.outstanding[d] != 0 || ledger.booked[d] >= 0;
        if (!touched) continue;

        if (ledger.booked[d] < 0) {
            std::vector<int> unstated;
            for (int s = 0; s < static_cast<int>(dom.informable.size()); ++s) {
                if (!ledger.belief.has_constraint(schema, domain, s)) unstated.push_back(s);
            }
            bool requested_before = false;
            for (int idx : prev.indices) {
                const SysAct a = vocab.decode_sys(idx);
                if (a.kind == SysActKind::request && a.domain == domain) requested_before = true;
            }
            bool user_added = false;
            for (int idx : user.indices) {
                const UserAct a = vocab.decode_user(idx);
                if (a.kind == UserActKind::inform_constraint && a.domain == domain) {
                    user_added = true;
                }
            }
            // a request round that added nothing means the user has stated
            // everything it cares about in this domain
            const bool constraints_complete = unstated.empty() || (requested_before && !user_added);
            if (constraints_complete) {
                const auto constraints = ledger.belief.constraint_list(schema, domain);
                for (std::size_t e = 0; e < db.by_domain[d].size(); ++e) {
                    if (entity_matches(db.entities[db.by_domain[d][e]], constraints)) {
                        out.add(vocab.sys_book(domain, static_cast<int>(e)));
                        break;
                    }
                }
                // answer whatever is already outstanding from the row being booked
                const auto cs = constraints;
                for (int e_local = 0; e_local < static_cast<int>(db.by_domain[d].size());
                     ++e_local) {
                    const Entity& ent = db.entities[db.by_domain[d][e_local]];
                    if (!entity_matches(ent, cs)) continue;
                    for (int r = 0; r < static_cast<int>(dom.requestable.size()); ++r) {
                        if (ledger.belief.outstanding[d] & (1u << r)) {
                            out.add(vocab.sys_inform(domain, r, ent.requestable_values[r]));
                        }
                    }
                    break;
                }
            } else {
                for (int s : unstated) out.add(vocab.sys_request(domain, s));
            }
        } else {
            const Entity& ent = db.entities[ledger.booked[d]];
            for (int r = 0; r < static_cast<int>(dom.requestable.size()); ++r) {
                if (ledger.belief.outstanding[d] & (1u << r)) {
                    out.add(vocab.sys_inform(domain, r, ent.requestable_values[r]));
                }
            }
        }
    }

    if (out.empty()) {
        // nothing actionable yet; ask about the first untouched domain
        for (std::size_t d = 0; d < schema.domains.size(); ++d) {
            if (ledger.belief.constraints[d] == 0) {
                out.add(vocab.sys_request(static_cast<int>(d), 0));
                break;
            }
        }
    }
    if (out.empty()) out.add(vocab.sys_bye());
    return out;
}

std::vector<Session> generate_corpus(const DomainSchema& schema, const Database& db,
                                     const ActVocab& vocab, int n_sessions, RngStream& rng,
                                     EnvConfig cfg) {
    if (n_sessions < 1) throw ConfigError("generate_corpus needs n_sessions >= 1");
    std::vector<Session> sessions;
    sessions.reserve(n_sessions);
    DialogEnv env(schema, db, vocab, cfg);
    for (int i = 0; i < n_sessions; ++i) {
        RngStream goal_rng = rng.substream(static_cast<std::uint64_t>(i));
        env.reset(sample_goal(schema, db, goal_rng));
        StepInfo info;
        do {
            info = env.apply(expert_policy(env));
        } while (!info.terminal);
        if (info.status != TerminalStatus::success) {
            throw StateError("expert failed on session " + std::to_string(i) +
                             "; the corpus generator requires an optimal expert");
        }
        sessions.push_back(env.take_session());
    }
    return sessions;
}

} // namespace vrb
