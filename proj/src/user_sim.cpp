#include "vrb/user_sim.hpp"

#include <algorithm>

#include "vrb/errors.hpp"

namespace vrb {

AgendaState AgendaState::init(const DomainSchema& schema, const UserGoal& goal) {
    if (goal.domains.size() != schema.domains.size()) {
        throw ConfigError("goal not sized for this schema");
    }
    AgendaState st;
    for (std::size_t d = 0; d < goal.domains.size(); ++d) {
        const DomainGoal& g = goal.domains[d];
        for (const auto& [slot, value] : g.constraints) {
            st.pending.push_back(AgendaItem::constraint(static_cast<int>(d), slot, value));
        }
        for (int slot : g.requests) {
            st.pending.push_back(AgendaItem::request(static_cast<int>(d), slot));
        }
    }
    return st;
}

namespace {

// Drops items the dialog has already taken care of: constraints stated
// through answered requests, requests informed before being asked.
void prune_agenda(AgendaState& agenda, const DialogLedger& ledger) {
    std::erase_if(agenda.pending, [&](const AgendaItem& item) {
        if (item.is_request) {
            return (ledger.answered[item.domain] & (1u << item.slot)) != 0;
        }
        return ledger.belief.has_constraint(*ledger.schema, item.domain, item.slot);
    });
}

bool bookings_ok(const UserGoal& goal, const DialogLedger& ledger) {
    for (std::size_t d = 0; d < goal.domains.size(); ++d) {
        const DomainGoal& g = goal.domains[d];
        if (!g.active() || !ledger.schema->domains[d].requires_booking) continue;
        const int row = ledger.booked[d];
        if (row < 0) return false;
        if (!entity_matches(ledger.db->entities[row], g.constraints)) return false;
    }
    return true;
}

bool outstanding_empty(const DialogLedger& ledger) {
    for (std::uint32_t m : ledger.belief.outstanding) {
        if (m != 0) return false;
    }
    return true;
}

} // namespace

bool user_goal_satisfied(const UserGoal& goal, const AgendaState& agenda,
                         const DialogLedger& ledger) {
    AgendaState pruned = agenda;
    prune_agenda(pruned, ledger);
    return pruned.pending.empty() && outstanding_empty(ledger) && bookings_ok(goal, ledger);
}

UserStepResult user_step(const UserGoal& goal, AgendaState& agenda, const SysAction& sys_action,
                         const DialogLedger& ledger) {
    const ActVocab& vocab = *ledger.vocab;
    for (int idx : sys_action.indices) {
        vocab.decode_sys(idx); // throws ProtocolError on unknown acts
    }

    UserStepResult res;
    if (sys_action.contains(vocab.sys_bye())) {
        res.status = user_goal_satisfied(goal, agenda, ledger) ? TerminalStatus::success
                                                               : TerminalStatus::failure;
        res.action.add(vocab.user_bye());
        agenda.pending.clear();
        return res;
    }

    prune_agenda(agenda, ledger);

    if (agenda.pending.empty() && outstanding_empty(ledger) && bookings_ok(goal, ledger)) {
        res.status = TerminalStatus::success;
        res.action.add(vocab.user_bye());
        return res;
    }

    // answer every requested slot the goal constrains and the user has not
    // stated yet
    for (int idx : sys_action.indices) {
        const SysAct act = vocab.decode_sys(idx);
        if (act.kind != SysActKind::request) continue;
        const DomainGoal& g = goal.domains[act.domain];
        for (const auto& [slot, value] : g.constraints) {
            if (slot != act.slot) continue;
            if (ledger.belief.has_constraint(*ledger.schema, act.domain, slot)) continue;
            res.action.add(vocab.user_inform(act.domain, slot, value));
            std::erase_if(agenda.pending, [&](const AgendaItem& item) {
                return !item.is_request && item.domain == act.domain && item.slot == slot;
            });
        }
    }

    if (res.action.empty() && !agenda.pending.empty()) {
        const AgendaItem item = agenda.pending.front();
        agenda.pending.pop_front();
        if (item.is_request) {
            res.action.add(vocab.user_request(item.domain, item.slot));
        } else {
            res.action.add(vocab.user_inform(item.domain, item.slot, item.value));
        }
    }

    if (res.action.empty()) {
        // agenda exhausted but the goal is not met: nag about what is missing
        for (std::size_t d = 0; d < goal.domains.size() && res.action.empty(); ++d) {
            const std::uint32_t m = ledger.belief.outstanding[d];
            if (m == 0) continue;
            for (int s = 0; s < 32; ++s) {
                if (m & (1u << s)) {
                    res.action.add(vocab.user_request(static_cast<int>(d), s));
                    break;
                }
            }
        }
        for (std::size_t d = 0; d < goal.domains.size() && res.action.empty(); ++d) {
            const DomainGoal& g = goal.domains[d];
            if (!g.active()) continue;
            const int row = ledger.booked[d];
            const bool ok = row >= 0 && entity_matches(ledger.db->entities[row], g.constraints);
            if (ok) continue;
            if (!g.constraints.empty()) {
                res.action.add(vocab.user_inform(static_cast<int>(d), g.constraints[0].first,
                                                 g.constraints[0].second));
            } else if (!g.requests.empty()) {
                res.action.add(vocab.user_request(static_cast<int>(d), g.requests[0]));
            }
        }
        if (res.action.empty()) {
            throw StateError("user simulator has nothing to say in a non-terminal dialog");
        }
    }

    res.status = TerminalStatus::ongoing;
    return res;
}

} // namespace vrb
