#pragma once

#include <deque>

#include "vrb/dialog_state.hpp"
#include "vrb/goal.hpp"

namespace vrb {

enum class TerminalStatus { ongoing, success, failure };

struct AgendaItem {
    bool is_request = false;
    int domain = -1;
    int slot = -1;
    int value = -1; // constraint items only

    static AgendaItem constraint(int d, int s, int v) { return {false, d, s, v}; }
    static AgendaItem request(int d, int s) { return {true, d, s, -1}; }
};

// Stack of pending user moves: per active domain, constraint informs first,
// then requests. The observable side (outstanding/answered) lives in the
// DialogLedger; the agenda holds only the goal-private queue.
struct AgendaState {
    std::deque<AgendaItem> pending;

    static AgendaState init(const DomainSchema& schema, const UserGoal& goal);
};

struct UserStepResult {
    UserAction action;
    TerminalStatus status = TerminalStatus::ongoing;
};

// One user turn, reacting to the system action already applied to the
// ledger. Behavior:
//   - a system bye triggers the terminal check: success iff all constraints
//     stated, all requests answered and every active bookable domain holds a
//     goal-matching booking; otherwise failure;
//   - requests for goal-constrained unstated slots are all answered at once;
//   - otherwise one pending agenda item is emitted per turn;
//   - with an empty agenda the user closes with bye on success, or keeps
//     nagging (re-requests, re-states a constraint) until the system fixes
//     what is missing.
UserStepResult user_step(const UserGoal& goal, AgendaState& agenda, const SysAction& sys_action,
                         const DialogLedger& ledger);

// Shared by user_step and the environment turn-cap path.
bool user_goal_satisfied(const UserGoal& goal, const AgendaState& agenda,
                         const DialogLedger& ledger);

} // namespace vrb
