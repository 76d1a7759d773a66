#pragma once

#include <string>
#include <vector>

#include "vrb/dialog_state.hpp"
#include "vrb/goal.hpp"
#include "vrb/user_sim.hpp"

namespace vrb {

struct Turn {
    UserAction user;
    StateVector state_before;
    SysAction sys;
    StateVector state_after;
};

// One dialog, the unit of both the expert corpus and policy rollouts.
struct Session {
    UserGoal goal;
    std::vector<Turn> turns;
    TerminalStatus t_u = TerminalStatus::ongoing;

    int turn_count() const { return static_cast<int>(turns.size()); }
};

// Corpus file: UTF-8, line-delimited; a header line carrying the schema hash
// followed by one JSON record per session (goal, symbolic act lists, t_u).
// States are not stored; loading replays the acts through the DST to rebuild
// them, and rejects files whose schema hash does not match.
void save_corpus(const std::vector<Session>& sessions, const ActVocab& vocab,
                 const std::string& path);
std::vector<Session> load_corpus(const ActVocab& vocab, const std::string& path);

// Rebuilds per-turn states for a session given only goal/acts/t_u.
void replay_session_states(const ActVocab& vocab, Session& session);

} // namespace vrb
