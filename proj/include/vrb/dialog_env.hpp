#pragma once

#include "vrb/session.hpp"

namespace vrb {

struct EnvConfig {
    int turn_cap = 20;
};

struct StepInfo {
    bool terminal = false;
    TerminalStatus status = TerminalStatus::ongoing;
};

// Dialog world state machine. One instance per episode; no shared state, so
// independent instances can run on concurrent rollout workers.
//
// Turn protocol: after reset() the user has already spoken, and state() is
// the encoded x_t awaiting the system action. apply() executes the system
// action, lets the user react, and appends the finished turn to the session.
class DialogEnv {
public:
    DialogEnv(const DomainSchema& schema, const Database& db, const ActVocab& vocab,
              EnvConfig cfg = {});

    void reset(const UserGoal& goal);
    StepInfo apply(const SysAction& action);

    const StateVector& state() const { return state_; }
    bool terminal() const { return status_ != TerminalStatus::ongoing; }
    TerminalStatus status() const { return status_; }
    const Session& session() const { return session_; }
    Session take_session() { return std::move(session_); }

    const DialogLedger& ledger() const { return ledger_; }
    const UserAction& last_user_action() const { return user_action_; }
    const SysAction& prev_sys_action() const { return prev_sys_; }
    const ActVocab& vocab() const { return *vocab_; }
    int turn_count() const { return static_cast<int>(session_.turns.size()); }

private:
    void encode_state();

    const DomainSchema* schema_;
    const Database* db_;
    const ActVocab* vocab_;
    EnvConfig cfg_;

    UserGoal goal_;
    AgendaState agenda_;
    DialogLedger ledger_;
    UserAction user_action_;
    SysAction prev_sys_;
    StateVector state_;
    Session session_;
    TerminalStatus status_ = TerminalStatus::failure; // unusable until reset()
    bool started_ = false;
    bool closing_ = false; // user has said bye (success); one closing turn left
};

} // namespace vrb
