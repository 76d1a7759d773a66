#include "vrb/dialog_env.hpp"

#include "vrb/errors.hpp"

namespace vrb {

DialogEnv::DialogEnv(const DomainSchema& schema, const Database& db, const ActVocab& vocab,
                     EnvConfig cfg)
    : schema_(&schema), db_(&db), vocab_(&vocab), cfg_(cfg) {}

void DialogEnv::encode_state() {
    state_ = dst_encode(*vocab_, user_action_, prev_sys_, ledger_.belief, ledger_.query());
}

void DialogEnv::reset(const UserGoal& goal) {
    goal_ = goal;
    agenda_ = AgendaState::init(*schema_, goal);
    ledger_.reset(*schema_, *db_, *vocab_);
    prev_sys_ = SysAction{};
    session_ = Session{};
    session_.goal = goal;
    status_ = TerminalStatus::ongoing;
    started_ = true;
    closing_ = false;

    // the user opens the dialog, reacting to the empty pre-dialog action
    UserStepResult first = user_step(goal_, agenda_, SysAction{}, ledger_);
    user_action_ = first.action;
    ledger_.apply_user(user_action_);
    encode_state();
}

StepInfo DialogEnv::apply(const SysAction& action) {
    if (!started_ || terminal()) {
        throw StateError("apply() on a terminal or unstarted dialog session");
    }
    for (int idx : action.indices) {
        vocab_->decode_sys(idx);
    }
    if (action.empty()) {
        throw ProtocolError("empty system action is only allowed before the dialog starts");
    }

    Turn turn;
    turn.user = user_action_;
    turn.state_before = state_;
    turn.sys = action;

    ledger_.apply_sys(action);
    prev_sys_ = action;
    const bool cap_reached = turn_count() + 1 >= cfg_.turn_cap;

    if (closing_) {
        // the user already closed with success; this turn records the reply
        status_ = TerminalStatus::success;
        user_action_ = UserAction{};
    } else if (action.contains(vocab_->sys_bye())) {
        UserStepResult step = user_step(goal_, agenda_, action, ledger_);
        user_action_ = step.action;
        ledger_.apply_user(user_action_);
        status_ = step.status;
    } else if (cap_reached) {
        // the user never gets to speak again; nothing more is recorded
        status_ = TerminalStatus::failure;
        user_action_ = UserAction{};
    } else {
        UserStepResult step = user_step(goal_, agenda_, action, ledger_);
        user_action_ = step.action;
        ledger_.apply_user(user_action_);
        if (step.status == TerminalStatus::success) closing_ = true;
    }

    encode_state();
    turn.state_after = state_;
    session_.turns.push_back(std::move(turn));
    if (terminal()) session_.t_u = status_;
    return {terminal(), status_};
}

} // namespace vrb
