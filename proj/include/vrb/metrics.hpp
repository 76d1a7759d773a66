#pragma once

#include "vrb/session.hpp"

namespace vrb {

struct MetricsReport {
    double avg_turns = 0.0;
    double match_rate = 0.0;
    double inform_precision = 0.0;
    double inform_recall = 0.0;
    double inform_f1 = 0.0;
    double success_rate = 0.0;
    int session_count = 0;
};

// Scores terminal sessions by replaying their acts:
//   - avg_turns: mean number of system turns;
//   - match rate: per session, the fraction of goal-active bookable domains
//     whose final booked entity satisfies every goal constraint (an unbooked
//     domain scores 0); averaged over sessions;
//   - inform precision/recall: micro-averaged over the corpus. A requested
//     (domain, slot) counts as a true positive when some inform carried the
//     value of the entity booked at that moment; informed pairs outside the
//     goal's request set count against precision. F1 is the harmonic mean,
//     0 when both are 0;
//   - success: 1 iff every requested slot was correctly informed and every
//     goal-active bookable domain ends with a goal-matching booking.
// Throws StateError if any session is non-terminal.
MetricsReport evaluate_sessions(const std::vector<Session>& sessions, const ActVocab& vocab);

} // namespace vrb
