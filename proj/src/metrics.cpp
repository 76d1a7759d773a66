#include "vrb/metrics.hpp"

#include "vrb/errors.hpp"

namespace vrb {

MetricsReport evaluate_sessions(const std::vector<Session>& sessions, const ActVocab& vocab) {
    if (sessions.empty()) throw StateError("evaluate_sessions needs at least one session");
    const DomainSchema& schema = vocab.schema();
    const Database& db = vocab.db();

    MetricsReport rep;
    rep.session_count = static_cast<int>(sessions.size());

    long long turns_total = 0;
    double match_sum = 0.0;
    int match_sessions = 0;
    long long tp = 0, informed_total = 0, requested_total = 0;
    int successes = 0;

    for (const Session& s : sessions) {
        if (s.t_u == TerminalStatus::ongoing) {
            throw StateError("evaluate_sessions on a non-terminal session");
        }
        turns_total += s.turn_count();

        DialogLedger ledger;
        ledger.reset(schema, db, vocab);
        // correct[d] accumulates request slots informed with the value of the
        // then-booked entity; ledger.informed accumulates every informed slot
        for (const Turn& t : s.turns) {
            ledger.apply_user(t.user);
            ledger.apply_sys(t.sys);
        }

        bool all_booked_ok = true;
        int booking_domains = 0;
        int booking_ok = 0;
        for (std::size_t d = 0; d < schema.domains.size(); ++d) {
            const DomainGoal& g = s.goal.domains[d];
            if (!g.active() || !schema.domains[d].requires_booking) continue;
            ++booking_domains;
            const int row = ledger.booked[d];
            const bool ok = row >= 0 && entity_matches(db.entities[row], g.constraints);
            if (ok) ++booking_ok;
            else all_booked_ok = false;
        }
        if (booking_domains > 0) {
            match_sum += static_cast<double>(booking_ok) / booking_domains;
            ++match_sessions;
        }

        bool all_requests_ok = true;
        for (std::size_t d = 0; d < schema.domains.size(); ++d) {
            const DomainGoal& g = s.goal.domains[d];
            for (int r : g.requests) {
                ++requested_total;
                if (ledger.answered[d] & (1u << r)) ++tp;
                else all_requests_ok = false;
            }
            for (int r = 0; r < static_cast<int>(schema.domains[d].requestable.size()); ++r) {
                if (ledger.informed[d] & (1u << r)) ++informed_total;
            }
        }

        if (all_requests_ok && all_booked_ok) ++successes;
    }

    rep.avg_turns = static_cast<double>(turns_total) / rep.session_count;
    rep.match_rate = match_sessions > 0 ? match_sum / match_sessions : 0.0;
    rep.inform_precision = informed_total > 0 ? static_cast<double>(tp) / informed_total : 0.0;
    rep.inform_recall = requested_total > 0 ? static_cast<double>(tp) / requested_total : 0.0;
    rep.inform_f1 = (rep.inform_precision + rep.inform_recall) > 0.0
                        ? 2.0 * rep.inform_precision * rep.inform_recall /
                              (rep.inform_precision + rep.inform_recall)
                        : 0.0;
    rep.success_rate = static_cast<double>(successes) / rep.session_count;
    return rep;
}

} // namespace vrb
