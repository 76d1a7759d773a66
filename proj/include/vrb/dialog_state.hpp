#pragma once

#include <cstdint>
#include <vector>

#include "vrb/acts.hpp"

namespace vrb {

// Accumulated user constraints and outstanding requests. Bits are per-domain
// masks: constraints over (informable slot, value) pairs, outstanding over
// requestable slots. Constraint bits never clear within a session.
struct BeliefState {
    std::vector<std::uint32_t> constraints;
    std::vector<std::uint32_t> outstanding;

    static BeliefState empty(const DomainSchema& schema);
    bool has_constraint(const DomainSchema& schema, int domain, int slot) const;
    std::vector<std::pair<int, int>> constraint_list(const DomainSchema& schema,
                                                     int domain) const;
};

// Database query summary per domain: how many entities match the stated
// constraints, bucketed {0, 1, >=2}, plus the booked flag. A domain with no
// stated constraints reports bucket 0 (no query yet).
struct QueryFeature {
    std::vector<int> match_bucket; // 0, 1, or 2
    std::vector<char> booked;

    static QueryFeature empty(const DomainSchema& schema);
};

using StateVector = std::vector<double>;

// Layout of the encoded state [a_u; a_prev; b; q].
struct StateLayout {
    int user_dim = 0;
    int sys_dim = 0;
    int belief_constraint_dim = 0;
    int belief_request_dim = 0;
    int query_dim = 0; // 4 bits per domain: bucket one-hot (3) + booked

    explicit StateLayout(const ActVocab& vocab);
    int total() const {
        return user_dim + sys_dim + belief_constraint_dim + belief_request_dim + query_dim;
    }
};

StateVector dst_encode(const ActVocab& vocab, const UserAction& user_action,
                       const SysAction& prev_sys_action, const BeliefState& belief,
                       const QueryFeature& query);

// Observable dialog bookkeeping, a pure function of the act sequence. Used
// identically by the live environment, corpus replay and the metric suite so
// all three agree on what happened.
struct DialogLedger {
    const DomainSchema* schema = nullptr;
    const Database* db = nullptr;
    const ActVocab* vocab = nullptr;

    BeliefState belief;
    std::vector<int> booked;             // global entity index per domain, or -1
    std::vector<std::uint32_t> answered; // correctly informed request slots per domain
    std::vector<std::uint32_t> informed; // any informed request slots per domain

    void reset(const DomainSchema& s, const Database& d, const ActVocab& v);
    void apply_user(const UserAction& a);
    // Book acts are applied before inform acts regardless of bit order, so an
    // inform landing in the same turn as its booking is judged against it.
    // Booking succeeds only when the entity matches all stated constraints.
    void apply_sys(const SysAction& a);
    QueryFeature query() const;
    int match_count(int domain) const;
};

} // namespace vrb
