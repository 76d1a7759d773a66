#include "vrb/dialog_state.hpp"

#include <algorithm>

#include "vrb/errors.hpp"

namespace vrb {

BeliefState BeliefState::empty(const DomainSchema& schema) {
    BeliefState b;
    b.constraints.assign(schema.domains.size(), 0);
    b.outstanding.assign(schema.domains.size(), 0);
    return b;
}

namespace {

inline int constraint_bit(const DomainSchema& schema, int domain, int slot, int value) {
    int bit = 0;
    for (int s = 0; s < slot; ++s) {
        bit += static_cast<int>(schema.domains[domain].informable[s].values.size());
    }
    return bit + value;
}

} // namespace

bool BeliefState::has_constraint(const DomainSchema& schema, int domain, int slot) const {
    const DomainDef& dom = schema.domains[domain];
    int bit = 0;
    for (int s = 0; s < static_cast<int>(dom.informable.size()); ++s) {
        const int n = static_cast<int>(dom.informable[s].values.size());
        if (s == slot) {
            const std::uint32_t mask = ((1u << n) - 1u) << bit;
            return (constraints[domain] & mask) != 0;
        }
        bit += n;
    }
    return false;
}

std::vector<std::pair<int, int>> BeliefState::constraint_list(const DomainSchema& schema,
                                                              int domain) const {
    std::vector<std::pair<int, int>> out;
    const DomainDef& dom = schema.domains[domain];
    int bit = 0;
    for (int s = 0; s < static_cast<int>(dom.informable.size()); ++s) {
        for (int v = 0; v < static_cast<int>(dom.informable[s].values.size()); ++v, ++bit) {
            if (constraints[domain] & (1u << bit)) out.emplace_back(s, v);
        }
    }
    return out;
}

QueryFeature QueryFeature::empty(const DomainSchema& schema) {
    QueryFeature q;
    q.match_bucket.assign(schema.domains.size(), 0);
    q.booked.assign(schema.domains.size(), 0);
    return q;
}

StateLayout::StateLayout(const ActVocab& vocab) {
    user_dim = vocab.user_size();
    sys_dim = vocab.sys_size();
    const DomainSchema& schema = vocab.schema();
    for (const DomainDef& d : schema.domains) {
        for (const SlotDef& s : d.informable) {
            belief_constraint_dim += static_cast<int>(s.values.size());
        }
        belief_request_dim += static_cast<int>(d.requestable.size());
    }
    query_dim = 4 * static_cast<int>(schema.domains.size());
}

StateVector dst_encode(const ActVocab& vocab, const UserAction& user_action,
                       const SysAction& prev_sys_action, const BeliefState& belief,
                       const QueryFeature& query) {
    const StateLayout layout(vocab);
    const DomainSchema& schema = vocab.schema();
    if (belief.constraints.size() != schema.domains.size() ||
        query.match_bucket.size() != schema.domains.size()) {
        throw ShapeError("belief/query not sized for this schema");
    }

    StateVector x(layout.total(), 0.0);
    double* p = x.data();
    vocab.encode_multihot(user_action, std::span<double>(p, layout.user_dim));
    p += layout.user_dim;
    vocab.encode_multihot(prev_sys_action, std::span<double>(p, layout.sys_dim));
    p += layout.sys_dim;

    for (std::size_t d = 0; d < schema.domains.size(); ++d) {
        int bits = 0;
        for (const SlotDef& s : schema.domains[d].informable) {
            bits += static_cast<int>(s.values.size());
        }
        for (int b = 0; b < bits; ++b) {
            if (belief.constraints[d] & (1u << b)) p[b] = 1.0;
        }
        p += bits;
    }
    for (std::size_t d = 0; d < schema.domains.size(); ++d) {
        const int bits = static_cast<int>(schema.domains[d].requestable.size());
        for (int b = 0; b < bits; ++b) {
            if (belief.outstanding[d] & (1u << b)) p[b] = 1.0;
        }
        p += bits;
    }
    for (std::size_t d = 0; d < schema.domains.size(); ++d) {
        p[query.match_bucket[d]] = 1.0;
        if (query.booked[d]) p[3] = 1.0;
        p += 4;
    }
    return x;
}

void DialogLedger::reset(const DomainSchema& s, const Database& d, const ActVocab& v) {
    schema = &s;
    db = &d;
    vocab = &v;
    belief = BeliefState::empty(s);
    booked.assign(s.domains.size(), -1);
    answered.assign(s.domains.size(), 0);
    informed.assign(s.domains.size(), 0);
}

void DialogLedger::apply_user(const UserAction& a) {
    for (int idx : a.indices) {
        const UserAct act = vocab->decode_user(idx);
        switch (act.kind) {
        case UserActKind::inform_constraint:
            belief.constraints[act.domain] |=
                1u << constraint_bit(*schema, act.domain, act.slot, act.value);
            break;
        case UserActKind::request:
            if (!(answered[act.domain] & (1u << act.slot))) {
                belief.outstanding[act.domain] |= 1u << act.slot;
            }
            break;
        case UserActKind::bye:
            break;
        }
    }
}

void DialogLedger::apply_sys(const SysAction& a) {
    for (int idx : a.indices) {
        const SysAct act = vocab->decode_sys(idx);
        if (act.kind != SysActKind::book) continue;
        const int row = db->by_domain[act.domain][act.entity];
        const auto constraints = belief.constraint_list(*schema, act.domain);
        if (entity_matches(db->entities[row], constraints)) {
            booked[act.domain] = row;
        }
    }
    for (int idx : a.indices) {
        const SysAct act = vocab->decode_sys(idx);
        if (act.kind != SysActKind::inform) continue;
        informed[act.domain] |= 1u << act.slot;
        const int row = booked[act.domain];
        if (row >= 0 && db->entities[row].requestable_values[act.slot] == act.value) {
            answered[act.domain] |= 1u << act.slot;
            belief.outstanding[act.domain] &= ~(1u << act.slot);
        }
    }
}

int DialogLedger::match_count(int domain) const {
    if (belief.constraints[domain] == 0) return 0; // no query issued yet
    const auto constraints = belief.constraint_list(*schema, domain);
    int count = 0;
    for (int row : db->by_domain[domain]) {
        if (entity_matches(db->entities[row], constraints)) ++count;
    }
    return count;
}

QueryFeature DialogLedger::query() const {
    QueryFeature q = QueryFeature::empty(*schema);
    for (std::size_t d = 0; d < schema->domains.size(); ++d) {
        const int c = match_count(static_cast<int>(d));
        q.match_bucket[d] = c >= 2 ? 2 : c;
        q.booked[d] = booked[d] >= 0;
    }
    return q;
}

} // namespace vrb
