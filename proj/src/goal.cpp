#include "vrb/goal.hpp"

#include <algorithm>

#include "vrb/errors.hpp"

namespace vrb {

int UserGoal::active_count() const {
    int n = 0;
    for (const DomainGoal& d : domains) {
        if (d.active()) ++n;
    }
    return n;
}

UserGoal sample_goal(const DomainSchema& schema, const Database& db, RngStream& rng) {
    if (db.by_domain.size() != schema.domains.size()) {
        throw ConfigError("database not indexed against this schema");
    }
    const std::size_t nd = schema.domains.size();
    UserGoal goal;
    goal.domains.resize(nd);

    std::vector<char> active(nd, 0);
    if (nd == 1) {
        active[0] = 1;
    } else {
        // single-domain goals are common, full multi-domain ones less so
        const double r = rng.uniform01();
        if (r < 0.7) {
            active[rng.index(nd)] = 1;
        } else {
            for (std::size_t d = 0; d < nd; ++d) active[d] = 1;
        }
    }

    for (std::size_t d = 0; d < nd; ++d) {
        if (!active[d]) continue;
        const DomainDef& dom = schema.domains[d];
        const std::vector<int>& rows = db.by_domain[d];
        const Entity& witness = db.entities[rows[rng.index(rows.size())]];

        const std::size_t n_slots = dom.informable.size();
        const std::size_t n_constraints = 1 + rng.index(n_slots);
        std::vector<int> slots(n_slots);
        for (std::size_t s = 0; s < n_slots; ++s) slots[s] = static_cast<int>(s);
        rng.shuffle(slots);
        slots.resize(n_constraints);
        std::sort(slots.begin(), slots.end());
        for (int s : slots) {
            goal.domains[d].constraints.emplace_back(s, witness.informable_values[s]);
        }

        const std::size_t n_req = dom.requestable.size();
        const std::size_t n_requests = 1 + rng.index(n_req);
        std::vector<int> reqs(n_req);
        for (std::size_t s = 0; s < n_req; ++s) reqs[s] = static_cast<int>(s);
        rng.shuffle(reqs);
        reqs.resize(n_requests);
        std::sort(reqs.begin(), reqs.end());
        goal.domains[d].requests = reqs;
    }
    return goal;
}

bool goal_satisfiable(const DomainSchema& schema, const Database& db, const UserGoal& goal) {
    for (std::size_t d = 0; d < schema.domains.size(); ++d) {
        const DomainGoal& g = goal.domains[d];
        if (g.constraints.empty()) continue;
        bool any = false;
        for (int row : db.by_domain[d]) {
            if (entity_matches(db.entities[row], g.constraints)) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    return true;
}

} // namespace vrb
