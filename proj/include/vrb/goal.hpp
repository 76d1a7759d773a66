#pragma once

#include <utility>
#include <vector>

#include "vrb/rng.hpp"
#include "vrb/schema.hpp"

namespace vrb {

struct DomainGoal {
    std::vector<std::pair<int, int>> constraints; // (informable slot, value), slot-ordered
    std::vector<int> requests;                    // requestable slot ids, ordered
    bool active() const { return !constraints.empty() || !requests.empty(); }
};

struct UserGoal {
    std::vector<DomainGoal> domains; // one entry per schema domain; inactive = empty

    int active_count() const;
};

// Samples a satisfiable goal: constraint values are copied from a witness
// entity, so at least one database row matches every constrained domain.
// Every active domain gets at least one constraint and one request.
UserGoal sample_goal(const DomainSchema& schema, const Database& db, RngStream& rng);

bool goal_satisfiable(const DomainSchema& schema, const Database& db, const UserGoal& goal);

} // namespace vrb
