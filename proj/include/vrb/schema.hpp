#pragma once

#include <string>
#include <utility>
#include <vector>

namespace vrb {

struct SlotDef {
    std::string name;
    std::vector<std::string> values; // finite ordered value set
};

struct DomainDef {
    std::string name;
    std::vector<SlotDef> informable;
    std::vector<SlotDef> requestable; // requestable slots carry token pools too,
                                      // so the act vocabulary derives from the schema alone
    bool requires_booking = true;
};

struct DomainSchema {
    std::vector<DomainDef> domains;

    void validate() const; // unique names, non-empty value sets
    int domain_index(const std::string& name) const;
};

struct Entity {
    std::string id;
    int domain = 0;
    std::vector<int> informable_values; // value index per informable slot
    std::vector<int> requestable_values;
};

struct Database {
    std::vector<Entity> entities;
    std::vector<std::vector<int>> by_domain; // entity indices per domain, file order

    void index(const DomainSchema& schema); // builds by_domain, validates entities
    const Entity& entity(int idx) const { return entities[idx]; }
};

// Built-in desk-scale world: 2 domains x 3 informable slots (4 values each)
// x 2 requestable slots, 20 entities per domain, both domains bookable.
DomainSchema toy_schema();
Database toy_database(const DomainSchema& schema);

// Flat dotted-key text format, shared with the run configuration files.
void save_schema(const DomainSchema& schema, const Database& db, const std::string& path);
std::pair<DomainSchema, Database> load_schema(const std::string& path);

// Stable digest over the canonical serialization; stored in corpus and
// checkpoint files for compatibility checks.
std::string schema_hash(const DomainSchema& schema, const Database& db);

// True when the entity satisfies every (slot, value) pair.
bool entity_matches(const Entity& e, const std::vector<std::pair<int, int>>& constraints);

} // namespace vrb
