#include "vrb/schema.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vrb/errors.hpp"
#include "vrb/rng.hpp"

namespace vrb {

void DomainSchema::validate() const {
    if (domains.empty()) throw ConfigError("schema has no domains");
    std::set<std::string> dnames;
    for (const DomainDef& d : domains) {
        if (!dnames.insert(d.name).second) {
            throw ConfigError("duplicate domain name: " + d.name);
        }
        std::set<std::string> snames;
        std::size_t constraint_bits = 0;
        for (const SlotDef& s : d.informable) {
            if (!snames.insert(s.name).second) {
                throw ConfigError("duplicate slot name in " + d.name + ": " + s.name);
            }
            if (s.values.empty()) {
                throw ConfigError("empty value set for slot " + d.name + "." + s.name);
            }
            std::set<std::string> vnames(s.values.begin(), s.values.end());
            if (vnames.size() != s.values.size()) {
                throw ConfigError("duplicate values for slot " + d.name + "." + s.name);
            }
            constraint_bits += s.values.size();
        }
        // belief state uses one 32-bit mask per domain
        if (constraint_bits > 32) {
            throw ConfigError("domain " + d.name + " has " + std::to_string(constraint_bits) +
                              " (slot, value) pairs; at most 32 are supported");
        }
        if (d.requestable.size() > 32) {
            throw ConfigError("domain " + d.name + " has more than 32 requestable slots");
        }
        for (const SlotDef& s : d.requestable) {
            if (!snames.insert(s.name).second) {
                throw ConfigError("duplicate slot name in " + d.name + ": " + s.name);
            }
            if (s.values.empty()) {
                throw ConfigError("empty value set for slot " + d.name + "." + s.name);
            }
        }
    }
}

int DomainSchema::domain_index(const std::string& name) const {
    for (std::size_t i = 0; i < domains.size(); ++i) {
        if (domains[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

void Database::index(const DomainSchema& schema) {
    by_domain.assign(schema.domains.size(), {});
    std::set<std::string> ids;
    for (std::size_t i = 0; i < entities.size(); ++i) {
        const Entity& e = entities[i];
        if (!ids.insert(e.id).second) throw ConfigError("duplicate entity id: " + e.id);
        if (e.domain < 0 || e.domain >= static_cast<int>(schema.domains.size())) {
            throw ConfigError("entity " + e.id + " references unknown domain");
        }
        const DomainDef& d = schema.domains[e.domain];
        if (e.informable_values.size() != d.informable.size() ||
            e.requestable_values.size() != d.requestable.size()) {
            throw ConfigError("entity " + e.id + " is not fully specified for domain " + d.name);
        }
        for (std::size_t s = 0; s < d.informable.size(); ++s) {
            const int v = e.informable_values[s];
            if (v < 0 || v >= static_cast<int>(d.informable[s].values.size())) {
                throw ConfigError("entity " + e.id + " has out-of-range value for slot " +
                                  d.informable[s].name);
            }
        }
        for (std::size_t s = 0; s < d.requestable.size(); ++s) {
            const int v = e.requestable_values[s];
            if (v < 0 || v >= static_cast<int>(d.requestable[s].values.size())) {
                throw ConfigError("entity " + e.id + " has out-of-range value for slot " +
                                  d.requestable[s].name);
            }
        }
        by_domain[e.domain].push_back(static_cast<int>(i));
    }
    for (std::size_t d = 0; d < by_domain.size(); ++d) {
        if (by_domain[d].empty()) {
            throw ConfigError("database has no entities for domain " + schema.domains[d].name);
        }
    }
}

bool entity_matches(const Entity& e, const std::vector<std::pair<int, int>>& constraints) {
    for (const auto& [slot, value] : constraints) {
        if (e.informable_values[slot] != value) return false;
    }
    return true;
}

DomainSchema toy_schema() {
    DomainSchema s;
    DomainDef restaurant;
    restaurant.name = "restaurant";
    restaurant.informable = {
        {"food", {"thai", "chinese", "cuban", "indian"}},
        {"area", {"north", "south", "east", "west"}},
        {"price", {"cheap", "moderate", "expensive", "luxury"}},
    };
    restaurant.requestable = {
        {"phone", {"p0", "p1", "p2", "p3"}},
        {"address", {"a0", "a1", "a2", "a3"}},
    };
    restaurant.requires_booking = true;

    DomainDef hotel;
    hotel.name = "hotel";
    hotel.informable = {
        {"stars", {"one", "two", "three", "four"}},
        {"area", {"north", "south", "east", "west"}},
        {"price", {"cheap", "moderate", "expensive", "luxury"}},
    };
    hotel.requestable = {
        {"phone", {"q0", "q1", "q2", "q3"}},
        {"postcode", {"z0", "z1", "z2", "z3"}},
    };
    hotel.requires_booking = true;

    s.domains = {restaurant, hotel};
    s.validate();
    return s;
}

Database toy_database(const DomainSchema& schema) {
    // Fixed generation seed: the toy database is one well-defined object.
    RngStream rng(0x70f0u, 0);
    Database db;
    const int per_domain = 20;
    for (std::size_t d = 0; d < schema.domains.size(); ++d) {
        const DomainDef& dom = schema.domains[d];
        // distinct informable assignments per domain
        std::set<std::vector<int>> used;
        for (int k = 0; k < per_domain; ++k) {
            Entity e;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%c%02d", dom.name[0], k);
            e.id = buf;
            e.domain = static_cast<int>(d);
            do {
                e.informable_values.clear();
                for (const SlotDef& s : dom.informable) {
                    e.informable_values.push_back(static_cast<int>(rng.index(s.values.size())));
                }
            } while (!used.insert(e.informable_values).second);
            for (const SlotDef& s : dom.requestable) {
                e.requestable_values.push_back(static_cast<int>(rng.index(s.values.size())));
            }
            db.entities.push_back(std::move(e));
        }
    }
    db.index(schema);
    return db;
}

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string canonical_text(const DomainSchema& schema, const Database& db) {
    std::ostringstream os;
    for (const DomainDef& d : schema.domains) {
        os << "domain." << d.name << ".booking = " << (d.requires_booking ? "true" : "false")
           << "\n";
        for (const SlotDef& s : d.informable) {
            os << "domain." << d.name << ".informable." << s.name << " = " << join(s.values, " ")
               << "\n";
        }
        for (const SlotDef& s : d.requestable) {
            os << "domain." << d.name << ".requestable." << s.name << " = " << join(s.values, " ")
               << "\n";
        }
    }
    for (const Entity& e : db.entities) {
        const DomainDef& d = schema.domains[e.domain];
        os << "entity." << e.id << ".domain = " << d.name << "\n";
        std::vector<std::string> vals;
        for (std::size_t s = 0; s < d.informable.size(); ++s) {
            vals.push_back(d.informable[s].values[e.informable_values[s]]);
        }
        for (std::size_t s = 0; s < d.requestable.size(); ++s) {
            vals.push_back(d.requestable[s].values[e.requestable_values[s]]);
        }
        os << "entity." << e.id << ".values = " << join(vals, " ") << "\n";
    }
    return os.str();
}

} // namespace

void save_schema(const DomainSchema& schema, const Database& db, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open schema file for writing: " + path);
    out << "# dialog world definition\n" << canonical_text(schema, db);
    if (!out) throw IoError("failed writing schema file: " + path);
}

std::pair<DomainSchema, Database> load_schema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open schema file: " + path);

    // key -> value, insertion-ordered per section
    DomainSchema schema;
    Database db;
    std::map<std::string, int> domain_ids;
    struct PendingEntity {
        std::string id;
        std::string domain;
        std::vector<std::string> values;
        bool has_values = false;
    };
    std::vector<PendingEntity> pending;
    std::map<std::string, std::size_t> pending_ids;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const std::size_t b = s.find_first_not_of(" \t\r\n");
            const std::size_t e = s.find_last_not_of(" \t\r\n");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);

        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos != std::string::npos) {
            const std::size_t dot = key.find('.', pos);
            parts.push_back(key.substr(pos, dot == std::string::npos ? dot : dot - pos));
            pos = dot == std::string::npos ? dot : dot + 1;
        }

        if (parts.size() >= 2 && parts[0] == "domain") {
            const std::string& dname = parts[1];
            if (domain_ids.find(dname) == domain_ids.end()) {
                domain_ids[dname] = static_cast<int>(schema.domains.size());
                schema.domains.push_back(DomainDef{dname, {}, {}, true});
            }
            DomainDef& dom = schema.domains[domain_ids[dname]];
            if (parts.size() == 3 && parts[2] == "booking") {
                dom.requires_booking = value == "true";
            } else if (parts.size() == 4 && parts[2] == "informable") {
                dom.informable.push_back(SlotDef{parts[3], split_ws(value)});
            } else if (parts.size() == 4 && parts[2] == "requestable") {
                dom.requestable.push_back(SlotDef{parts[3], split_ws(value)});
            } else {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
            }
        } else if (parts.size() == 3 && parts[0] == "entity") {
            const std::string& id = parts[1];
            if (pending_ids.find(id) == pending_ids.end()) {
                pending_ids[id] = pending.size();
                pending.push_back(PendingEntity{id, "", {}, false});
            }
            PendingEntity& pe = pending[pending_ids[id]];
            if (parts[2] == "domain") {
                pe.domain = value;
            } else if (parts[2] == "values") {
                pe.values = split_ws(value);
                pe.has_values = true;
            } else {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
            }
        } else {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key " + key);
        }
    }
    schema.validate();

    for (const PendingEntity& pe : pending) {
        const int d = schema.domain_index(pe.domain);
        if (d < 0) throw ConfigError("entity " + pe.id + " references unknown domain " + pe.domain);
        const DomainDef& dom = schema.domains[d];
        if (!pe.has_values ||
            pe.values.size() != dom.informable.size() + dom.requestable.size()) {
            throw ConfigError("entity " + pe.id + " has wrong value count");
        }
        Entity e;
        e.id = pe.id;
        e.domain = d;
        std::size_t k = 0;
        for (const SlotDef& s : dom.informable) {
            int idx = -1;
            for (std::size_t v = 0; v < s.values.size(); ++v) {
                if (s.values[v] == pe.values[k]) idx = static_cast<int>(v);
            }
            if (idx < 0) {
                throw ConfigError("entity " + pe.id + ": unknown value " + pe.values[k] +
                                  " for slot " + s.name);
            }
            e.informable_values.push_back(idx);
            ++k;
        }
        for (const SlotDef& s : dom.requestable) {
            int idx = -1;
            for (std::size_t v = 0; v < s.values.size(); ++v) {
                if (s.values[v] == pe.values[k]) idx = static_cast<int>(v);
            }
            if (idx < 0) {
                throw ConfigError("entity " + pe.id + ": unknown value " + pe.values[k] +
                                  " for slot " + s.name);
            }
            e.requestable_values.push_back(idx);
            ++k;
        }
        db.entities.push_back(std::move(e));
    }
    db.index(schema);
    return {std::move(schema), std::move(db)};
}

std::string schema_hash(const DomainSchema& schema, const Database& db) {
    // FNV-1a 64 over the canonical serialization
    const std::string text = canonical_text(schema, db);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace vrb
