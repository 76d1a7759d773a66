#include "vrb/acts.hpp"

#include <algorithm>

#include "vrb/errors.hpp"

namespace vrb {

bool SysAction::contains(int idx) const {
    return std::binary_search(indices.begin(), indices.end(), idx);
}

void SysAction::add(int idx) {
    auto it = std::lower_bound(indices.begin(), indices.end(), idx);
    if (it == indices.end() || *it != idx) indices.insert(it, idx);
}

bool UserAction::contains(int idx) const {
    return std::binary_search(indices.begin(), indices.end(), idx);
}

void UserAction::add(int idx) {
    auto it = std::lower_bound(indices.begin(), indices.end(), idx);
    if (it == indices.end() || *it != idx) indices.insert(it, idx);
}

ActVocab::ActVocab(const DomainSchema& schema, const Database& db)
    : schema_(&schema), db_(&db) {
    schema.validate();
    for (std::size_t d = 0; d < schema.domains.size(); ++d) {
        const DomainDef& dom = schema.domains[d];
        sys_request_off_.push_back(sys_size_);
        for (std::size_t s = 0; s < dom.informable.size(); ++s) {
            sys_table_.push_back(SysAct{SysActKind::request, static_cast<int>(d),
                                        static_cast<int>(s), -1, -1});
            ++sys_size_;
        }
        sys_inform_off_.push_back(sys_size_);
        for (std::size_t s = 0; s < dom.requestable.size(); ++s) {
            for (std::size_t v = 0; v < dom.requestable[s].values.size(); ++v) {
                sys_table_.push_back(SysAct{SysActKind::inform, static_cast<int>(d),
                                            static_cast<int>(s), static_cast<int>(v), -1});
                ++sys_size_;
            }
        }
        sys_book_off_.push_back(sys_size_);
        for (std::size_t e = 0; e < db.by_domain[d].size(); ++e) {
            sys_table_.push_back(SysAct{SysActKind::book, static_cast<int>(d), -1, -1,
                                        static_cast<int>(e)});
            ++sys_size_;
        }

        user_inform_off_.push_back(user_size_);
        for (std::size_t s = 0; s < dom.informable.size(); ++s) {
            for (std::size_t v = 0; v < dom.informable[s].values.size(); ++v) {
                user_table_.push_back(UserAct{UserActKind::inform_constraint,
                                              static_cast<int>(d), static_cast<int>(s),
                                              static_cast<int>(v)});
                ++user_size_;
            }
        }
        user_request_off_.push_back(user_size_);
        for (std::size_t s = 0; s < dom.requestable.size(); ++s) {
            user_table_.push_back(UserAct{UserActKind::request, static_cast<int>(d),
                                          static_cast<int>(s), -1});
            ++user_size_;
        }
    }
    sys_table_.push_back(SysAct{SysActKind::bye, -1, -1, -1, -1});
    ++sys_size_;
    user_table_.push_back(UserAct{UserActKind::bye, -1, -1, -1});
    ++user_size_;
}

int ActVocab::sys_request(int domain, int informable_slot) const {
    return sys_request_off_[domain] + informable_slot;
}

int ActVocab::sys_inform(int domain, int requestable_slot, int value) const {
    int off = sys_inform_off_[domain];
    const DomainDef& dom = schema_->domains[domain];
    for (int s = 0; s < requestable_slot; ++s) {
        off += static_cast<int>(dom.requestable[s].values.size());
    }
    return off + value;
}

int ActVocab::sys_book(int domain, int entity_local) const {
    return sys_book_off_[domain] + entity_local;
}

int ActVocab::user_inform(int domain, int informable_slot, int value) const {
    int off = user_inform_off_[domain];
    const DomainDef& dom = schema_->domains[domain];
    for (int s = 0; s < informable_slot; ++s) {
        off += static_cast<int>(dom.informable[s].values.size());
    }
    return off + value;
}

int ActVocab::user_request(int domain, int requestable_slot) const {
    return user_request_off_[domain] + requestable_slot;
}

SysAct ActVocab::decode_sys(int index) const {
    if (index < 0 || index >= sys_size_) {
        throw ProtocolError("system act index out of range: " + std::to_string(index));
    }
    return sys_table_[index];
}

UserAct ActVocab::decode_user(int index) const {
    if (index < 0 || index >= user_size_) {
        throw ProtocolError("user act index out of range: " + std::to_string(index));
    }
    return user_table_[index];
}

std::string ActVocab::sys_name(int index) const {
    const SysAct a = decode_sys(index);
    switch (a.kind) {
    case SysActKind::bye:
        return "bye";
    case SysActKind::request:
        return "request(" + schema_->domains[a.domain].name + "," +
               schema_->domains[a.domain].informable[a.slot].name + ")";
    case SysActKind::inform: {
        const SlotDef& s = schema_->domains[a.domain].requestable[a.slot];
        return "inform(" + schema_->domains[a.domain].name + "," + s.name + "," +
               s.values[a.value] + ")";
    }
    case SysActKind::book: {
        const int ent = db_->by_domain[a.domain][a.entity];
        return "book(" + schema_->domains[a.domain].name + "," + db_->entities[ent].id + ")";
    }
    }
    throw ProtocolError("unreachable system act kind");
}

std::string ActVocab::user_name(int index) const {
    const UserAct a = decode_user(index);
    switch (a.kind) {
    case UserActKind::bye:
        return "bye";
    case UserActKind::inform_constraint: {
        const SlotDef& s = schema_->domains[a.domain].informable[a.slot];
        return "inform_constraint(" + schema_->domains[a.domain].name + "," + s.name + "," +
               s.values[a.value] + ")";
    }
    case UserActKind::request:
        return "request(" + schema_->domains[a.domain].name + "," +
               schema_->domains[a.domain].requestable[a.slot].name + ")";
    }
    throw ProtocolError("unreachable user act kind");
}

namespace {

// splits "kind(a,b,c)" into kind + args
bool parse_call(const std::string& name, std::string& kind, std::vector<std::string>& args) {
    const std::size_t open = name.find('(');
    if (open == std::string::npos) {
        kind = name;
        args.clear();
        return true;
    }
    if (name.back() != ')') return false;
    kind = name.substr(0, open);
    args.clear();
    std::string body = name.substr(open + 1, name.size() - open - 2);
    std::size_t pos = 0;
    while (pos != std::string::npos) {
        const std::size_t comma = body.find(',', pos);
        args.push_back(body.substr(pos, comma == std::string::npos ? comma : comma - pos));
        pos = comma == std::string::npos ? comma : comma + 1;
    }
    return true;
}

} // namespace

int ActVocab::parse_sys(const std::string& name) const {
    std::string kind;
    std::vector<std::string> args;
    if (!parse_call(name, kind, args)) throw ProtocolError("malformed act: " + name);
    if (kind == "bye" && args.empty()) return sys_bye();
    const int d = args.empty() ? -1 : schema_->domain_index(args[0]);
    if (d < 0) throw ProtocolError("unknown domain in act: " + name);
    const DomainDef& dom = schema_->domains[d];
    if (kind == "request" && args.size() == 2) {
        for (std::size_t s = 0; s < dom.informable.size(); ++s) {
            if (dom.informable[s].name == args[1]) return sys_request(d, static_cast<int>(s));
        }
    } else if (kind == "inform" && args.size() == 3) {
        for (std::size_t s = 0; s < dom.requestable.size(); ++s) {
            if (dom.requestable[s].name != args[1]) continue;
            for (std::size_t v = 0; v < dom.requestable[s].values.size(); ++v) {
                if (dom.requestable[s].values[v] == args[2]) {
                    return sys_inform(d, static_cast<int>(s), static_cast<int>(v));
                }
            }
        }
    } else if (kind == "book" && args.size() == 2) {
        for (std::size_t e = 0; e < db_->by_domain[d].size(); ++e) {
            if (db_->entities[db_->by_domain[d][e]].id == args[1]) {
                return sys_book(d, static_cast<int>(e));
            }
        }
    }
    throw ProtocolError("unknown system act: " + name);
}

int ActVocab::parse_user(const std::string& name) const {
    std::string kind;
    std::vector<std::string> args;
    if (!parse_call(name, kind, args)) throw ProtocolError("malformed act: " + name);
    if (kind == "bye" && args.empty()) return user_bye();
    const int d = args.empty() ? -1 : schema_->domain_index(args[0]);
    if (d < 0) throw ProtocolError("unknown domain in act: " + name);
    const DomainDef& dom = schema_->domains[d];
    if (kind == "inform_constraint" && args.size() == 3) {
        for (std::size_t s = 0; s < dom.informable.size(); ++s) {
            if (dom.informable[s].name != args[1]) continue;
            for (std::size_t v = 0; v < dom.informable[s].values.size(); ++v) {
                if (dom.informable[s].values[v] == args[2]) {
                    return user_inform(d, static_cast<int>(s), static_cast<int>(v));
                }
            }
        }
    } else if (kind == "request" && args.size() == 2) {
        for (std::size_t s = 0; s < dom.requestable.size(); ++s) {
            if (dom.requestable[s].name == args[1]) return user_request(d, static_cast<int>(s));
        }
    }
    throw ProtocolError("unknown user act: " + name);
}

void ActVocab::encode_multihot(const SysAction& a, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(sys_size_)) {
        throw ShapeError("system multi-hot length " + std::to_string(out.size()) +
                         " != vocabulary size " + std::to_string(sys_size_));
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (int idx : a.indices) {
        decode_sys(idx); // range check
        out[idx] = 1.0;
    }
}

void ActVocab::encode_multihot(const UserAction& a, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(user_size_)) {
        throw ShapeError("user multi-hot length " + std::to_string(out.size()) +
                         " != vocabulary size " + std::to_string(user_size_));
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (int idx : a.indices) {
        decode_user(idx);
        out[idx] = 1.0;
    }
}

} // namespace vrb
