#pragma once

#include <span>
#include <string>
#include <vector>

#include "vrb/schema.hpp"

namespace vrb {

enum class SysActKind { inform, request, book, bye };
enum class UserActKind { inform_constraint, request, bye };

struct SysAct {
    SysActKind kind = SysActKind::bye;
    int domain = -1; // all kinds except bye
    int slot = -1;   // inform: requestable slot, request: informable slot
    int value = -1;  // inform: token index
    int entity = -1; // book: position in the domain's entity list
};

struct UserAct {
    UserActKind kind = UserActKind::bye;
    int domain = -1;
    int slot = -1;  // inform_constraint: informable, request: requestable
    int value = -1; // inform_constraint: value index
};

// Actions are sets of atomic acts, stored as sorted unique vocabulary
// indices. An empty action is only legal as the pre-dialog system action.
struct SysAction {
    std::vector<int> indices;
    bool empty() const { return indices.empty(); }
    bool contains(int idx) const;
    void add(int idx);
};

struct UserAction {
    std::vector<int> indices;
    bool empty() const { return indices.empty(); }
    bool contains(int idx) const;
    void add(int idx);
};

// Flattened act vocabulary derived from the schema and database. Layout,
// system side: per domain [request x informable][inform x requestable x token]
// [book x entity], then the global bye bit. User side: per domain
// [inform_constraint x informable x value][request x requestable], then bye.
class ActVocab {
public:
    ActVocab(const DomainSchema& schema, const Database& db);

    int sys_size() const { return sys_size_; }
    int user_size() const { return user_size_; }

    int sys_request(int domain, int informable_slot) const;
    int sys_inform(int domain, int requestable_slot, int value) const;
    int sys_book(int domain, int entity_local) const;
    int sys_bye() const { return sys_size_ - 1; }
    int user_inform(int domain, int informable_slot, int value) const;
    int user_request(int domain, int requestable_slot) const;
    int user_bye() const { return user_size_ - 1; }

    SysAct decode_sys(int index) const;
    UserAct decode_user(int index) const;

    // Symbolic forms, e.g. "request(restaurant,food)"; used by corpus files.
    std::string sys_name(int index) const;
    std::string user_name(int index) const;
    int parse_sys(const std::string& name) const;
    int parse_user(const std::string& name) const;

    void encode_multihot(const SysAction& a, std::span<double> out) const;
    void encode_multihot(const UserAction& a, std::span<double> out) const;

    const DomainSchema& schema() const { return *schema_; }
    const Database& db() const { return *db_; }

private:
    const DomainSchema* schema_;
    const Database* db_;
    int sys_size_ = 0;
    int user_size_ = 0;
    // per-domain segment offsets
    std::vector<int> sys_request_off_, sys_inform_off_, sys_book_off_;
    std::vector<int> user_inform_off_, user_request_off_;
    std::vector<SysAct> sys_table_;
    std::vector<UserAct> user_table_;
};

} // namespace vrb
