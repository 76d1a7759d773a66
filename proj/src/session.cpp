#include "vrb/session.hpp"

#include <fstream>

#include <json.hpp>

#include "vrb/errors.hpp"

namespace vrb {

using ordered_json = nlohmann::ordered_json;

void replay_session_states(const ActVocab& vocab, Session& session) {
    DialogLedger ledger;
    ledger.reset(vocab.schema(), vocab.db(), vocab);
    SysAction prev;
    for (std::size_t t = 0; t < session.turns.size(); ++t) {
        Turn& turn = session.turns[t];
        ledger.apply_user(turn.user);
        turn.state_before = dst_encode(vocab, turn.user, prev, ledger.belief, ledger.query());
        ledger.apply_sys(turn.sys);
        prev = turn.sys;
        const bool last = t + 1 == session.turns.size();
        if (last) {
            // terminal successor: the user has nothing left to say
            UserAction closing;
            if (turn.sys.contains(vocab.sys_bye()) &&
                !turn.user.contains(vocab.user_bye())) {
                closing.add(vocab.user_bye());
            }
            turn.state_after =
                dst_encode(vocab, closing, prev, ledger.belief, ledger.query());
        } else {
            Turn& next = session.turns[t + 1];
            DialogLedger peek = ledger;
            peek.apply_user(next.user);
            turn.state_after =
                dst_encode(vocab, next.user, prev, peek.belief, peek.query());
        }
    }
}

namespace {

ordered_json goal_to_json(const ActVocab& vocab, const UserGoal& goal) {
    const DomainSchema& schema = vocab.schema();
    ordered_json out = ordered_json::object();
    for (std::size_t d = 0; d < goal.domains.size(); ++d) {
        const DomainGoal& g = goal.domains[d];
        if (!g.active()) continue;
        const DomainDef& dom = schema.domains[d];
        ordered_json jd = ordered_json::object();
        ordered_json constraints = ordered_json::array();
        for (const auto& [slot, value] : g.constraints) {
            constraints.push_back(
                {dom.informable[slot].name, dom.informable[slot].values[value]});
        }
        ordered_json requests = ordered_json::array();
        for (int slot : g.requests) requests.push_back(dom.requestable[slot].name);
        jd["constraints"] = constraints;
        jd["requests"] = requests;
        out[dom.name] = jd;
    }
    return out;
}

UserGoal goal_from_json(const ActVocab& vocab, const ordered_json& j) {
    const DomainSchema& schema = vocab.schema();
    UserGoal goal;
    goal.domains.resize(schema.domains.size());
    for (auto it = j.begin(); it != j.end(); ++it) {
        const int d = schema.domain_index(it.key());
        if (d < 0) throw IntegrityError("corpus goal references unknown domain " + it.key());
        const DomainDef& dom = schema.domains[d];
        for (const auto& c : it.value().at("constraints")) {
            const std::string slot_name = c.at(0);
            const std::string value_name = c.at(1);
            int slot = -1, value = -1;
            for (std::size_t s = 0; s < dom.informable.size(); ++s) {
                if (dom.informable[s].name != slot_name) continue;
                slot = static_cast<int>(s);
                for (std::size_t v = 0; v < dom.informable[s].values.size(); ++v) {
                    if (dom.informable[s].values[v] == value_name) value = static_cast<int>(v);
                }
            }
            if (slot < 0 || value < 0) {
                throw IntegrityError("corpus goal has unknown constraint " + slot_name + "=" +
                                     value_name);
            }
            goal.domains[d].constraints.emplace_back(slot, value);
        }
        for (const auto& r : it.value().at("requests")) {
            const std::string slot_name = r;
            int slot = -1;
            for (std::size_t s = 0; s < dom.requestable.size(); ++s) {
                if (dom.requestable[s].name == slot_name) slot = static_cast<int>(s);
            }
            if (slot < 0) throw IntegrityError("corpus goal has unknown request " + slot_name);
            goal.domains[d].requests.push_back(slot);
        }
    }
    return goal;
}

const char* status_name(TerminalStatus s) {
    switch (s) {
    case TerminalStatus::success:
        return "success";
    case TerminalStatus::failure:
        return "failure";
    default:
        return "ongoing";
    }
}

TerminalStatus status_from_name(const std::string& s) {
    if (s == "success") return TerminalStatus::success;
    if (s == "failure") return TerminalStatus::failure;
    if (s == "ongoing") return TerminalStatus::ongoing;
    throw IntegrityError("corpus has unknown terminal status: " + s);
}

} // namespace

void save_corpus(const std::vector<Session>& sessions, const ActVocab& vocab,
                 const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open corpus file for writing: " + path);

    ordered_json header;
    header["schema_hash"] = schema_hash(vocab.schema(), vocab.db());
    header["sessions"] = sessions.size();
    out << header.dump() << "\n";

    for (const Session& s : sessions) {
        ordered_json j;
        j["goal"] = goal_to_json(vocab, s.goal);
        ordered_json turns = ordered_json::array();
        for (const Turn& t : s.turns) {
            ordered_json jt;
            ordered_json user = ordered_json::array();
            for (int idx : t.user.indices) user.push_back(vocab.user_name(idx));
            ordered_json sys = ordered_json::array();
            for (int idx : t.sys.indices) sys.push_back(vocab.sys_name(idx));
            jt["user"] = user;
            jt["sys"] = sys;
            turns.push_back(jt);
        }
        j["turns"] = turns;
        j["t_u"] = status_name(s.t_u);
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("failed writing corpus file: " + path);
}

std::vector<Session> load_corpus(const ActVocab& vocab, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IntegrityError("corpus file is empty: " + path);
    ordered_json header;
    try {
        header = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw IntegrityError("corpus header is not valid JSON: " + std::string(e.what()));
    }
    const std::string expect = schema_hash(vocab.schema(), vocab.db());
    const std::string got = header.value("schema_hash", "");
    if (got != expect) {
        throw ConfigError("corpus schema hash " + got + " does not match environment " + expect);
    }

    std::vector<Session> sessions;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw IntegrityError("corpus line " + std::to_string(lineno) +
                                 " is not valid JSON: " + std::string(e.what()));
        }
        Session s;
        s.goal = goal_from_json(vocab, j.at("goal"));
        for (const auto& jt : j.at("turns")) {
            Turn t;
            for (const auto& name : jt.at("user")) t.user.add(vocab.parse_user(name));
            for (const auto& name : jt.at("sys")) t.sys.add(vocab.parse_sys(name));
            s.turns.push_back(std::move(t));
        }
        s.t_u = status_from_name(j.at("t_u"));
        replay_session_states(vocab, s);
        sessions.push_back(std::move(s));
    }
    return sessions;
}

} // namespace vrb
