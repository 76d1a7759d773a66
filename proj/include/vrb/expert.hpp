#pragma once

#include "vrb/dialog_env.hpp"
#include "vrb/rng.hpp"

namespace vrb {

// Rule-based optimal system policy, used to generate the expert corpus. It
// only reads the observable dialog state (belief, query, booked flags, last
// actions) plus the database, never the user's goal or agenda:
//   - reply bye to a user bye;
//   - for a booked domain, answer outstanding requests from the booked row;
//   - for an unbooked constrained domain, request all unstated informable
//     slots; once a request round adds nothing new (or nothing is unstated),
//     book the first matching entity and answer outstanding requests.
SysAction expert_policy(const DialogEnv& env);

// Expert self-play corpus. Every session must end in success; a failure
// raises StateError since the expert is optimal on this environment.
std::vector<Session> generate_corpus(const DomainSchema& schema, const Database& db,
                                     const ActVocab& vocab, int n_sessions, RngStream& rng,
                                     EnvConfig cfg = {});

} // namespace vrb
