#pragma once

#include "vrb/estimator.hpp"
#include "vrb/ppo.hpp"
#include "vrb/train_config.hpp"

namespace vrb {

// Complete resumable training state. Serialized as a versioned binary
// container: magic "VRBC", format version, CRC32 checksum, then
// length-prefixed named sections (strings and f64 arrays). Doubles are
// stored bit-exactly, so save/load/resume reproduces training byte for
// byte. Draw streams are derived from (seed, iteration), so those two
// scalars are the whole RNG state.
struct Checkpoint {
    std::uint32_t version = 1;
    std::uint64_t seed = 0;
    std::uint64_t iteration = 0;
    double phi = 0.0;
    std::string schema_hash;
    TrainVariant variant = TrainVariant::vrb;

    PolicyParams policy;
    ValueParams value;
    EstimatorModel estimator;
    PolicyOptimizer pol_opt;
    EstimatorOptimizer est_opt;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace vrb
