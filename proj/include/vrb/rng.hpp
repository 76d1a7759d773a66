#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace vrb {

namespace detail {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Combines identifiers into a stream id. Used to carve independent streams
// out of one experiment seed: stream_key(kind, iteration, episode).
inline std::uint64_t stream_key(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t k = detail::mix64(a + 0x9e3779b97f4a7c15ULL);
    k = detail::mix64(k ^ (b + 0xd1b54a32d192ed03ULL));
    k = detail::mix64(k ^ (c + 0x8cb92ba72f3d8dd7ULL));
    return k;
}

// Deterministic counter-based stream: identical (seed, stream_id) always
// produce the identical draw sequence on every platform; distinct stream ids
// give decorrelated sequences. No global state anywhere.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        state_ = detail::mix64(seed ^ detail::mix64(stream_id + 0x9e3779b97f4a7c15ULL));
        if (state_ == 0) state_ = 0x6a09e667f3bcc909ULL;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Derived stream, independent of this one and of siblings with other ids.
    RngStream substream(std::uint64_t id) const {
        return RngStream(seed_, stream_key(stream_id_, id));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Standard normal via Box-Muller; second value of each pair is cached.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform01(); // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

    // Uniform integer in [0, n); rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace vrb
