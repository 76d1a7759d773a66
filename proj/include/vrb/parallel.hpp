#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vrb {

// Every data-parallel kernel in the library takes an ExecMode. `serial` is
// the reference path; `parallel` runs the same per-item code under OpenMP.
// Kernels accumulate into fixed-size blocks that are combined in block order,
// so both modes produce bit-identical results for any thread count.
enum class ExecMode { serial, parallel };

inline constexpr std::size_t kParallelBlock = 16;

inline std::size_t block_count(std::size_t n, std::size_t block = kParallelBlock) {
    return (n + block - 1) / block;
}

// body(begin, end, block_index): processes items [begin, end).
template <typename Body>
void for_each_block(std::size_t n, ExecMode mode, Body&& body,
                    std::size_t block = kParallelBlock) {
    if (n == 0) return;
    const std::size_t nb = block_count(n, block);
#ifdef _OPENMP
    if (mode == ExecMode::parallel && nb > 1) {
        #pragma omp parallel for schedule(static)
        for (long long b = 0; b < static_cast<long long>(nb); ++b) {
            const std::size_t begin = static_cast<std::size_t>(b) * block;
            const std::size_t end = begin + block < n ? begin + block : n;
            body(begin, end, static_cast<std::size_t>(b));
        }
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t begin = b * block;
        const std::size_t end = begin + block < n ? begin + block : n;
        body(begin, end, b);
    }
}

// Per-item convenience wrapper.
template <typename Body>
void parallel_for(std::size_t n, ExecMode mode, Body&& body,
                  std::size_t block = kParallelBlock) {
    for_each_block(
        n, mode,
        [&](std::size_t begin, std::size_t end, std::size_t) {
            for (std::size_t i = begin; i < end; ++i) body(i);
        },
        block);
}

} // namespace vrb
