#pragma once

#include <cstdint>
#include <vector>

namespace cppless::bench {

// Counter-based RNG (splitmix-style finalizer over seed + counter steps).
// Pure: stream position is explicit, so distributed workers and a local loop
// draw bit-identical numbers. counter i yields the (i+1)-th splitmix output
// for the seed.
std::uint64_t counter_rand(std::uint64_t seed, std::uint64_t counter);

// Uniform double in [0, 1) from one counter_rand draw (53-bit mantissa).
double counter_uniform01(std::uint64_t seed, std::uint64_t counter);

// Monte-Carlo quarter-circle estimate over `samples` points; sample i draws
// counters 2i and 2i+1, so the result depends only on (samples, seed).
// Requires samples >= 1.
double pi_estimate(std::int64_t samples, std::uint64_t seed);

// All non-attacking placements of the first prefix_len rows of an N-queens
// board, in lexicographic column order. Each prefix holds one single-bit
// column mask per placed row. prefix_len == 0 yields one empty prefix.
// Requires 1 <= board_n <= 32 and 0 <= prefix_len <= board_n.
std::vector<std::vector<std::uint32_t>> enumerate_prefixes(std::uint32_t board_n,
                                                           std::uint32_t prefix_len);

// Completions of a (possibly empty) valid prefix via bitboard backtracking.
// An empty prefix counts the whole board. Throws ConfigError on a malformed
// or attacking prefix.
std::uint64_t count_solutions_from_prefix(std::uint32_t board_n,
                                          const std::vector<std::uint32_t>& prefix);

}  // namespace cppless::bench
