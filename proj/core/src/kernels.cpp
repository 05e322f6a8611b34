#include "cppless/bench/kernels.hpp"

#include <string>

#include "cppless/error.hpp"

namespace cppless::bench {

std::uint64_t counter_rand(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t x = seed + (counter + 1) * 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double counter_uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(counter_rand(seed, counter) >> 11) * 0x1.0p-53;
}

double pi_estimate(std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw ConfigError("pi_estimate requires at least one sample");
  std::int64_t inside = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double x = counter_uniform01(seed, 2 * static_cast<std::uint64_t>(i));
    const double y = counter_uniform01(seed, 2 * static_cast<std::uint64_t>(i) + 1);
    if (x * x + y * y <= 1.0) ++inside;
  }
  return 4.0 * static_cast<double>(inside) / static_cast<double>(samples);
}

namespace {

// Bitboard backtracking: cols tracks used columns, ld/rd the diagonal rays
// shifted one row ahead. mask covers the board width.
std::uint64_t solve(std::uint32_t mask, std::uint32_t cols, std::uint32_t ld, std::uint32_t rd) {
  if (cols == mask) return 1;
  std::uint64_t found = 0;
  std::uint32_t avail = mask & ~(cols | ld | rd);
  while (avail != 0) {
    const std::uint32_t bit = avail & (~avail + 1);
    avail ^= bit;
    found += solve(mask, cols | bit, (ld | bit) << 1, (rd | bit) >> 1);
  }
  return found;
}

void check_board(std::uint32_t board_n) {
  if (board_n < 1 || board_n > 32) {
    throw ConfigError("board size must be in [1, 32], got " + std::to_string(board_n));
  }
}

void enumerate(std::uint32_t mask, std::uint32_t remaining, std::uint32_t cols, std::uint32_t ld,
               std::uint32_t rd, std::vector<std::uint32_t>& current,
               std::vector<std::vector<std::uint32_t>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  std::uint32_t avail = mask & ~(cols | ld | rd);
  while (avail != 0) {
    const std::uint32_t bit = avail & (~avail + 1);
    avail ^= bit;
    current.push_back(bit);
    enumerate(mask, remaining - 1, cols | bit, (ld | bit) << 1, (rd | bit) >> 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> enumerate_prefixes(std::uint32_t board_n,
                                                           std::uint32_t prefix_len) {
  check_board(board_n);
  if (prefix_len > board_n) {
    throw ConfigError("prefix length " + std::to_string(prefix_len) + " exceeds board size " +
                      std::to_string(board_n));
  }
  const std::uint32_t mask =
      board_n == 32 ? 0xFFFFFFFFu : ((1u << board_n) - 1u);
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> current;
  enumerate(mask, prefix_len, 0, 0, 0, current, out);
  return out;
}

std::uint64_t count_solutions_from_prefix(std::uint32_t board_n,
                                          const std::vector<std::uint32_t>& prefix) {
  check_board(board_n);
  if (prefix.size() > board_n) {
    throw ConfigError("prefix longer than the board");
  }
  const std::uint32_t mask =
      board_n == 32 ? 0xFFFFFFFFu : ((1u << board_n) - 1u);
  std::uint32_t cols = 0, ld = 0, rd = 0;
  for (std::size_t row = 0; row < prefix.size(); ++row) {
    const std::uint32_t bit = prefix[row];
    if (bit == 0 || (bit & (bit - 1)) != 0 || (bit & ~mask) != 0) {
      throw ConfigError("prefix row " + std::to_string(row) +
                        " is not a single on-board column bit");
    }
    if ((bit & (cols | ld | rd)) != 0) {
      throw ConfigError("prefix row " + std::to_string(row) + " attacks an earlier queen");
    }
    cols |= bit;
    ld = (ld | bit) << 1;
    rd = (rd | bit) >> 1;
  }
  return solve(mask, cols, ld, rd);
}

}  // namespace cppless::bench
