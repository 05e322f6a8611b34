#pragma once

// Offloadable task bodies for the benchmark harness. Shared between the host
// binary and the worker flavor (single source), so capture layout and cloud
// names agree byte-for-byte.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cppless/bench/kernels.hpp"
#include "cppless/tasks/task.hpp"

namespace bench_tasks {

// Monte-Carlo worker: one independent slice of the sample budget, seeded so
// slice results are reproducible anywhere.
inline const auto pi_task = cppless::define_task<double(std::int64_t, std::uint64_t)>(
    "pi_task", CPLS_SITE(), cppless::FunctionConfig{}, {"samples", "seed"},
    [](std::int64_t samples, std::uint64_t seed) {
      return cppless::bench::pi_estimate(samples, seed);
    });

// Board-search worker: counts completions of one fixed queen prefix.
inline const auto nqueens_task =
    cppless::define_task<std::uint64_t(std::uint32_t, std::vector<std::uint32_t>)>(
        "nqueens_task", CPLS_SITE(), cppless::FunctionConfig{}, {"board_n", "prefix"},
        [](std::uint32_t board_n, std::vector<std::uint32_t> prefix) {
          return cppless::bench::count_solutions_from_prefix(board_n, prefix);
        });

// The integer-division shape of the classic sample-splitting example.
inline const auto ratio_task = cppless::define_task<std::int64_t(std::int64_t, std::int64_t)>(
    "ratio_task", CPLS_SITE(), cppless::FunctionConfig{}, {"n", "np"},
    [](std::int64_t n, std::int64_t np) { return n / np; });

// Plumbing target for delay-injection and smoke runs.
inline const auto echo_u32 = cppless::define_task<std::uint32_t(std::uint32_t)>(
    "echo_u32", CPLS_SITE(), cppless::FunctionConfig{}, {"v"},
    [](std::uint32_t v) { return v; });

// Deterministic failure for error-path runs.
inline const auto fail_task = cppless::define_task<std::uint64_t(std::string)>(
    "fail_task", CPLS_SITE(), cppless::FunctionConfig{}, {"why"},
    [](std::string why) -> std::uint64_t { throw std::runtime_error(why); });

}  // namespace bench_tasks
