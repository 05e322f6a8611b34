#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cppless::emulator {

// Injected execution-duration schedule. When a function carries one, the
// platform sleeps the scheduled time, reports it as the invocation's
// duration verbatim (replacing measurement), and bills it — which is what
// makes timing-sensitive tests and cost totals reproducible.
class DelaySchedule {
 public:
  enum class Kind { fixed, uniform, list };

  static DelaySchedule fixed(double ms);
  static DelaySchedule uniform(double lo_ms, double hi_ms);
  static DelaySchedule list(std::vector<double> values_ms);

  Kind kind() const { return kind_; }

  // Duration for the arrival_index-th admitted invocation of the function.
  // uniform draws from rng; fixed/list ignore it.
  double next(std::uint64_t arrival_index, std::mt19937_64& rng) const;

  // Round-trips through parse_delay_schedule.
  std::string to_string() const;

 private:
  DelaySchedule(Kind kind, std::vector<double> values) : kind_(kind), values_(std::move(values)) {}

  Kind kind_;
  std::vector<double> values_;  // fixed: [ms]; uniform: [lo, hi]; list: entries
};

// "fixed:100" | "uniform:5,25" | "list:30,10,20"  (throws ConfigError)
DelaySchedule parse_delay_schedule(std::string_view text);

// "<function name>=<schedule>" as accepted on the command line; the name "*"
// applies to every function without its own schedule.
std::pair<std::string, DelaySchedule> parse_delay_flag(std::string_view text);

}  // namespace cppless::emulator
