#include "cppless/emulator/delay.hpp"

#include <sstream>

#include "cppless/error.hpp"

namespace cppless::emulator {

namespace {

double parse_ms(std::string_view part, std::string_view whole) {
  try {
    std::size_t used = 0;
    std::string s(part);
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    if (v < 0.0) throw ConfigError("delay must be non-negative in \"" + std::string(whole) + "\"");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("bad delay number \"" + std::string(part) + "\" in \"" + std::string(whole) +
                      "\"");
  }
}

std::vector<double> parse_ms_csv(std::string_view csv, std::string_view whole) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto comma = csv.find(',', start);
    auto part = csv.substr(start, comma == std::string_view::npos ? csv.size() - start
                                                                  : comma - start);
    out.push_back(parse_ms(part, whole));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

DelaySchedule DelaySchedule::fixed(double ms) {
  if (ms < 0.0) throw ConfigError("fixed delay must be non-negative");
  return DelaySchedule(Kind::fixed, {ms});
}

DelaySchedule DelaySchedule::uniform(double lo_ms, double hi_ms) {
  if (lo_ms < 0.0 || hi_ms < lo_ms) {
    throw ConfigError("uniform delay needs 0 <= lo <= hi");
  }
  return DelaySchedule(Kind::uniform, {lo_ms, hi_ms});
}

DelaySchedule DelaySchedule::list(std::vector<double> values_ms) {
  if (values_ms.empty()) throw ConfigError("list delay needs at least one value");
  for (double v : values_ms) {
    if (v < 0.0) throw ConfigError("list delay values must be non-negative");
  }
  return DelaySchedule(Kind::list, std::move(values_ms));
}

double DelaySchedule::next(std::uint64_t arrival_index, std::mt19937_64& rng) const {
  switch (kind_) {
    case Kind::fixed:
      return values_[0];
    case Kind::uniform: {
      std::uniform_real_distribution<double> dist(values_[0], values_[1]);
      return dist(rng);
    }
    case Kind::list:
      return values_[arrival_index % values_.size()];
  }
  return 0.0;
}

std::string DelaySchedule::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::fixed:
      os << "fixed:" << values_[0];
      break;
    case Kind::uniform:
      os << "uniform:" << values_[0] << "," << values_[1];
      break;
    case Kind::list:
      os << "list:";
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i > 0) os << ",";
        os << values_[i];
      }
      break;
  }
  return os.str();
}

DelaySchedule parse_delay_schedule(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("delay schedule \"" + std::string(text) +
                      "\" needs the form kind:values (fixed:100, uniform:5,25 or list:30,10,20)");
  }
  auto kind = text.substr(0, colon);
  auto rest = text.substr(colon + 1);
  if (rest.empty()) throw ConfigError("delay schedule \"" + std::string(text) + "\" has no values");

  if (kind == "fixed") {
    auto values = parse_ms_csv(rest, text);
    if (values.size() != 1) {
      throw ConfigError("fixed delay takes exactly one value, got \"" + std::string(text) + "\"");
    }
    return DelaySchedule::fixed(values[0]);
  }
  if (kind == "uniform") {
    auto values = parse_ms_csv(rest, text);
    if (values.size() != 2) {
      throw ConfigError("uniform delay takes lo,hi — got \"" + std::string(text) + "\"");
    }
    return DelaySchedule::uniform(values[0], values[1]);
  }
  if (kind == "list") {
    return DelaySchedule::list(parse_ms_csv(rest, text));
  }
  throw ConfigError("unknown delay kind \"" + std::string(kind) +
                    "\" (expected fixed, uniform or list)");
}

std::pair<std::string, DelaySchedule> parse_delay_flag(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("delay flag \"" + std::string(text) + "\" needs the form name=schedule");
  }
  return {std::string(text.substr(0, eq)), parse_delay_schedule(text.substr(eq + 1))};
}

}  // namespace cppless::emulator
