#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <source_location>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "cppless/error.hpp"
#include "cppless/tasks/config.hpp"
#include "cppless/tasks/identifier.hpp"
#include "cppless/tasks/registry.hpp"
#include "cppless/wire/binary.hpp"

namespace cppless {

namespace detail {

template <typename Sig>
inline constexpr bool is_function_sig = false;
template <typename R, typename... Args>
inline constexpr bool is_function_sig<R(Args...)> = true;

template <typename Sig>
struct sig_traits;

template <typename R, typename... Args>
struct sig_traits<R(Args...)> {
  using result_type = R;
  static constexpr std::size_t arity = sizeof...(Args);
  static constexpr bool by_value = (!std::is_reference_v<Args> && ...);
  static constexpr bool args_serializable = (wire::WireSerializable<Args> && ...);
  static constexpr bool result_serializable = wire::WireSerializable<R>;
  using names_array = std::array<std::string_view, arity>;
};

}  // namespace detail

// A signature R(Args...) is a valid task shape when every capture is taken by
// value (no references — they would dangle across the process boundary) and
// every capture type plus the result type has a wire schema.
template <typename Sig>
concept TaskSignature =
    detail::is_function_sig<Sig> && detail::sig_traits<Sig>::by_value &&
    detail::sig_traits<Sig>::args_serializable && detail::sig_traits<Sig>::result_serializable;

namespace detail {
template <typename F, typename Sig>
inline constexpr bool invocable_as = false;
template <typename F, typename R, typename... Args>
inline constexpr bool invocable_as<F, R(Args...)> = std::is_invocable_r_v<R, const F&, Args...>;
}  // namespace detail

// A callable F can implement a task of signature Sig.
template <typename F, typename Sig>
concept TaskBody = TaskSignature<Sig> && detail::invocable_as<F, Sig>;

// A dispatch-ready task: identity, per-function config, the captures already
// serialized (record layout, declaration order), and the result decoder.
template <typename R>
struct BoundTask {
  std::string cloud_name;
  FunctionConfig config;
  std::vector<std::uint8_t> capture_body;
  R (*decode_result)(std::span<const std::uint8_t>) = nullptr;
};

template <typename Sig>
class TaskHandle;

// Host-side view of one task definition. The same definition, compiled in
// serverless mode, is reachable through the entry registry under the same
// cloud name — bind() here and the registered wrapper there agree byte-for-
// byte on the capture record.
template <typename R, typename... Args>
class TaskHandle<R(Args...)> {
 public:
  using result_type = R;
  static constexpr std::size_t arity = sizeof...(Args);

  const tasks::TaskIdentifier& identifier() const { return entry_->id; }
  const FunctionConfig& config() const { return entry_->config; }
  const std::string& function_name() const { return entry_->original_function_name; }
  const std::array<std::string, arity>& field_names() const { return field_names_; }

  // Capture record schema: fields in declaration order under their names.
  wire::Schema capture_schema() const {
    std::vector<wire::Schema::Field> fields;
    fields.reserve(arity);
    std::size_t i = 0;
    (fields.emplace_back(field_names_[i++], wire::WireCodec<Args>::schema()), ...);
    return wire::Schema::record(std::move(fields));
  }

  // Serializes the captures now; a serialization failure throws here, before
  // any dispatcher state is touched.
  BoundTask<R> bind(Args... args) const {
    BoundTask<R> bound;
    bound.cloud_name = entry_->id.cloud_name;
    bound.config = entry_->config;
    bound.capture_body = encode_captures(args...);
    bound.decode_result = &wire::decode<R>;
    return bound;
  }

  // Runs the body in-process (the local benchmark path).
  R run_local(Args... args) const { return body_(std::move(args)...); }

  static std::vector<std::uint8_t> encode_captures(const Args&... args) {
    std::vector<std::uint8_t> out;
    wire::Writer w(out);
    (wire::WireCodec<Args>::encode(args, w), ...);
    return out;
  }

  static std::tuple<Args...> decode_captures(std::span<const std::uint8_t> body) {
    wire::Reader r(body);
    std::tuple<Args...> t{wire::WireCodec<Args>::decode(r)...};
    if (!r.at_end()) {
      throw DecodeError(std::to_string(r.remaining()) + " trailing bytes after capture record",
                        r.offset());
    }
    return t;
  }

 private:
  template <TaskSignature Sig, TaskBody<Sig> F>
  friend TaskHandle<Sig> define_task(std::string, tasks::TaskSite, FunctionConfig,
                                     typename detail::sig_traits<Sig>::names_array, F);

  TaskHandle(const tasks::RegisteredEntry* entry, std::function<R(Args...)> body,
             std::array<std::string, arity> field_names)
      : entry_(entry), body_(std::move(body)), field_names_(std::move(field_names)) {}

  const tasks::RegisteredEntry* entry_;
  std::function<R(Args...)> body_;
  std::array<std::string, arity> field_names_;
};

// Defines one offloadable task. In every build mode this registers the body
// in the process-global entry registry (keyed by the site-derived cloud name)
// and returns a handle for host-side dispatch; which role is exercised depends
// on which main() the binary gets. Definitions belong at namespace scope in
// exactly one translation unit.
template <TaskSignature Sig, TaskBody<Sig> F>
TaskHandle<Sig> define_task(std::string function_name, tasks::TaskSite site, FunctionConfig config,
                            typename detail::sig_traits<Sig>::names_array field_names, F body) {
  using Traits = detail::sig_traits<Sig>;
  using R = typename Traits::result_type;

  validate(config);
  tasks::RegisteredEntry entry;
  entry.id = tasks::derive_task_identifier(site);
  entry.site = std::move(site);
  entry.original_function_name = std::move(function_name);
  entry.config = config;

  std::function<Sig> body_fn = std::move(body);
  entry.run_serialized = [body_fn](std::span<const std::uint8_t> payload) {
    auto args = TaskHandle<Sig>::decode_captures(payload);
    R result = std::apply(body_fn, std::move(args));
    return wire::encode(result);
  };

  const tasks::RegisteredEntry& stored = tasks::EntryRegistry::instance().add(std::move(entry));

  std::array<std::string, Traits::arity> names;
  for (std::size_t i = 0; i < Traits::arity; ++i) names[i] = std::string(field_names[i]);
  return TaskHandle<Sig>(&stored, std::move(body_fn), std::move(names));
}

}  // namespace cppless

// ---------------------------------------------------------------------------
// Definition-site and entry-point plumbing.

// Repo root used to make __FILE__ repo-relative; build systems define it per
// target. Without it, paths pass through unchanged.
#ifndef CPPLESS_SOURCE_ROOT
#define CPPLESS_SOURCE_ROOT ""
#endif

// Captures the definition site of a task. Use CPLS_SITE_AT(n) when several
// tasks share one source location.
#define CPLS_SITE_AT(ordinal_)                                                              \
  ::cppless::tasks::TaskSite {                                                              \
    ::cppless::tasks::relative_source_path(__FILE__, CPPLESS_SOURCE_ROOT), __LINE__,        \
        static_cast<int>(::std::source_location::current().column()), (ordinal_)            \
  }
#define CPLS_SITE() CPLS_SITE_AT(0)

// The program's host entry point. In a serverless build the worker loop owns
// main(), and the host main is compiled but unreachable.
#if defined(CPPLESS_MODE_SERVERLESS)
#define CPLS_MAIN(...) [[maybe_unused]] static int cppless_disabled_host_main(__VA_ARGS__)
#else
#define CPLS_MAIN(...) int main(__VA_ARGS__)
#endif
