#pragma once

#include <any>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "pathtrace/aspect_config.hpp"
#include "pathtrace/pointcut.hpp"
#include "pathtrace/provenance.hpp"
#include "pathtrace/template.hpp"

namespace pathtrace {

struct ComponentNode;

struct OpaqueArg {
  std::string description;
};

using Argument = std::variant<std::string, const ComponentNode*, SourceLocation, OpaqueArg>;

/// A framework call site, described well enough for pointcuts and advices.
struct DispatchPoint {
  JoinPointId jp;
  std::vector<Argument> arguments;
  const ComponentNode* target = nullptr;
  std::optional<SourceLocation> location;
};

struct PhaseStep {
  int phase = 0;
  std::string unit;
  std::string method;
  std::optional<SourceLocation> location;
  std::optional<std::string> note;

  bool operator==(const PhaseStep&) const = default;
};

/// Ordered record of the lifecycle phases and units a request traversed.
struct PhaseTrace {
  std::vector<PhaseStep> steps;

  /// Phase numbers never decrease, except that a jump to 6 is always allowed.
  /// A non-empty trace starts in phase 1.
  bool well_formed() const;
};

/// Per-request sink for everything the advices observe.
class MetadataCollector {
 public:
  ProvenanceRecord& record_for(const std::string& component_id);
  const ProvenanceRecord* find(const std::string& component_id) const;
  bool has(const std::string& component_id) const { return find(component_id) != nullptr; }

  PhaseTrace& trace() { return trace_; }
  const PhaseTrace& trace() const { return trace_; }

  /// Total number of attribute events, server-path entries and trace steps.
  std::size_t event_count() const;

  void clear();

 private:
  std::map<std::string, ProvenanceRecord, std::less<>> records_;
  PhaseTrace trace_;
};

class BindingTable;

/// Request-scoped state shared by every dispatch point of one request.
struct RequestContext {
  std::string request_id;
  std::optional<std::string> session_id;
  bool enabled = true;
  /// Snapshot taken once per request; a reload never changes it mid-request.
  std::shared_ptr<const BindingTable> bindings;
  MetadataCollector collector;
  int current_phase = 0;
  /// Advice faults and protocol violations; non-empty means `X-Prov-Error`.
  std::vector<std::string> violations;
};

class AdviceProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Invocation;

/// A named around-advice. The body must call Invocation::invoke_next exactly once.
struct Advice {
  std::string name;
  std::string aspect;
  std::function<std::any(Invocation&)> body;
};

using AdviceChain = std::vector<std::shared_ptr<const Advice>>;

namespace detail {
struct ChainState;
}

/// Reified call handed to an advice. Position 0 is the synthetic head,
/// position k (1-based) the k-th advice; invoking next from the last advice
/// runs the original operation.
class Invocation {
 public:
  Invocation(detail::ChainState& state, std::size_t position) : state_(&state), position_(position) {}

  const JoinPointId& join_point() const;
  std::span<const Argument> arguments() const;
  const ComponentNode* target() const;
  const std::optional<SourceLocation>& location() const;
  RequestContext& context() const;
  std::size_t chain_position() const { return position_; }

  /// Runs the rest of the chain. Throws AdviceProtocolViolation when called
  /// twice from the same frame.
  std::any invoke_next();

 private:
  detail::ChainState* state_;
  std::size_t position_;
};

class AdviceRegistry {
 public:
  void add(Advice advice);
  std::shared_ptr<const Advice> find(std::string_view aspect, std::string_view name) const;
  std::size_t size() const { return advices_.size(); }

  /// ComponentAdvice, TagAdvice, RenderAdvice, PhaseAdvice and AjaxAdvice.
  static AdviceRegistry builtins();

 private:
  std::vector<std::shared_ptr<const Advice>> advices_;
};

/// Pointcut → advice table produced by weaving an AspectConfig.
class BindingTable {
 public:
  /// Throws ConfigError(UnknownAdviceName) when a binding names an advice the
  /// registry does not have.
  static std::shared_ptr<const BindingTable> weave(const AspectConfig& config, const AdviceRegistry& registry,
                                                   std::uint64_t version = 0);

  AdviceChain chain_for(const JoinPointId& jp) const;
  std::size_t size() const { return entries_.size(); }
  std::uint64_t version() const { return version_; }

 private:
  struct Entry {
    PointcutExpr pointcut;
    std::shared_ptr<const Advice> advice;
  };
  std::vector<Entry> entries_;
  std::uint64_t version_ = 0;
};

/// Runs `original` wrapped by `chain`. The original runs exactly once and its
/// result is returned unchanged, whatever the advices do.
std::any run_chain(RequestContext& ctx, const DispatchPoint& point, const AdviceChain& chain,
                   const std::function<std::any()>& original);

/// Entry point used at every framework dispatch site. With no context,
/// instrumentation off, or no matching binding, calls `original` directly.
template <class F>
auto dispatch(RequestContext* ctx, const DispatchPoint& point, F&& original) -> std::invoke_result_t<F&> {
  using R = std::invoke_result_t<F&>;
  if (ctx == nullptr || !ctx->enabled || !ctx->bindings) return original();
  auto chain = ctx->bindings->chain_for(point.jp);
  if (chain.empty()) return original();
  if constexpr (std::is_void_v<R>) {
    run_chain(*ctx, point, chain, [&]() -> std::any {
      original();
      return {};
    });
  } else {
    auto result = run_chain(*ctx, point, chain, [&]() -> std::any { return std::any(original()); });
    return std::any_cast<R>(std::move(result));
  }
}

/// Aspect unit paths of the built-in advices.
namespace aspects {
inline constexpr const char* kComponent = "pathtrace.advices.ComponentAdvice";
inline constexpr const char* kTag = "pathtrace.advices.TagAdvice";
inline constexpr const char* kRender = "pathtrace.advices.RenderAdvice";
inline constexpr const char* kPhase = "pathtrace.advices.PhaseAdvice";
inline constexpr const char* kAjax = "pathtrace.advices.AjaxAdvice";
}  // namespace aspects

/// `setStyleClass` → `styleClass`; returns the method unchanged if it has no `set` prefix.
std::string attribute_from_setter(std::string_view method);
/// `styleClass` → `setStyleClass`.
std::string setter_for(std::string_view attribute);

}  // namespace pathtrace
