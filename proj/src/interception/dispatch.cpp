#include <algorithm>
#include <cctype>
#include <exception>

#include "pathtrace/interception.hpp"

namespace pathtrace {

namespace detail {

struct ChainState {
  RequestContext& ctx;
  const DispatchPoint& point;
  const AdviceChain& chain;
  const std::function<std::any()>& original;
  std::vector<char> called;
  bool original_ran = false;
  std::any result;
  std::exception_ptr original_error;

  std::any run_original() {
    if (original_ran) return result;
    original_ran = true;
    try {
      result = original();
    } catch (...) {
      original_error = std::current_exception();
      throw;
    }
    return result;
  }

  std::any run(std::size_t position) {
    if (position > chain.size()) return run_original();

    const Advice& advice = *chain[position - 1];
    Invocation frame(*this, position);
    bool faulted = false;
    try {
      advice.body(frame);
    } catch (...) {
      if (original_error) std::rethrow_exception(original_error);
      faulted = true;
      std::string what = "unknown exception";
      try {
        throw;
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      ctx.violations.push_back(advice.aspect + "/" + advice.name + ": " + what);
    }
    if (original_error) std::rethrow_exception(original_error);

    if (!called[position]) {
      if (!faulted) {
        ctx.violations.push_back(advice.aspect + "/" + advice.name + ": returned without calling invoke_next");
      }
      called[position] = 1;
      run_original();
    }
    return result;
  }
};

}  // namespace detail

const JoinPointId& Invocation::join_point() const { return state_->point.jp; }
std::span<const Argument> Invocation::arguments() const { return state_->point.arguments; }
const ComponentNode* Invocation::target() const { return state_->point.target; }
const std::optional<SourceLocation>& Invocation::location() const { return state_->point.location; }
RequestContext& Invocation::context() const { return state_->ctx; }

std::any Invocation::invoke_next() {
  auto& state = *state_;
  if (state.called[position_]) {
    throw AdviceProtocolViolation("invoke_next called twice at chain position " + std::to_string(position_));
  }
  state.called[position_] = 1;
  return state.run(position_ + 1);
}

std::any run_chain(RequestContext& ctx, const DispatchPoint& point, const AdviceChain& chain,
                   const std::function<std::any()>& original) {
  detail::ChainState state{ctx, point, chain, original, std::vector<char>(chain.size() + 2, 0), false, {}, nullptr};
  Invocation head(state, 0);
  head.invoke_next();
  return state.result;
}

bool PhaseTrace::well_formed() const {
  if (steps.empty()) return true;
  if (steps.front().phase != 1) return false;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    int prev = steps[i - 1].phase;
    int cur = steps[i].phase;
    if (cur < 1 || cur > 6) return false;
    if (cur < prev && cur != 6) return false;
  }
  return true;
}

ProvenanceRecord& MetadataCollector::record_for(const std::string& component_id) {
  auto it = records_.find(component_id);
  if (it == records_.end()) {
    it = records_.emplace(component_id, ProvenanceRecord{}).first;
    it->second.component_id = component_id;
  }
  return it->second;
}

const ProvenanceRecord* MetadataCollector::find(const std::string& component_id) const {
  auto it = records_.find(component_id);
  return it == records_.end() ? nullptr : &it->second;
}

std::size_t MetadataCollector::event_count() const {
  std::size_t n = trace_.steps.size();
  for (const auto& [_, r] : records_) n += r.attribute_events.size() + r.server_path.size();
  return n;
}

void MetadataCollector::clear() {
  records_.clear();
  trace_.steps.clear();
}

void AdviceRegistry::add(Advice advice) {
  auto it = std::find_if(advices_.begin(), advices_.end(),
                         [&](const auto& a) { return a->aspect == advice.aspect && a->name == advice.name; });
  auto shared = std::make_shared<const Advice>(std::move(advice));
  if (it != advices_.end()) {
    *it = std::move(shared);
  } else {
    advices_.push_back(std::move(shared));
  }
}

std::shared_ptr<const Advice> AdviceRegistry::find(std::string_view aspect, std::string_view name) const {
  for (const auto& a : advices_) {
    if (a->aspect == aspect && a->name == name) return a;
  }
  return nullptr;
}

std::shared_ptr<const BindingTable> BindingTable::weave(const AspectConfig& config, const AdviceRegistry& registry,
                                                        std::uint64_t version) {
  auto table = std::make_shared<BindingTable>();
  table->version_ = version;
  for (const auto& binding : config.bindings) {
    if (std::find(config.aspects.begin(), config.aspects.end(), binding.aspect) == config.aspects.end()) {
      throw ConfigError(ConfigError::Kind::UnknownAdviceName, 0,
                        "aspect '" + binding.aspect + "' is bound but not declared in 'aspects'");
    }
    auto advice = registry.find(binding.aspect, binding.advice);
    if (!advice) {
      throw ConfigError(ConfigError::Kind::UnknownAdviceName, 0,
                        "no advice '" + binding.advice + "' in aspect '" + binding.aspect + "'");
    }
    table->entries_.push_back({binding.pointcut, std::move(advice)});
  }
  return table;
}

AdviceChain BindingTable::chain_for(const JoinPointId& jp) const {
  AdviceChain chain;
  for (const auto& entry : entries_) {
    if (!matches(entry.pointcut, jp)) continue;
    // An advice wraps a join point once even if several bindings select it.
    if (std::find(chain.begin(), chain.end(), entry.advice) == chain.end()) chain.push_back(entry.advice);
  }
  return chain;
}

std::string attribute_from_setter(std::string_view method) {
  if (method.size() <= 3 || method.substr(0, 3) != "set") return std::string(method);
  std::string out(method.substr(3));
  out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

std::string setter_for(std::string_view attribute) {
  std::string out = "set";
  out += attribute;
  if (out.size() > 3) out[3] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[3])));
  return out;
}

}  // namespace pathtrace
