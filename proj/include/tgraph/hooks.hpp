#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tgraph/batch.hpp"
#include "tgraph/error.hpp"

namespace tgraph {

/// What a hook reads from and adds to a batch. `required` and `produced` must
/// be disjoint.
struct HookContract {
  std::string name;
  AttrSet required;
  AttrSet produced;
  bool stateful = false;

  friend bool operator==(const HookContract&, const HookContract&) = default;
};

class Hook {
 public:
  explicit Hook(HookContract contract) : contract_(std::move(contract)) {}
  virtual ~Hook() = default;

  Hook(const Hook&) = delete;
  Hook& operator=(const Hook&) = delete;

  const HookContract& contract() const { return contract_; }
  const std::string& name() const { return contract_.name; }

  /// Must add exactly the produced attributes and remove nothing.
  virtual void apply(MaterializedBatch& batch) = 0;

  /// Restores post-construction state. Only called when the contract says
  /// the hook is stateful.
  virtual void reset() {}

 private:
  HookContract contract_;
};

/// Hook backed by a callable; handy for one-off transformations.
class FunctionHook final : public Hook {
 public:
  using Fn = std::function<void(MaterializedBatch&)>;

  FunctionHook(HookContract contract, Fn fn) : Hook(std::move(contract)), fn_(std::move(fn)) {}

  void apply(MaterializedBatch& batch) override { fn_(batch); }

 private:
  Fn fn_;
};

/// A validated hook set: `order` lists indices into `hooks` in execution order.
struct Recipe {
  std::vector<HookContract> hooks;
  std::vector<std::size_t> order;

  std::vector<std::string> ordered_names() const {
    std::vector<std::string> names;
    for (auto i : order) names.push_back(hooks[i].name);
    return names;
  }
};

namespace detail {

inline bool intersects(const AttrSet& a, const AttrSet& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

inline std::string join(std::span<const std::string> parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace detail

/// Orders hooks so every producer runs before its consumers (hook i precedes
/// hook j whenever i produces something j requires). Ties go to the earlier
/// hook in the input, so the result is deterministic.
inline Recipe validate_recipe(std::span<const HookContract> hooks,
                              const AttrSet& builtins = builtin_attrs()) {
  const std::size_t n = hooks.size();
  std::set<std::string> names;
  AttrSet available = builtins;
  for (const auto& h : hooks) {
    if (!names.insert(h.name).second) {
      throw Error(Errc::duplicate_name, "hook '" + h.name + "' appears twice");
    }
    if (detail::intersects(h.required, h.produced)) {
      throw Error(Errc::invalid_contract,
                  "hook '" + h.name + "' both requires and produces the same attribute");
    }
    available.insert(h.produced.begin(), h.produced.end());
  }
  for (const auto& h : hooks) {
    for (const auto& a : h.required) {
      if (!available.contains(a)) {
        throw Error(Errc::missing_attribute,
                    "hook '" + h.name + "' requires '" + a + "' which nothing provides");
      }
    }
  }

  std::vector<std::vector<std::size_t>> successors(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && detail::intersects(hooks[i].produced, hooks[j].required)) {
        successors[i].push_back(j);
        ++indegree[j];
      }
    }
  }

  Recipe recipe;
  recipe.hooks.assign(hooks.begin(), hooks.end());
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    const std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    recipe.order.push_back(i);
    for (auto j : successors[i]) {
      if (--indegree[j] == 0) ready.insert(j);
    }
  }
  if (recipe.order.size() == n) return recipe;

  // Every unplaced hook has an unplaced predecessor, so walking predecessors
  // from any of them must revisit a hook; that loop is the witness.
  std::vector<std::vector<std::size_t>> predecessors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : successors[i]) {
      if (indegree[j] > 0 && indegree[i] > 0) predecessors[j].push_back(i);
    }
  }
  std::size_t cur = 0;
  while (indegree[cur] == 0) ++cur;
  std::vector<std::size_t> walk;
  std::vector<int> seen_at(n, -1);
  while (seen_at[cur] < 0) {
    seen_at[cur] = static_cast<int>(walk.size());
    walk.push_back(cur);
    cur = predecessors[cur].front();
  }
  std::vector<std::string> cycle = {hooks[cur].name};
  for (auto it = walk.rbegin(); it != walk.rend(); ++it) {
    cycle.push_back(hooks[*it].name);
    if (*it == cur) break;
  }
  throw Error(Errc::cyclic_recipe, "dependency cycle " + detail::join(cycle, " -> "));
}

/// Registry of hooks per activation key. Each key's hook set is validated into
/// a recipe on first use and re-validated after any registration under it.
class HookManager {
 public:
  explicit HookManager(AttrSet builtins = builtin_attrs()) : builtins_(std::move(builtins)) {}

  void register_hook(const std::string& key, std::shared_ptr<Hook> hook) {
    if (key.empty()) throw Error(Errc::validation, "activation key must be non-empty");
    if (!hook) throw Error(Errc::validation, "null hook");
    auto& list = registry_[key];
    for (const auto& h : list) {
      if (h->name() == hook->name()) {
        throw Error(Errc::duplicate_name,
                    "hook '" + hook->name() + "' already registered under '" + key + "'");
      }
    }
    list.push_back(std::move(hook));
    validated_.erase(key);
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : registry_) out.push_back(key);
    return out;
  }

  std::vector<std::string> hook_names(const std::string& key) const {
    std::vector<std::string> out;
    if (const auto it = registry_.find(key); it != registry_.end()) {
      for (const auto& h : it->second) out.push_back(h->name());
    }
    return out;
  }

  bool is_validated(const std::string& key) const { return validated_.contains(key); }

  /// Validated recipe for `key`; an unknown key has the empty recipe.
  const Recipe& recipe(const std::string& key) {
    if (const auto it = validated_.find(key); it != validated_.end()) return it->second;
    std::vector<HookContract> contracts;
    if (const auto it = registry_.find(key); it != registry_.end()) {
      for (const auto& h : it->second) contracts.push_back(h->contract());
    }
    return validated_.emplace(key, validate_recipe(contracts, builtins_)).first->second;
  }

  /// Runs the key's recipe over `batch`, checking each hook adds exactly its
  /// declared attributes.
  void execute(const std::string& key, MaterializedBatch& batch) {
    const Recipe& plan = recipe(key);
    if (plan.order.empty()) return;
    const auto& hooks = registry_.at(key);
    for (auto i : plan.order) {
      Hook& hook = *hooks[i];
      const auto& contract = hook.contract();
      for (const auto& a : contract.required) {
        if (!batch.has(a)) {
          throw Error(Errc::missing_attribute,
                      "hook '" + contract.name + "' requires '" + a + "' missing from batch");
        }
      }
      AttrSet expected = batch.attr_names();
      expected.insert(contract.produced.begin(), contract.produced.end());
      try {
        hook.apply(batch);
      } catch (const Error& e) {
        if (e.code() == Errc::hook_failed) throw;
        throw Error(Errc::hook_failed, "hook '" + contract.name + "': " + e.what());
      } catch (const std::exception& e) {
        throw Error(Errc::hook_failed, "hook '" + contract.name + "': " + e.what());
      }
      const AttrSet actual = batch.attr_names();
      if (actual != expected) {
        std::vector<std::string> missing;
        std::vector<std::string> extra;
        std::set_difference(expected.begin(), expected.end(), actual.begin(), actual.end(),
                            std::back_inserter(missing));
        std::set_difference(actual.begin(), actual.end(), expected.begin(), expected.end(),
                            std::back_inserter(extra));
        throw Error(Errc::contract_violation,
                    "hook '" + contract.name + "' missing {" + detail::join(missing, ", ") +
                        "} unexpected {" + detail::join(extra, ", ") + "}");
      }
    }
  }

  /// Clears the state of every stateful hook under every key.
  void reset() {
    std::set<const Hook*> done;
    for (auto& [_, list] : registry_) {
      for (auto& h : list) {
        if (h->contract().stateful && done.insert(h.get()).second) h->reset();
      }
    }
  }

 private:
  AttrSet builtins_;
  std::map<std::string, std::vector<std::shared_ptr<Hook>>> registry_;
  std::map<std::string, Recipe> validated_;
};

/// Fills the built-in attributes of `slice` and runs the recipe under `key`.
inline MaterializedBatch materialize(const EventSlice& slice, HookManager& manager,
                                     const std::string& key) {
  MaterializedBatch batch = make_batch(slice);
  manager.execute(key, batch);
  return batch;
}

}  // namespace tgraph
