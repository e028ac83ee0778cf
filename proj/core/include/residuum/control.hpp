#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "residuum/effect_system.hpp"

namespace residuum {

// Control escape identity: a declared exception name, a break target, or an
// early return.  Exceptions live in a declared single-parent hierarchy;
// break/return tags are unrelated singletons.
struct ControlTag {
  enum class Kind { Exception, Break, Return };
  Kind kind = Kind::Exception;
  std::string name;       // exception name, or break label
  std::uint32_t node = 0;  // AST id of the break target / returning function

  friend bool operator==(const ControlTag&, const ControlTag&) = default;
  friend bool operator<(const ControlTag& a, const ControlTag& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.node != b.node) return a.node < b.node;
    return a.name < b.name;
  }

  static ControlTag exception(std::string name) {
    return {Kind::Exception, std::move(name), 0};
  }
  static ControlTag breakTo(std::uint32_t node, std::string label = "") {
    return {Kind::Break, std::move(label), node};
  }
  static ControlTag returnFrom(std::uint32_t node) {
    return {Kind::Return, "", node};
  }

  std::string display() const;
};

// Single-inheritance exception hierarchy; break/return tags are only
// related to themselves.
class TagPoset {
public:
  // Declares an exception; parent must already be declared when present.
  // Returns false on duplicates or unknown parents.
  bool declare(const std::string& name, const std::optional<std::string>& parent);

  bool declared(const std::string& name) const;

  // t <= u: reflexive, plus exception ancestry.
  bool leq(const ControlTag& t, const ControlTag& u) const;

private:
  std::map<std::string, std::optional<std::string>> parent_;
};

// A pair of the optional normal-termination effect (absent when every path
// escapes) and the per-tag prefix effects accumulated up to each escape.
// Entries are kept sorted by tag with at most one entry per tag.  The
// degenerate pair (absent, no entries) is not a value of the algebra.
struct ControlEffect {
  std::optional<Effect> underlying;
  std::vector<std::pair<ControlTag, Effect>> entries;

  friend bool operator==(const ControlEffect&, const ControlEffect&) = default;

  const Effect* entryFor(const ControlTag& t) const {
    for (const auto& [tag, p] : entries)
      if (tag == t) return &p;
    return nullptr;
  }
};

// The exception/break/return construction over a base system Q.  All
// operations are partial; absence means some underlying-quantale operation
// was undefined (the checker's diagnostics name the operands).
class ControlAlgebra {
public:
  ControlAlgebra(std::shared_ptr<const EffectSystem> base, TagPoset poset)
      : base_(std::move(base)), poset_(std::move(poset)) {}

  const EffectSystem& baseSystem() const { return *base_; }
  const TagPoset& poset() const { return poset_; }

  ControlEffect unit() const { return lift(base_->unit()); }
  ControlEffect lift(Effect q) const { return {std::move(q), {}}; }
  ControlEffect escape(ControlTag tag) const {
    return {std::nullopt, {{std::move(tag), base_->unit()}}};
  }

  std::optional<ControlEffect> seq(const ControlEffect& a,
                                   const ControlEffect& b) const;
  std::optional<ControlEffect> join(const ControlEffect& a,
                                    const ControlEffect& b) const;
  std::optional<ControlEffect> iter(const ControlEffect& a) const;

  // Weak residual: what may still happen after `sofar` within `target`.
  // Entries of `sofar` must be bounded by matching target entries, except
  // for tags in `ignore` (escapes resolved by an enclosing construct:
  // handled exceptions, enclosing-loop breaks, this-function returns) whose
  // budget is enforced at that construct's boundary instead.
  std::optional<ControlEffect> residual(
      const ControlEffect& sofar, const ControlEffect& target,
      const std::vector<ControlTag>* ignore = nullptr) const;

  bool le(const ControlEffect& a, const ControlEffect& b) const;

  // Enforces subtype coherence: each present tag's prefix absorbs (by join)
  // the prefixes of its present descendants.  On an undefined join the
  // offending tag pair is reported through `conflict`.
  std::optional<ControlEffect> normalize(
      const ControlEffect& c,
      std::pair<ControlTag, ControlTag>* conflict = nullptr) const;

  // try/catch combination: entries caught by the first matching clause are
  // replaced by prefix-then-handler behavior and joined with the uncaught
  // remainder.
  std::optional<ControlEffect> handle(
      const ControlEffect& body,
      const std::vector<std::pair<ControlTag, ControlEffect>>& clauses) const;

  // Folds matching break/return entries into the normal path.
  std::optional<ControlEffect> flatten(
      const ControlEffect& c, const std::vector<ControlTag>& tags) const;

  std::string show(const ControlEffect& c) const;

private:
  std::optional<std::vector<std::pair<ControlTag, Effect>>> mergeEntries(
      const std::vector<std::pair<ControlTag, Effect>>& a,
      const std::vector<std::pair<ControlTag, Effect>>& b) const;

  std::shared_ptr<const EffectSystem> base_;
  TagPoset poset_;
};

}  // namespace residuum
