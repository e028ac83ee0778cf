#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "residuum/ast.hpp"
#include "residuum/control.hpp"
#include "residuum/diagnostics.hpp"
#include "residuum/effect_system.hpp"

namespace residuum {

// Semantic type. Function types carry a latent underlying effect; declared
// exception budgets exist only on named top-level functions.
struct Type {
  enum class Kind { Unit, Bool, Int, Fn };
  Kind kind = Kind::Unit;
  std::vector<Type> params;
  std::shared_ptr<Type> result;
  std::optional<Effect> latent;

  bool operator==(const Type& o) const;
  std::string show(const EffectSystem& sys) const;

  static Type simple(Kind k) { return Type{k, {}, nullptr, std::nullopt}; }
};

struct FnSig {
  std::string name;
  std::vector<Type> paramTypes;
  Type result;
  Effect base;          // declared underlying effect
  ControlEffect bound;  // base plus normalized @throws budgets
  // First-class view of the function; meaningful only when `throws` is empty.
  Type asValue() const;
};

struct Binding {
  enum class Kind { GlobalFn, Var };
  Kind kind = Kind::Var;
  std::uint32_t index = 0;  // fn index or variable id
};

struct ResolvedModule {
  TagPoset poset;
  std::vector<FnSig> sigs;                 // parallel to Module::fns
  std::vector<Type> types;                 // parallel to Module::types
  std::map<ast::ExprId, Effect> performEffects;
  std::map<ast::ExprId, Binding> bindings;          // VarRef sites
  std::map<ast::ExprId, ast::ExprId> breakTargets;  // Break -> While
  std::map<ast::ExprId, Effect> lambdaLatents;
  std::map<ast::ExprId, std::vector<std::uint32_t>> lambdaParamVars;
  std::map<ast::StmtId, std::uint32_t> letVars;
  std::vector<std::vector<std::uint32_t>> fnParamVars;
  std::uint32_t varCount = 0;
  std::vector<Diagnostic> diags;

  bool ok() const { return diags.empty(); }
};

ResolvedModule resolveModule(const ast::Module& m,
                             std::shared_ptr<const EffectSystem> system);

}  // namespace residuum
