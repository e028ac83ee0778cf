#include "residuum/resolve.hpp"

#include <algorithm>

namespace residuum {

bool Type::operator==(const Type& o) const {
  if (kind != o.kind) return false;
  if (kind != Kind::Fn) return true;
  if (params != o.params) return false;
  if (static_cast<bool>(result) != static_cast<bool>(o.result)) return false;
  if (result && !(*result == *o.result)) return false;
  return latent == o.latent;
}

std::string Type::show(const EffectSystem& sys) const {
  switch (kind) {
    case Kind::Unit: return "unit";
    case Kind::Bool: return "bool";
    case Kind::Int: return "int";
    case Kind::Fn: {
      std::string out = "fn(";
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ", ";
        out += params[i].show(sys);
      }
      out += ") -> ";
      out += result ? result->show(sys) : "unit";
      out += " @effect(";
      out += latent ? sys.show(*latent) : "?";
      out += ")";
      return out;
    }
  }
  return "?";
}

Type FnSig::asValue() const {
  Type t;
  t.kind = Type::Kind::Fn;
  t.params = paramTypes;
  t.result = std::make_shared<Type>(result);
  t.latent = base;
  return t;
}

namespace {

using namespace ast;

class Resolver {
 public:
  Resolver(const Module& m, std::shared_ptr<const EffectSystem> system)
      : m_(m), sys_(std::move(system)), algebra_(sys_, TagPoset{}) {}

  ResolvedModule run() {
    resolveExceptions();
    algebra_ = ControlAlgebra(sys_, r_.poset);
    resolveTypeExprs();
    collectSigs();
    for (std::size_t i = 0; i < m_.fns.size(); ++i) resolveFnBody(i);
    return std::move(r_);
  }

 private:
  void error(DiagKind kind, Span span, const std::string& message) {
    r_.diags.push_back(Diagnostic{kind, m_.file, span, message, "", "",
                                  std::string(sys_->id())});
  }

  std::optional<Effect> parseEffect(const std::string& text, Span span,
                                    const char* what) {
    std::optional<Effect> e = sys_->parseLiteral(text);
    if (!e)
      error(DiagKind::ResolveError, span,
            std::string("'") + text + "' is not a valid " + what +
                " for effect system " + std::string(sys_->id()));
    return e;
  }

  void resolveExceptions() {
    for (const ExceptionDecl& decl : m_.exceptions) {
      if (r_.poset.declared(decl.name)) {
        error(DiagKind::ResolveError, decl.span,
              "duplicate exception '" + decl.name + "'");
        continue;
      }
      if (decl.parent && !r_.poset.declared(*decl.parent)) {
        error(DiagKind::ResolveError, decl.span,
              "unknown parent exception '" + *decl.parent +
                  "' (parents must be declared first)");
        r_.poset.declare(decl.name, std::nullopt);
        continue;
      }
      r_.poset.declare(decl.name, decl.parent);
    }
  }

  void resolveTypeExprs() {
    r_.types.resize(m_.types.size());
    for (std::size_t i = 0; i < m_.types.size(); ++i) {
      const TypeExpr& t = m_.types[i];
      Type& out = r_.types[i];
      switch (t.kind) {
        case TypeExpr::Kind::Unit: out = Type::simple(Type::Kind::Unit); break;
        case TypeExpr::Kind::Bool: out = Type::simple(Type::Kind::Bool); break;
        case TypeExpr::Kind::Int: out = Type::simple(Type::Kind::Int); break;
        case TypeExpr::Kind::Fn: {
          out.kind = Type::Kind::Fn;
          for (TypeId p : t.params) out.params.push_back(r_.types[p]);
          out.result = std::make_shared<Type>(
              t.result != kNone ? r_.types[t.result]
                                : Type::simple(Type::Kind::Unit));
          out.latent =
              parseEffect(t.latentText, t.latentSpan, "latent effect");
          if (!out.latent) out.latent = sys_->unit();
          break;
        }
      }
    }
  }

  void collectSigs() {
    r_.sigs.reserve(m_.fns.size());
    for (const FnDecl& fn : m_.fns) {
      if (fnIndex_.count(fn.name)) {
        error(DiagKind::ResolveError, fn.nameSpan,
              "duplicate function '" + fn.name + "'");
      } else {
        fnIndex_.emplace(fn.name, r_.sigs.size());
      }
      FnSig sig;
      sig.name = fn.name;
      for (const Param& p : fn.params) sig.paramTypes.push_back(r_.types[p.type]);
      sig.result = r_.types[fn.resultType];
      std::optional<Effect> base =
          parseEffect(fn.effectText, fn.effectSpan, "effect");
      sig.base = base ? *base : sys_->unit();

      std::vector<std::pair<ControlTag, Effect>> entries;
      for (const ThrowsAnn& ann : fn.throws) {
        if (!r_.poset.declared(ann.exception)) {
          error(DiagKind::ResolveError, ann.exceptionSpan,
                "unknown exception '" + ann.exception + "' in @throws");
          continue;
        }
        std::optional<Effect> budget =
            parseEffect(ann.effectText, ann.effectSpan, "effect");
        if (!budget) continue;
        ControlTag tag = ControlTag::exception(ann.exception);
        bool dup = false;
        for (const auto& [t, e] : entries)
          if (t == tag) dup = true;
        if (dup) {
          error(DiagKind::ResolveError, ann.exceptionSpan,
                "duplicate @throws for exception '" + ann.exception + "'");
          continue;
        }
        entries.push_back({tag, *budget});
      }
      std::sort(entries.begin(), entries.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      ControlEffect bound{sig.base, std::move(entries)};
      std::pair<ControlTag, ControlTag> conflict;
      std::optional<ControlEffect> norm = algebra_.normalize(bound, &conflict);
      if (!norm) {
        error(DiagKind::ResolveError, fn.nameSpan,
              "@throws budgets for '" + conflict.first.display() + "' and '" +
                  conflict.second.display() + "' have no join");
        sig.bound = bound;
      } else {
        sig.bound = *norm;
      }
      r_.sigs.push_back(std::move(sig));
    }
  }

  // ---- bodies ----

  struct LoopFrame {
    std::string label;
    ExprId node;
  };

  std::uint32_t freshVar() { return r_.varCount++; }

  std::optional<std::uint32_t> lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return found->second;
    }
    return std::nullopt;
  }

  std::vector<std::uint32_t> bindParams(const std::vector<Param>& params) {
    std::vector<std::uint32_t> ids;
    scopes_.emplace_back();
    for (const Param& p : params) {
      if (scopes_.back().count(p.name))
        error(DiagKind::ResolveError, p.span,
              "duplicate parameter '" + p.name + "'");
      std::uint32_t id = freshVar();
      scopes_.back()[p.name] = id;
      ids.push_back(id);
    }
    return ids;
  }

  void resolveFnBody(std::size_t fnIdx) {
    const FnDecl& fn = m_.fns[fnIdx];
    loops_.clear();
    lambdaDepth_ = 0;
    scopes_.clear();
    r_.fnParamVars.push_back(bindParams(fn.params));
    walkBlock(fn.body);
    scopes_.pop_back();
  }

  void walkBlock(BlockId id) {
    const Block& b = m_.block(id);
    scopes_.emplace_back();
    for (StmtId sid : b.stmts) {
      const Stmt& s = m_.stmt(sid);
      walkExpr(s.expr, false);
      if (s.kind == Stmt::Kind::Let) {
        std::uint32_t var = freshVar();
        scopes_.back()[s.name] = var;
        r_.letVars[sid] = var;
      }
    }
    if (b.tail != kNone) walkExpr(b.tail, false);
    scopes_.pop_back();
  }

  void walkExpr(ExprId id, bool calleePosition) {
    const Expr& e = m_.expr(id);
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, VarRef>) {
            if (auto var = lookup(node.name)) {
              r_.bindings[id] = Binding{Binding::Kind::Var, *var};
              return;
            }
            auto fn = fnIndex_.find(node.name);
            if (fn == fnIndex_.end()) {
              error(DiagKind::UnboundVar, e.span,
                    "unbound variable '" + node.name + "'");
              return;
            }
            r_.bindings[id] =
                Binding{Binding::Kind::GlobalFn,
                        static_cast<std::uint32_t>(fn->second)};
            if (!calleePosition && !r_.sigs[fn->second].bound.entries.empty())
              error(DiagKind::ResolveError, e.span,
                    "function '" + node.name +
                        "' declares @throws budgets and can only be called "
                        "directly");
          } else if constexpr (std::is_same_v<T, PerformExpr>) {
            std::optional<Effect> eff = sys_->atom(node.label);
            if (!eff) eff = sys_->parseLiteral(node.label);
            if (!eff) {
              error(DiagKind::ResolveError, e.span,
                    "unknown effect label '" + node.label +
                        "' for effect system " + std::string(sys_->id()));
              return;
            }
            r_.performEffects.emplace(id, *eff);
          } else if constexpr (std::is_same_v<T, ThrowExpr>) {
            if (!r_.poset.declared(node.exception))
              error(DiagKind::ResolveError, e.span,
                    "unknown exception '" + node.exception + "'");
          } else if constexpr (std::is_same_v<T, CallExpr>) {
            walkExpr(node.callee, true);
            for (ExprId a : node.args) walkExpr(a, false);
          } else if constexpr (std::is_same_v<T, LambdaExpr>) {
            std::optional<Effect> latent = parseEffect(
                node.latentText,
                node.latentSpan.begin == 0 && node.latentSpan.end == 0
                    ? e.span
                    : node.latentSpan,
                "latent effect");
            r_.lambdaLatents.emplace(id, latent ? *latent : sys_->unit());
            auto savedLoops = std::move(loops_);
            loops_.clear();
            ++lambdaDepth_;
            r_.lambdaParamVars[id] = bindParams(node.params);
            walkExpr(node.body, false);
            scopes_.pop_back();
            --lambdaDepth_;
            loops_ = std::move(savedLoops);
          } else if constexpr (std::is_same_v<T, IfExpr>) {
            walkExpr(node.cond, false);
            walkBlock(node.thenBlock);
            if (node.elseBlock != kNone) walkBlock(node.elseBlock);
          } else if constexpr (std::is_same_v<T, WhileExpr>) {
            walkExpr(node.cond, false);
            loops_.push_back(LoopFrame{node.label, id});
            walkBlock(node.body);
            loops_.pop_back();
          } else if constexpr (std::is_same_v<T, TryExpr>) {
            walkBlock(node.body);
            for (const CatchClause& c : node.catches) {
              if (!r_.poset.declared(c.exception))
                error(DiagKind::ResolveError, c.exceptionSpan,
                      "unknown exception '" + c.exception + "' in catch");
              walkBlock(c.block);
            }
          } else if constexpr (std::is_same_v<T, BlockExpr>) {
            walkBlock(node.block);
          } else if constexpr (std::is_same_v<T, BreakExpr>) {
            if (loops_.empty()) {
              error(DiagKind::ResolveError, e.span,
                    lambdaDepth_ > 0 ? "break cannot cross a lambda boundary"
                                     : "break outside a loop");
              return;
            }
            if (node.label.empty()) {
              r_.breakTargets[id] = loops_.back().node;
              return;
            }
            for (auto it = loops_.rbegin(); it != loops_.rend(); ++it) {
              if (it->label == node.label) {
                r_.breakTargets[id] = it->node;
                return;
              }
            }
            error(DiagKind::ResolveError, e.span,
                  "unknown loop label '" + node.label + "'");
          } else if constexpr (std::is_same_v<T, ReturnExpr>) {
            if (lambdaDepth_ > 0)
              error(DiagKind::ResolveError, e.span,
                    "return is not allowed inside a lambda");
            if (node.value != kNone) walkExpr(node.value, false);
          }
        },
        e.node);
    (void)calleePosition;
  }

  const Module& m_;
  std::shared_ptr<const EffectSystem> sys_;
  ControlAlgebra algebra_;
  ResolvedModule r_;
  std::map<std::string, std::size_t> fnIndex_;
  std::vector<std::map<std::string, std::uint32_t>> scopes_;
  std::vector<LoopFrame> loops_;
  int lambdaDepth_ = 0;
};

}  // namespace

ResolvedModule resolveModule(const ast::Module& m,
                             std::shared_ptr<const EffectSystem> system) {
  Resolver r(m, std::move(system));
  return r.run();
}

}  // namespace residuum
