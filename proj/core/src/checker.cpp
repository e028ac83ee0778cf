#include "residuum/checker.hpp"

#include <algorithm>
#include <set>

namespace residuum {

namespace {

using namespace ast;

bool effectKind(DiagKind k) {
  switch (k) {
    case DiagKind::UndefinedSeq:
    case DiagKind::UndefinedJoin:
    case DiagKind::UndefinedIter:
    case DiagKind::ResidualUndefined:
    case DiagKind::BoundExceeded:
    case DiagKind::UncaughtException:
      return true;
    default:
      return false;
  }
}

struct Synth {
  Type type;
  std::optional<ControlEffect> rel;
};

enum class Commit { Ok, Dropped, Poisoned };

class Checker {
 public:
  Checker(const Module& m, const ResolvedModule& r,
          std::shared_ptr<const EffectSystem> system, CheckOptions opts)
      : m_(m),
        r_(r),
        sys_(std::move(system)),
        algebra_(sys_, r.poset),
        opts_(opts) {}

  CheckResult runModule() {
    CheckResult out;
    early_ = opts_.early;
    for (std::size_t i = 0; i < m_.fns.size(); ++i)
      out.fnEffects.push_back(checkFn(i));
    out.diags = std::move(diags_);
    sortDiagnostics(out.diags);
    out.residualEvals = std::move(counts_);
    return out;
  }

  BlockJudgment judgeBody(std::size_t fnIdx, const ControlEffect& chi0,
                          const ControlEffect& bound, bool early) {
    early_ = early;
    fnIdx_ = fnIdx;
    bound_ = bound;
    ignore_ = {ControlTag::returnFrom(static_cast<std::uint32_t>(fnIdx))};
    bindFnParams(fnIdx);

    BlockJudgment j;
    Ctx ctx;
    ctx.chi0 = chi0;
    if (early_) {
      std::optional<ControlEffect> r0 =
          algebra_.residual(chi0, bound, &ignore_);
      if (!r0) {
        const Block& b = m_.block(m_.fns[fnIdx].body);
        diag(DiagKind::ResidualUndefined, b.span,
             "the incoming prefix cannot be extended to the bound",
             algebra_.show(chi0), algebra_.show(bound));
        j.accepted = false;
        j.diags = takeDiags();
        j.firstFailureOffset = earliestEffectOffset(j.diags);
        return j;
      }
      ctx.R = *r0;
    } else {
      ctx.R = bound;
    }

    Synth body = checkBlock(m_.fns[fnIdx].body, ctx);
    j.diags = takeDiags();
    j.accepted = j.diags.empty();
    if (j.accepted && !ctx.poisoned) j.rel = body.rel;
    j.firstFailureOffset = earliestEffectOffset(j.diags);
    return j;
  }

 private:
  struct Ctx {
    ControlEffect chi0;  // absolute prefix; entries local to the escape scope
    ControlEffect R;     // remaining budget, meaningful in early mode
    bool poisoned = false;
  };

  // ---- bookkeeping ----

  void diag(DiagKind kind, Span span, std::string message,
            std::string sofar = "", std::string target = "") {
    if (!dedup_.insert({span.begin, span.end, static_cast<int>(kind)}).second)
      return;
    diags_.push_back(Diagnostic{kind, m_.file, span, std::move(message),
                                std::move(sofar), std::move(target),
                                std::string(sys_->id())});
  }

  std::vector<Diagnostic> takeDiags() {
    std::vector<Diagnostic> out = std::move(diags_);
    diags_.clear();
    dedup_.clear();
    sortDiagnostics(out);
    return out;
  }

  static std::optional<std::size_t> earliestEffectOffset(
      const std::vector<Diagnostic>& diags) {
    std::optional<std::size_t> best;
    for (const Diagnostic& d : diags)
      if (effectKind(d.kind) && (!best || d.span.begin < *best))
        best = d.span.begin;
    return best;
  }

  void countResidual(Span span) { ++counts_[span.begin]; }

  void bindFnParams(std::size_t fnIdx) {
    env_.assign(r_.varCount, std::nullopt);
    const FnSig& sig = r_.sigs[fnIdx];
    const auto& vars = r_.fnParamVars[fnIdx];
    for (std::size_t i = 0; i < vars.size() && i < sig.paramTypes.size(); ++i)
      env_[vars[i]] = sig.paramTypes[i];
  }

  // ---- effect commits ----

  bool residualChecksOn() const { return early_ && !opts_.skipResidualChecks; }

  // Tentatively extends the path by `lat`; in early mode also tests that the
  // extension still fits the remaining budget.
  Commit commitLatent(const ControlEffect& lat, Span span, Ctx& ctx) {
    if (ctx.poisoned) return Commit::Poisoned;
    std::optional<ControlEffect> tentative = algebra_.seq(ctx.chi0, lat);
    if (!tentative) {
      diag(DiagKind::UndefinedSeq, span,
           "'" + algebra_.show(ctx.chi0) + "' cannot be followed by '" +
               algebra_.show(lat) + "'",
           algebra_.show(ctx.chi0), algebra_.show(bound_));
      ctx.poisoned = true;
      return Commit::Poisoned;
    }
    ControlEffect saved = ctx.chi0;
    ctx.chi0 = std::move(*tentative);
    if (residualChecksOn()) {
      countResidual(span);
      std::optional<ControlEffect> r2 = algebra_.residual(lat, ctx.R, &ignore_);
      if (!r2) {
        diag(DiagKind::ResidualUndefined, span,
             "effect '" + algebra_.show(lat) +
                 "' cannot be extended to the declared bound",
             algebra_.show(ctx.chi0), algebra_.show(bound_));
        if (sys_->commutative()) {
          ctx.chi0 = std::move(saved);
          return Commit::Dropped;
        }
        ctx.poisoned = true;
        return Commit::Poisoned;
      }
      ctx.R = std::move(*r2);
    }
    return Commit::Ok;
  }

  // break/return: fold the escape into the path. The escape budget is
  // enforced where the escape lands, so there is no residual test here.
  Commit commitEscape(const ControlTag& tag, Span span, Ctx& ctx) {
    if (ctx.poisoned) return Commit::Poisoned;
    ControlEffect esc = algebra_.escape(tag);
    std::optional<ControlEffect> tentative = algebra_.seq(ctx.chi0, esc);
    if (!tentative) {
      diag(DiagKind::UndefinedSeq, span,
           "escape prefixes for '" + tag.display() + "' have no join",
           algebra_.show(ctx.chi0), algebra_.show(bound_));
      ctx.poisoned = true;
      return Commit::Poisoned;
    }
    ctx.chi0 = std::move(*tentative);
    return Commit::Ok;
  }

  // ---- relative-effect folds (mirror the absolute commits; failures here
  // are defensive and surface at the same spans) ----

  std::optional<ControlEffect> relSeq(std::optional<ControlEffect> acc,
                                      const std::optional<ControlEffect>& next,
                                      Span span, Ctx& ctx) {
    if (!acc || !next) return std::nullopt;
    std::optional<ControlEffect> r = algebra_.seq(*acc, *next);
    if (!r && !ctx.poisoned) {
      diag(DiagKind::UndefinedSeq, span,
           "'" + algebra_.show(*acc) + "' cannot be followed by '" +
               algebra_.show(*next) + "'",
           algebra_.show(*acc), algebra_.show(bound_));
      ctx.poisoned = true;
    }
    return r;
  }

  // ---- expressions ----

  Synth checkBlock(BlockId id, Ctx& ctx) {
    const Block& b = m_.block(id);
    Synth out{Type::simple(Type::Kind::Unit), algebra_.unit()};
    for (StmtId sid : b.stmts) {
      const Stmt& s = m_.stmt(sid);
      Synth v = checkExpr(s.expr, ctx);
      if (s.kind == Stmt::Kind::Let) {
        if (s.declaredType != kNone && !(r_.types[s.declaredType] == v.type))
          diag(DiagKind::TypeMismatch, s.span,
               "initializer has type '" + v.type.show(*sys_) +
                   "' but the annotation says '" +
                   r_.types[s.declaredType].show(*sys_) + "'");
        auto it = r_.letVars.find(sid);
        if (it != r_.letVars.end()) env_[it->second] = v.type;
      }
      out.rel = relSeq(out.rel, v.rel, m_.expr(s.expr).span, ctx);
    }
    if (b.tail != kNone) {
      Synth v = checkExpr(b.tail, ctx);
      out.type = v.type;
      out.rel = relSeq(out.rel, v.rel, m_.expr(b.tail).span, ctx);
    }
    if (ctx.poisoned) out.rel = std::nullopt;
    return out;
  }

  Synth checkExpr(ExprId id, Ctx& ctx) {
    const Expr& e = m_.expr(id);
    return std::visit([&](const auto& node) { return check(id, e, node, ctx); },
                      e.node);
  }

  Synth pure(Type t) { return Synth{std::move(t), algebra_.unit()}; }

  Synth check(ExprId, const Expr&, const UnitLit&, Ctx&) {
    return pure(Type::simple(Type::Kind::Unit));
  }
  Synth check(ExprId, const Expr&, const BoolLit&, Ctx&) {
    return pure(Type::simple(Type::Kind::Bool));
  }
  Synth check(ExprId, const Expr&, const IntLit&, Ctx&) {
    return pure(Type::simple(Type::Kind::Int));
  }

  Synth check(ExprId id, const Expr& e, const VarRef&, Ctx&) {
    auto it = r_.bindings.find(id);
    if (it == r_.bindings.end()) return pure(Type::simple(Type::Kind::Unit));
    if (it->second.kind == Binding::Kind::GlobalFn)
      return pure(r_.sigs[it->second.index].asValue());
    const auto& slot = env_[it->second.index];
    (void)e;
    return pure(slot ? *slot : Type::simple(Type::Kind::Unit));
  }

  Synth check(ExprId id, const Expr& e, const PerformExpr&, Ctx& ctx) {
    auto it = r_.performEffects.find(id);
    if (it == r_.performEffects.end())
      return pure(Type::simple(Type::Kind::Unit));
    ControlEffect lat = algebra_.lift(it->second);
    Commit c = commitLatent(lat, e.span, ctx);
    Synth out{Type::simple(Type::Kind::Unit), std::nullopt};
    if (c == Commit::Ok)
      out.rel = lat;
    else if (c == Commit::Dropped)
      out.rel = algebra_.unit();
    return out;
  }

  Synth check(ExprId, const Expr& e, const ThrowExpr& node, Ctx& ctx) {
    ControlTag tag = ControlTag::exception(node.exception);
    ControlEffect lat = algebra_.escape(tag);
    Commit c = commitLatent(lat, e.span, ctx);
    Synth out{Type::simple(Type::Kind::Unit), std::nullopt};
    if (c == Commit::Ok)
      out.rel = lat;
    else if (c == Commit::Dropped)
      out.rel = algebra_.unit();
    return out;
  }

  Synth check(ExprId id, const Expr& e, const BreakExpr&, Ctx& ctx) {
    auto it = r_.breakTargets.find(id);
    Synth out{Type::simple(Type::Kind::Unit), std::nullopt};
    if (it == r_.breakTargets.end()) return out;
    const auto& loopNode = m_.expr(it->second).node;
    const WhileExpr* loop = std::get_if<WhileExpr>(&loopNode);
    ControlTag tag =
        ControlTag::breakTo(it->second, loop ? loop->label : "");
    Commit c = commitEscape(tag, e.span, ctx);
    if (c == Commit::Ok) out.rel = algebra_.escape(tag);
    return out;
  }

  Synth check(ExprId, const Expr& e, const ReturnExpr& node, Ctx& ctx) {
    Synth out{Type::simple(Type::Kind::Unit), std::nullopt};
    std::optional<ControlEffect> valueRel = algebra_.unit();
    if (node.value != kNone) {
      Synth v = checkExpr(node.value, ctx);
      valueRel = v.rel;
      if (!(v.type == r_.sigs[fnIdx_].result))
        diag(DiagKind::TypeMismatch, e.span,
             "returned value has type '" + v.type.show(*sys_) +
                 "' but the function returns '" +
                 r_.sigs[fnIdx_].result.show(*sys_) + "'");
    } else if (!(r_.sigs[fnIdx_].result == Type::simple(Type::Kind::Unit))) {
      diag(DiagKind::TypeMismatch, e.span,
           "bare 'return' in a function returning '" +
               r_.sigs[fnIdx_].result.show(*sys_) + "'");
    }
    ControlTag tag =
        ControlTag::returnFrom(static_cast<std::uint32_t>(fnIdx_));
    Commit c = commitEscape(tag, e.span, ctx);
    if (c == Commit::Ok && valueRel)
      out.rel = relSeq(valueRel, algebra_.escape(tag), e.span, ctx);
    return out;
  }

  Synth check(ExprId, const Expr& e, const CallExpr& node, Ctx& ctx) {
    Synth f = checkExpr(node.callee, ctx);
    std::vector<Synth> args;
    args.reserve(node.args.size());
    for (ExprId a : node.args) args.push_back(checkExpr(a, ctx));

    Synth out{Type::simple(Type::Kind::Unit), std::nullopt};
    if (f.type.kind != Type::Kind::Fn) {
      diag(DiagKind::NotAFunction, m_.expr(node.callee).span,
           "value of type '" + f.type.show(*sys_) + "' is not callable");
      return out;
    }
    if (f.type.params.size() != args.size()) {
      diag(DiagKind::TypeMismatch, e.span,
           "call passes " + std::to_string(args.size()) +
               " arguments but the function takes " +
               std::to_string(f.type.params.size()));
    } else {
      for (std::size_t i = 0; i < args.size(); ++i)
        if (!(args[i].type == f.type.params[i]))
          diag(DiagKind::TypeMismatch, m_.expr(node.args[i]).span,
               "argument has type '" + args[i].type.show(*sys_) +
                   "' but the parameter takes '" +
                   f.type.params[i].show(*sys_) + "'");
    }
    out.type = f.type.result ? *f.type.result : Type::simple(Type::Kind::Unit);

    // A direct call to a named function carries its full declared behavior,
    // escape budgets included; calling through a value carries the type's
    // latent effect.
    ControlEffect lat = algebra_.lift(sys_->unit());
    auto bind = r_.bindings.find(node.callee);
    if (bind != r_.bindings.end() &&
        bind->second.kind == Binding::Kind::GlobalFn) {
      lat = r_.sigs[bind->second.index].bound;
    } else if (f.type.latent) {
      lat = algebra_.lift(*f.type.latent);
    }

    Commit c = commitLatent(lat, e.span, ctx);
    if (c == Commit::Poisoned) return out;

    std::optional<ControlEffect> rel = f.rel;
    for (const Synth& a : args) rel = relSeq(rel, a.rel, e.span, ctx);
    if (c == Commit::Ok)
      rel = relSeq(rel, lat, e.span, ctx);
    out.rel = rel;
    return out;
  }

  Synth check(ExprId id, const Expr& e, const LambdaExpr& node, Ctx&) {
    auto latentIt = r_.lambdaLatents.find(id);
    Effect latent = latentIt != r_.lambdaLatents.end() ? latentIt->second
                                                       : sys_->unit();
    std::vector<Type> paramTypes;
    auto varsIt = r_.lambdaParamVars.find(id);
    for (std::size_t i = 0; i < node.params.size(); ++i) {
      Type pt = node.params[i].type != kNone
                    ? r_.types[node.params[i].type]
                    : Type::simple(Type::Kind::Unit);
      if (varsIt != r_.lambdaParamVars.end() && i < varsIt->second.size())
        env_[varsIt->second[i]] = pt;
      paramTypes.push_back(std::move(pt));
    }

    // Lambdas are checked in a fresh context against their own latent
    // bound, independently of the path they are created on.
    ControlEffect savedBound = bound_;
    std::vector<ControlTag> savedIgnore = std::move(ignore_);
    ignore_.clear();
    bound_ = algebra_.lift(latent);

    Ctx lctx;
    lctx.chi0 = algebra_.unit();
    lctx.R = bound_;
    Synth body = checkExpr(node.body, lctx);

    if (!lctx.poisoned) {
      const ControlEffect& fin = lctx.chi0;
      for (const auto& [tag, p] : fin.entries)
        diag(DiagKind::UncaughtException, e.span,
             "lambda may raise '" + tag.display() +
                 "', but lambdas declare no escapes",
             sys_->show(p), "");
      if (fin.underlying && !sys_->le(*fin.underlying, latent))
        diag(DiagKind::BoundExceeded, e.span,
             "lambda body exceeds its latent effect", sys_->show(*fin.underlying),
             sys_->show(latent));
    }

    bound_ = std::move(savedBound);
    ignore_ = std::move(savedIgnore);

    Type t;
    t.kind = Type::Kind::Fn;
    t.params = std::move(paramTypes);
    t.result = std::make_shared<Type>(body.type);
    t.latent = latent;
    return Synth{std::move(t), algebra_.unit()};
  }

  Synth check(ExprId, const Expr& e, const IfExpr& node, Ctx& ctx) {
    Synth c = checkExpr(node.cond, ctx);
    if (!(c.type == Type::simple(Type::Kind::Bool)))
      diag(DiagKind::TypeMismatch, m_.expr(node.cond).span,
           "condition has type '" + c.type.show(*sys_) + "', expected 'bool'");

    ControlEffect chi0c = ctx.chi0;
    ControlEffect Rc = ctx.R;
    bool condPoisoned = ctx.poisoned;

    Ctx tctx = ctx;
    Synth t = checkBlock(node.thenBlock, tctx);
    Ctx ectx = ctx;
    Synth el{Type::simple(Type::Kind::Unit), algebra_.unit()};
    if (node.elseBlock != kNone) el = checkBlock(node.elseBlock, ectx);

    Synth out{Type::simple(Type::Kind::Unit), std::nullopt};
    if (node.elseBlock != kNone) {
      if (!(t.type == el.type))
        diag(DiagKind::TypeMismatch, e.span,
             "branches have types '" + t.type.show(*sys_) + "' and '" +
                 el.type.show(*sys_) + "'");
      out.type = t.type;
    } else if (!(t.type == Type::simple(Type::Kind::Unit))) {
      diag(DiagKind::TypeMismatch, e.span,
           "an if without else has type 'unit', but the branch has type '" +
               t.type.show(*sys_) + "'");
    }

    if (condPoisoned) {
      ctx.poisoned = true;
      return out;
    }
    if (tctx.poisoned && ectx.poisoned) {
      ctx.poisoned = true;
      ctx.chi0 = chi0c;
      return out;
    }
    if (tctx.poisoned) {
      ctx = std::move(ectx);
      out.rel = relSeq(c.rel, el.rel, e.span, ctx);
      return out;
    }
    if (ectx.poisoned) {
      ctx = std::move(tctx);
      out.rel = relSeq(c.rel, t.rel, e.span, ctx);
      return out;
    }

    std::optional<ControlEffect> joined = algebra_.join(tctx.chi0, ectx.chi0);
    if (!joined) {
      diag(DiagKind::UndefinedJoin, e.span,
           "branch effects '" +
               (t.rel ? algebra_.show(*t.rel) : "?") + "' and '" +
               (el.rel ? algebra_.show(*el.rel) : "?") + "' have no join",
           algebra_.show(chi0c), algebra_.show(bound_));
      ctx.poisoned = true;
      ctx.chi0 = chi0c;
      return out;
    }
    ctx.chi0 = std::move(*joined);
    ctx.R = Rc;

    std::optional<ControlEffect> branchRel;
    if (t.rel && el.rel) branchRel = algebra_.join(*t.rel, *el.rel);
    if (!branchRel) {
      diag(DiagKind::UndefinedJoin, e.span,
           "branch effects have no join", algebra_.show(chi0c),
           algebra_.show(bound_));
      ctx.poisoned = true;
      ctx.chi0 = chi0c;
      return out;
    }

    if (residualChecksOn()) {
      countResidual(e.span);
      std::optional<ControlEffect> r2 =
          algebra_.residual(*branchRel, Rc, &ignore_);
      if (!r2) {
        diag(DiagKind::ResidualUndefined, e.span,
             "the joined branch effect '" + algebra_.show(*branchRel) +
                 "' cannot be extended to the declared bound",
             algebra_.show(ctx.chi0), algebra_.show(bound_));
        if (sys_->commutative()) {
          ctx.chi0 = chi0c;
          ctx.R = Rc;
          out.rel = c.rel;
          return out;
        }
        ctx.poisoned = true;
        return out;
      }
      ctx.R = std::move(*r2);
    }
    out.rel = relSeq(c.rel, branchRel, e.span, ctx);
    return out;
  }

  Synth check(ExprId id, const Expr& e, const WhileExpr& node, Ctx& ctx) {
    Synth c = checkExpr(node.cond, ctx);
    if (!(c.type == Type::simple(Type::Kind::Bool)))
      diag(DiagKind::TypeMismatch, m_.expr(node.cond).span,
           "loop condition has type '" + c.type.show(*sys_) +
               "', expected 'bool'");

    Synth out{Type::simple(Type::Kind::Unit), std::nullopt};
    if (ctx.poisoned) return out;

    ControlEffect chi0c = ctx.chi0;
    ControlEffect Rc = ctx.R;
    ControlTag breakTag = ControlTag::breakTo(id, node.label);

    Ctx bctx = ctx;
    ignore_.push_back(breakTag);
    Synth b = checkBlock(node.body, bctx);
    ignore_.pop_back();

    if (bctx.poisoned || !b.rel || !c.rel) {
      ctx.poisoned = true;
      return out;
    }

    std::optional<ControlEffect> step = algebra_.seq(*b.rel, *c.rel);
    if (!step) {
      diag(DiagKind::UndefinedSeq, e.span,
           "one loop pass '" + algebra_.show(*b.rel) +
               "' cannot be followed by the condition effect '" +
               algebra_.show(*c.rel) + "'",
           algebra_.show(chi0c), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }
    std::optional<ControlEffect> it = algebra_.iter(*step);
    if (!it) {
      diag(DiagKind::UndefinedIter, e.span,
           "loop effect '" + algebra_.show(*step) + "' cannot be iterated",
           algebra_.show(chi0c), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }
    std::optional<ControlEffect> whole = algebra_.seq(ctx.chi0, *it);
    if (!whole) {
      diag(DiagKind::UndefinedSeq, e.span,
           "'" + algebra_.show(ctx.chi0) + "' cannot be followed by '" +
               algebra_.show(*it) + "'",
           algebra_.show(ctx.chi0), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }
    std::optional<ControlEffect> flat =
        algebra_.flatten(*whole, {breakTag});
    if (!flat) {
      diag(DiagKind::UndefinedJoin, e.span,
           "break paths and the loop exit have no join",
           algebra_.show(*whole), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }
    ctx.chi0 = std::move(*flat);

    std::optional<ControlEffect> relSeqd = algebra_.seq(*c.rel, *it);
    std::optional<ControlEffect> rel =
        relSeqd ? algebra_.flatten(*relSeqd, {breakTag}) : std::nullopt;
    if (!rel) {
      diag(DiagKind::UndefinedSeq, e.span, "loop effect has no composition",
           algebra_.show(chi0c), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }

    if (residualChecksOn()) {
      countResidual(e.span);
      std::optional<ControlEffect> rn =
          algebra_.residual(ctx.chi0, bound_, &ignore_);
      if (!rn) {
        diag(DiagKind::ResidualUndefined, e.span,
             "the iterated loop effect cannot be extended to the declared "
             "bound",
             algebra_.show(ctx.chi0), algebra_.show(bound_));
        if (sys_->commutative()) {
          ctx.chi0 = chi0c;
          ctx.R = Rc;
          out.rel = c.rel;
          return out;
        }
        ctx.poisoned = true;
        return out;
      }
      ctx.R = std::move(*rn);
    }
    out.rel = rel;
    return out;
  }

  Synth check(ExprId, const Expr& e, const TryExpr& node, Ctx& ctx) {
    ControlEffect chi0Entry = ctx.chi0;
    ControlEffect REntry = ctx.R;

    // Escapes accumulated before the try cannot be caught by it; keep them
    // aside so the body's own escapes meet the clauses in isolation.
    ctx.chi0.entries.clear();

    std::size_t ignoreBase = ignore_.size();
    for (const CatchClause& cl : node.catches)
      ignore_.push_back(ControlTag::exception(cl.exception));
    Synth b = checkBlock(node.body, ctx);
    ignore_.resize(ignoreBase);

    Synth out{b.type, std::nullopt};
    if (ctx.poisoned || !b.rel) {
      ctx.poisoned = true;
      return out;
    }
    ControlEffect bodyAbs = ctx.chi0;

    std::vector<std::pair<ControlTag, ControlEffect>> clauses;
    std::vector<bool> claimed(bodyAbs.entries.size(), false);
    bool handlerPoisoned = false;

    for (const CatchClause& cl : node.catches) {
      ControlTag tag = ControlTag::exception(cl.exception);
      std::optional<Effect> pAbs;
      bool joinFailed = false;
      for (std::size_t i = 0; i < bodyAbs.entries.size(); ++i) {
        if (claimed[i]) continue;
        if (!algebra_.poset().leq(bodyAbs.entries[i].first, tag)) continue;
        claimed[i] = true;
        if (!pAbs) {
          pAbs = bodyAbs.entries[i].second;
        } else {
          std::optional<Effect> j =
              sys_->join(*pAbs, bodyAbs.entries[i].second);
          if (!j) {
            joinFailed = true;
            break;
          }
          pAbs = std::move(*j);
        }
      }
      if (joinFailed) {
        diag(DiagKind::UndefinedJoin, e.span,
             "caught prefixes for '" + tag.display() + "' have no join",
             algebra_.show(bodyAbs), algebra_.show(bound_));
        ctx.poisoned = true;
        return out;
      }
      if (!pAbs) pAbs = chi0Entry.underlying;

      Ctx hctx;
      if (pAbs) {
        hctx.chi0 = algebra_.lift(*pAbs);
      } else {
        hctx.chi0 = algebra_.unit();
      }
      if (residualChecksOn()) {
        std::optional<ControlEffect> rh =
            algebra_.residual(hctx.chi0, bound_, &ignore_);
        if (!rh) {
          diag(DiagKind::ResidualUndefined, m_.block(cl.block).span,
               "the handler entry effect cannot be extended to the declared "
               "bound",
               algebra_.show(hctx.chi0), algebra_.show(bound_));
          handlerPoisoned = true;
          continue;
        }
        hctx.R = std::move(*rh);
      } else {
        hctx.R = bound_;
      }
      Synth h = checkBlock(cl.block, hctx);
      if (!(h.type == b.type))
        diag(DiagKind::TypeMismatch, m_.block(cl.block).span,
             "handler has type '" + h.type.show(*sys_) +
                 "' but the try body has type '" + b.type.show(*sys_) + "'");
      if (hctx.poisoned || !h.rel) {
        handlerPoisoned = true;
        continue;
      }
      clauses.push_back({tag, *h.rel});
    }

    if (handlerPoisoned) {
      ctx.poisoned = true;
      return out;
    }

    std::optional<ControlEffect> handled = algebra_.handle(*b.rel, clauses);
    if (!handled) {
      diag(DiagKind::UndefinedJoin, e.span,
           "caught and uncaught paths of the try have no join",
           algebra_.show(*b.rel), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }
    std::pair<ControlTag, ControlTag> conflict;
    std::optional<ControlEffect> norm = algebra_.normalize(*handled, &conflict);
    if (!norm) {
      diag(DiagKind::UndefinedJoin, e.span,
           "escape budgets for '" + conflict.first.display() + "' and '" +
               conflict.second.display() + "' have no join",
           algebra_.show(*handled), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }
    std::optional<ControlEffect> whole = algebra_.seq(chi0Entry, *norm);
    if (!whole) {
      diag(DiagKind::UndefinedSeq, e.span,
           "'" + algebra_.show(chi0Entry) + "' cannot be followed by '" +
               algebra_.show(*norm) + "'",
           algebra_.show(chi0Entry), algebra_.show(bound_));
      ctx.poisoned = true;
      return out;
    }
    ctx.chi0 = std::move(*whole);

    if (residualChecksOn()) {
      countResidual(e.span);
      std::optional<ControlEffect> rn =
          algebra_.residual(ctx.chi0, bound_, &ignore_);
      if (!rn) {
        diag(DiagKind::ResidualUndefined, e.span,
             "the try's combined effect cannot be extended to the declared "
             "bound",
             algebra_.show(ctx.chi0), algebra_.show(bound_));
        if (sys_->commutative()) {
          ctx.chi0 = chi0Entry;
          ctx.R = REntry;
          out.rel = algebra_.unit();
          return out;
        }
        ctx.poisoned = true;
        return out;
      }
      ctx.R = std::move(*rn);
    }
    out.rel = norm;
    return out;
  }

  Synth check(ExprId, const Expr&, const BlockExpr& node, Ctx& ctx) {
    return checkBlock(node.block, ctx);
  }

  // ---- function boundary ----

  std::optional<ControlEffect> checkFn(std::size_t fnIdx) {
    const FnDecl& fn = m_.fns[fnIdx];
    const FnSig& sig = r_.sigs[fnIdx];
    fnIdx_ = fnIdx;
    bound_ = sig.bound;
    ignore_ = {ControlTag::returnFrom(static_cast<std::uint32_t>(fnIdx))};
    bindFnParams(fnIdx);

    Ctx ctx;
    ctx.chi0 = algebra_.unit();
    ctx.R = bound_;

    Synth body = checkBlock(fn.body, ctx);
    if (ctx.poisoned) return std::nullopt;

    ControlTag retTag =
        ControlTag::returnFrom(static_cast<std::uint32_t>(fnIdx));
    std::optional<ControlEffect> flat = algebra_.flatten(ctx.chi0, {retTag});
    if (!flat) {
      diag(DiagKind::UndefinedJoin, fn.nameSpan,
           "return paths of '" + fn.name + "' have no join",
           algebra_.show(ctx.chi0), algebra_.show(bound_));
      return std::nullopt;
    }
    std::pair<ControlTag, ControlTag> conflict;
    std::optional<ControlEffect> norm = algebra_.normalize(*flat, &conflict);
    if (!norm) {
      diag(DiagKind::UndefinedJoin, fn.nameSpan,
           "escape budgets for '" + conflict.first.display() + "' and '" +
               conflict.second.display() + "' have no join",
           algebra_.show(*flat), algebra_.show(bound_));
      return std::nullopt;
    }

    // When some path completes normally, the body's value must fit the
    // declared result type; when none does, there is no value to compare.
    if (norm->underlying && !(body.type == sig.result)) {
      Span at = fn.nameSpan;
      const Block& b = m_.block(fn.body);
      if (b.tail != kNone) at = m_.expr(b.tail).span;
      diag(DiagKind::TypeMismatch, at,
           "body has type '" + body.type.show(*sys_) +
               "' but the function returns '" + sig.result.show(*sys_) + "'");
    }

    if (norm->underlying && !sys_->le(*norm->underlying, sig.base))
      diag(DiagKind::BoundExceeded, fn.nameSpan,
           "the body of '" + fn.name + "' exceeds its declared effect",
           sys_->show(*norm->underlying), sys_->show(sig.base));

    for (const auto& [tag, p] : norm->entries) {
      bool bounded = false;
      for (const auto& [dtag, q] : sig.bound.entries) {
        if (algebra_.poset().leq(tag, dtag) && sys_->le(p, q)) {
          bounded = true;
          break;
        }
      }
      if (!bounded)
        diag(DiagKind::UncaughtException, fn.nameSpan,
             "exception '" + tag.display() + "' may escape '" + fn.name +
                 "' outside its declared budget",
             sys_->show(p), "");
    }
    return norm;
  }

  const Module& m_;
  const ResolvedModule& r_;
  std::shared_ptr<const EffectSystem> sys_;
  ControlAlgebra algebra_;
  CheckOptions opts_;

  bool early_ = true;
  std::size_t fnIdx_ = 0;
  ControlEffect bound_;
  std::vector<ControlTag> ignore_;
  std::vector<std::optional<Type>> env_;

  std::vector<Diagnostic> diags_;
  std::set<std::tuple<std::size_t, std::size_t, int>> dedup_;
  std::map<std::size_t, std::size_t> counts_;
};

}  // namespace

bool isEffectDiagnostic(DiagKind kind) { return effectKind(kind); }

std::optional<std::size_t> earliestEffectFailure(
    const std::vector<Diagnostic>& diags) {
  std::optional<std::size_t> best;
  for (const Diagnostic& d : diags)
    if (effectKind(d.kind) && (!best || d.span.begin < *best))
      best = d.span.begin;
  return best;
}

CheckResult checkModule(const ast::Module& m, const ResolvedModule& r,
                        std::shared_ptr<const EffectSystem> system,
                        const CheckOptions& options) {
  Checker c(m, r, std::move(system), options);
  return c.runModule();
}

BlockJudgment synthesizeBody(const ast::Module& m, const ResolvedModule& r,
                             std::shared_ptr<const EffectSystem> system,
                             std::size_t fnIndex) {
  Checker c(m, r, system, CheckOptions{false, false});
  ControlAlgebra algebra(system, r.poset);
  return c.judgeBody(fnIndex, algebra.unit(), r.sigs[fnIndex].bound, false);
}

BlockJudgment checkBodyEarly(const ast::Module& m, const ResolvedModule& r,
                             std::shared_ptr<const EffectSystem> system,
                             std::size_t fnIndex, const ControlEffect& chi0,
                             const ControlEffect& bound) {
  Checker c(m, r, std::move(system), CheckOptions{true, false});
  return c.judgeBody(fnIndex, chi0, bound, true);
}

}  // namespace residuum
