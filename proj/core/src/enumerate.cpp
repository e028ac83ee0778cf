#include "residuum/enumerate.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "residuum/checker.hpp"
#include "residuum/control.hpp"
#include "residuum/parser.hpp"
#include "residuum/resolve.hpp"

namespace residuum {

namespace {

// ---- statement shapes ----

struct TreeNode;
using Tree = std::shared_ptr<const TreeNode>;

struct TreeNode {
  enum class Kind { Atom, Seq, If, While, LamApp } kind;
  std::size_t atom = 0;
  Tree a, b;
};

Tree atomTree(std::size_t atom) {
  return std::make_shared<TreeNode>(TreeNode{TreeNode::Kind::Atom, atom, nullptr, nullptr});
}
Tree node2(TreeNode::Kind k, Tree a, Tree b) {
  return std::make_shared<TreeNode>(TreeNode{k, 0, std::move(a), std::move(b)});
}
Tree lamTree(std::size_t atom) {
  return std::make_shared<TreeNode>(TreeNode{TreeNode::Kind::LamApp, atom, nullptr, nullptr});
}

// Enumerates every shape with exactly `n` nodes.  Loop bodies are restricted
// to atoms and blocks so every loop iterates a plain composition.
class TreeEnum {
public:
  explicit TreeEnum(std::size_t atomCount) : k_(atomCount) {}

  const std::vector<Tree>& exact(std::size_t n, bool loopBody) {
    auto key = std::make_pair(n, loopBody);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Tree> out;
    if (n == 1) {
      for (std::size_t a = 0; a < k_; ++a) out.push_back(atomTree(a));
    } else if (n >= 3) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        for (const Tree& l : exact(i, loopBody))
          for (const Tree& r : exact(n - 1 - i, loopBody))
            out.push_back(node2(TreeNode::Kind::Seq, l, r));
      }
      if (!loopBody) {
        for (std::size_t i = 1; i + 2 < n; ++i) {
          for (const Tree& t : exact(i, false))
            for (const Tree& f : exact(n - 2 - i, false))
              out.push_back(node2(TreeNode::Kind::If, t, f));
        }
        for (const Tree& b : exact(n - 2, true))
          out.push_back(node2(TreeNode::Kind::While, b, nullptr));
        if (n == 4)
          for (std::size_t a = 0; a < k_; ++a) out.push_back(lamTree(a));
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  std::vector<Tree> upTo(std::size_t maxNodes) {
    std::vector<Tree> out;
    for (std::size_t n = 1; n <= maxNodes; ++n) {
      const auto& v = exact(n, false);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

private:
  std::size_t k_;
  std::map<std::pair<std::size_t, bool>, std::vector<Tree>> memo_;
};

// ---- rendering ----

struct AtomTable {
  std::vector<std::string> labels;
  std::vector<Effect> effects;
};

struct Rendered {
  std::string source;
  // Offsets that must record exactly one residual evaluation on accepted
  // early runs.
  std::vector<std::size_t> checkpoints;
  // Reporting offset of every node in walk order; applied lambdas occupy two
  // slots (the call, then the atom inside the lambda).
  std::vector<std::size_t> preorder;
};

void renderStmt(const Tree& t, int depth, const EffectSystem& sys,
                const AtomTable& atoms, Rendered& r) {
  std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
  switch (t->kind) {
    case TreeNode::Kind::Atom: {
      r.source += pad;
      r.checkpoints.push_back(r.source.size());
      r.preorder.push_back(r.source.size());
      r.source += "perform " + atoms.labels[t->atom] + ";\n";
      break;
    }
    case TreeNode::Kind::Seq: {
      r.source += pad;
      r.preorder.push_back(r.source.size());
      r.source += "{\n";
      renderStmt(t->a, depth + 1, sys, atoms, r);
      renderStmt(t->b, depth + 1, sys, atoms, r);
      r.source += pad + "}\n";
      break;
    }
    case TreeNode::Kind::If: {
      r.source += pad;
      r.checkpoints.push_back(r.source.size());
      r.preorder.push_back(r.source.size());
      r.source += "if (true) {\n";
      renderStmt(t->a, depth + 1, sys, atoms, r);
      r.source += pad + "} else {\n";
      renderStmt(t->b, depth + 1, sys, atoms, r);
      r.source += pad + "}\n";
      break;
    }
    case TreeNode::Kind::While: {
      r.source += pad;
      r.checkpoints.push_back(r.source.size());
      r.preorder.push_back(r.source.size());
      r.source += "while (true) {\n";
      renderStmt(t->a, depth + 1, sys, atoms, r);
      r.source += pad + "}\n";
      break;
    }
    case TreeNode::Kind::LamApp: {
      r.source += pad + "(";
      r.checkpoints.push_back(r.source.size());
      r.preorder.push_back(r.source.size());
      r.source += "\\(u: unit) @effect(" + sys.show(atoms.effects[t->atom]) +
                  ") => ";
      r.checkpoints.push_back(r.source.size());
      r.preorder.push_back(r.source.size());
      r.source += "perform " + atoms.labels[t->atom] + ")(());\n";
      break;
    }
  }
}

Rendered renderProgram(const Tree& t, const Effect& bound,
                       const EffectSystem& sys, const AtomTable& atoms) {
  Rendered r;
  r.source = "fn main() -> unit @effect(" + sys.show(bound) + ") {\n";
  renderStmt(t, 1, sys, atoms, r);
  r.source += "}\n";
  return r;
}

// ---- the oracle ----
//
// Recomputes the expected judgment for a rendered program directly from the
// algebra tables.  It never calls EffectSystem::residual: "the remaining
// computation can still fit" is decided by scanning the carrier for a
// witness, which is the defining property the checker's residual must
// track.

class Oracle {
public:
  Oracle(const EffectSystem& sys, std::vector<Effect> carrier,
         const AtomTable& atoms)
      : sys_(sys), carrier_(std::move(carrier)), atoms_(atoms) {}

  struct Outcome {
    bool accepted = false;
    std::optional<Effect> finalEffect;
    std::optional<std::size_t> firstFailure;
  };

  Outcome run(const Tree& t, const std::vector<std::size_t>& preorder,
              const Effect& bound, bool early) {
    offsets_ = &preorder;
    cursor_ = 0;
    failures_.clear();
    bound_ = bound;
    early_ = early;

    Ctx ctx{sys_.unit(), false};
    walk(t, ctx);
    if (!ctx.poisoned && !sys_.le(ctx.P, bound_))
      fail(3);  // reported on the function name, column 4 of line 1

    Outcome o;
    o.accepted = failures_.empty() && !ctx.poisoned;
    if (o.accepted) o.finalEffect = ctx.P;
    if (!failures_.empty())
      o.firstFailure = *std::min_element(failures_.begin(), failures_.end());
    return o;
  }

private:
  struct Ctx {
    Effect P;
    bool poisoned = false;
  };

  void fail(std::size_t off) { failures_.push_back(off); }

  // Is there any continuation x with P ; x <= bound?
  bool fits(const Effect& p, const Effect& bound) const {
    for (const Effect& x : carrier_) {
      std::optional<Effect> s = sys_.seq(p, x);
      if (s && sys_.le(*s, bound)) return true;
    }
    return false;
  }

  std::optional<Effect> walk(const Tree& t, Ctx& ctx) {
    switch (t->kind) {
      case TreeNode::Kind::Atom: {
        std::size_t off = (*offsets_)[cursor_++];
        if (ctx.poisoned) return std::nullopt;
        const Effect& eff = atoms_.effects[t->atom];
        std::optional<Effect> s = sys_.seq(ctx.P, eff);
        if (!s) {
          fail(off);
          ctx.poisoned = true;
          return std::nullopt;
        }
        if (early_ && !fits(*s, bound_)) {
          fail(off);
          if (sys_.commutative()) return sys_.unit();
          ctx.poisoned = true;
          return std::nullopt;
        }
        ctx.P = std::move(*s);
        return eff;
      }
      case TreeNode::Kind::Seq: {
        std::size_t off = (*offsets_)[cursor_++];
        std::optional<Effect> ra = walk(t->a, ctx);
        std::optional<Effect> rb = walk(t->b, ctx);
        if (ctx.poisoned || !ra || !rb) return std::nullopt;
        std::optional<Effect> r = sys_.seq(*ra, *rb);
        if (!r) {
          fail(off);
          ctx.poisoned = true;
          return std::nullopt;
        }
        return r;
      }
      case TreeNode::Kind::If: {
        std::size_t off = (*offsets_)[cursor_++];
        Ctx tctx = ctx;
        std::optional<Effect> rt = walk(t->a, tctx);
        Ctx ectx = ctx;
        std::optional<Effect> re = walk(t->b, ectx);
        if (ctx.poisoned) return std::nullopt;
        if (tctx.poisoned && ectx.poisoned) {
          ctx.poisoned = true;
          return std::nullopt;
        }
        if (tctx.poisoned) {
          ctx = ectx;
          return re;
        }
        if (ectx.poisoned) {
          ctx = tctx;
          return rt;
        }
        std::optional<Effect> j = sys_.join(tctx.P, ectx.P);
        std::optional<Effect> jr = (rt && re) ? sys_.join(*rt, *re) : std::nullopt;
        if (!j || !jr) {
          fail(off);
          ctx.poisoned = true;
          return std::nullopt;
        }
        if (early_ && !fits(*j, bound_)) {
          fail(off);
          if (sys_.commutative()) return sys_.unit();
          ctx.poisoned = true;
          return std::nullopt;
        }
        ctx.P = std::move(*j);
        return jr;
      }
      case TreeNode::Kind::While: {
        std::size_t off = (*offsets_)[cursor_++];
        Ctx bctx = ctx;
        std::optional<Effect> rb = walk(t->a, bctx);
        if (ctx.poisoned) return std::nullopt;
        if (bctx.poisoned || !rb) {
          ctx.poisoned = true;
          return std::nullopt;
        }
        std::optional<Effect> it = sys_.iter(*rb);
        if (!it) {
          fail(off);
          ctx.poisoned = true;
          return std::nullopt;
        }
        std::optional<Effect> whole = sys_.seq(ctx.P, *it);
        if (!whole) {
          fail(off);
          ctx.poisoned = true;
          return std::nullopt;
        }
        if (early_ && !fits(*whole, bound_)) {
          fail(off);
          if (sys_.commutative()) return sys_.unit();
          ctx.poisoned = true;
          return std::nullopt;
        }
        ctx.P = std::move(*whole);
        return it;
      }
      case TreeNode::Kind::LamApp: {
        std::size_t off = (*offsets_)[cursor_++];
        std::size_t innerOff = (*offsets_)[cursor_++];
        const Effect& latent = atoms_.effects[t->atom];

        // The lambda body is checked against the latent annotation in a
        // fresh context, independent of the surrounding path.
        bool lamPoisoned = false;
        if (early_ && !fits(latent, latent)) {
          fail(innerOff);
          lamPoisoned = true;
        }
        if (!lamPoisoned && !sys_.le(latent, latent)) fail(off);

        if (ctx.poisoned) return std::nullopt;
        std::optional<Effect> s = sys_.seq(ctx.P, latent);
        if (!s) {
          fail(off);
          ctx.poisoned = true;
          return std::nullopt;
        }
        if (early_ && !fits(*s, bound_)) {
          fail(off);
          if (sys_.commutative()) return sys_.unit();
          ctx.poisoned = true;
          return std::nullopt;
        }
        ctx.P = std::move(*s);
        return latent;
      }
    }
    return std::nullopt;
  }

  const EffectSystem& sys_;
  std::vector<Effect> carrier_;
  const AtomTable& atoms_;
  const std::vector<std::size_t>* offsets_ = nullptr;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> failures_;
  Effect bound_;
  bool early_ = true;
};

struct Parsed {
  ast::Module module;
  ResolvedModule resolved;
  bool ok = false;
};

Parsed frontend(const std::string& source,
                std::shared_ptr<const EffectSystem> sys) {
  Parsed p;
  ParseResult pr = parseSource(source, "<verify>", std::string(sys->id()));
  if (!pr.diags.empty()) {
    p.module = std::move(pr.module);
    return p;
  }
  p.module = std::move(pr.module);
  p.resolved = resolveModule(p.module, std::move(sys));
  p.ok = p.resolved.ok();
  return p;
}

void addSample(VerifyReport& rep, const VerifyOptions& opts,
               const std::string& program, std::string detail) {
  if (rep.samples.size() >= opts.maxSamples) return;
  rep.samples.push_back(VerifySample{program, std::move(detail)});
}

}  // namespace

std::size_t enumeratedTreeCount(std::size_t atomCount, std::size_t maxNodes) {
  TreeEnum e(atomCount);
  return e.upTo(maxNodes).size();
}

VerifyReport runVerification(std::shared_ptr<const EffectSystem> system,
                             const VerifyOptions& options) {
  std::optional<std::vector<Effect>> carrier = system->carrier();
  if (!carrier)
    throw std::invalid_argument(
        "verification needs a system with a finite carrier");
  AtomTable atoms;
  for (const std::string& label : system->atomLabels()) {
    std::optional<Effect> e = system->atom(label);
    if (e) {
      atoms.labels.push_back(label);
      atoms.effects.push_back(std::move(*e));
    }
  }
  if (atoms.labels.empty())
    throw std::invalid_argument("verification needs a system with atoms");

  VerifyReport rep;
  rep.system = system->id();
  rep.maxNodes = options.maxNodes;

  TreeEnum treeEnum(atoms.labels.size());
  std::vector<Tree> trees = treeEnum.upTo(options.maxNodes);
  rep.trees = trees.size();

  Oracle oracle(*system, *carrier, atoms);

  for (const Tree& tree : trees) {
    for (const Effect& bound : *carrier) {
      Rendered r = renderProgram(tree, bound, *system, atoms);
      Parsed p = frontend(r.source, system);
      ++rep.programs;
      if (!p.ok) {
        ++rep.divergences;
        addSample(rep, options, r.source, "program failed to parse or resolve");
        continue;
      }

      CheckOptions earlyOpts;
      earlyOpts.early = true;
      earlyOpts.skipResidualChecks = options.skipResidualChecks;
      CheckResult early = checkModule(p.module, p.resolved, system, earlyOpts);
      CheckOptions globalOpts;
      globalOpts.early = false;
      CheckResult global = checkModule(p.module, p.resolved, system, globalOpts);

      Oracle::Outcome oe = oracle.run(tree, r.preorder, bound, true);
      Oracle::Outcome og = oracle.run(tree, r.preorder, bound, false);

      bool accE = early.accepted();
      bool accG = global.accepted();
      if (!(accE == accG && accG == oe.accepted && oe.accepted == og.accepted)) {
        ++rep.divergences;
        std::ostringstream d;
        d << "acceptance disagrees: early=" << accE << " global=" << accG
          << " oracle-early=" << oe.accepted << " oracle-global=" << og.accepted;
        addSample(rep, options, r.source, d.str());
        continue;
      }

      if (accE) {
        ++rep.accepted;
        ControlEffect want{*oe.finalEffect, {}};
        bool effOk = early.fnEffects.size() == 1 && early.fnEffects[0] &&
                     *early.fnEffects[0] == want &&
                     global.fnEffects[0] && *global.fnEffects[0] == want;
        if (!effOk) {
          ++rep.effectMismatches;
          std::string got = "<none>";
          if (!early.fnEffects.empty() && early.fnEffects[0] &&
              early.fnEffects[0]->underlying)
            got = system->show(*early.fnEffects[0]->underlying);
          addSample(rep, options, r.source,
                    "synthesized effect " + got + " but the oracle computed " +
                        system->show(*oe.finalEffect));
        }
        if (!options.skipResidualChecks) {
          std::map<std::size_t, std::size_t> wantCounts;
          for (std::size_t off : r.checkpoints) wantCounts[off] = 1;
          if (early.residualEvals != wantCounts) {
            ++rep.counterViolations;
            addSample(rep, options, r.source,
                      "residual evaluation counts differ from one-per-point");
          }
        }
      } else {
        ++rep.rejected;
        std::optional<std::size_t> pc = earliestEffectFailure(early.diags);
        std::optional<std::size_t> po = oe.firstFailure;
        if (!pc || !po || *pc != *po) {
          ++rep.positionMismatches;
          std::ostringstream d;
          d << "first failure offset: checker=";
          if (pc) d << *pc; else d << "none";
          d << " oracle=";
          if (po) d << *po; else d << "none";
          addSample(rep, options, r.source, d.str());
        }
      }
    }
  }

  // Early-entry sweep: whenever a body's plain synthesis still fits inside
  // the residual of (prefix, bound), the early check from that prefix must
  // accept the body.
  for (const Tree& tree : trees) {
    Rendered r = renderProgram(tree, (*carrier)[0], *system, atoms);
    Parsed p = frontend(r.source, system);
    if (!p.ok) continue;
    BlockJudgment synth = synthesizeBody(p.module, p.resolved, system, 0);
    if (!synth.accepted || !synth.rel || !synth.rel->underlying) continue;
    const Effect& u = *synth.rel->underlying;

    for (const Effect& x0 : *carrier) {
      for (const Effect& xm : *carrier) {
        // Residual of (x0, xm), computed as the join over all effects that
        // may still follow x0 within xm.
        std::optional<Effect> r0;
        bool any = false;
        bool joinable = true;
        for (const Effect& x : *carrier) {
          std::optional<Effect> s = system->seq(x0, x);
          if (!s || !system->le(*s, xm)) continue;
          any = true;
          if (!r0) {
            r0 = x;
          } else {
            std::optional<Effect> j = system->join(*r0, x);
            if (!j) {
              joinable = false;
              break;
            }
            r0 = std::move(*j);
          }
        }
        if (!any || !joinable) continue;

        bool premise = false;
        for (const Effect& x : *carrier) {
          std::optional<Effect> s = system->seq(u, x);
          if (s && system->le(*s, *r0)) {
            premise = true;
            break;
          }
        }
        if (!premise) continue;

        ++rep.lemmaChecked;
        BlockJudgment j = checkBodyEarly(p.module, p.resolved, system, 0,
                                         ControlEffect{x0, {}},
                                         ControlEffect{xm, {}});
        if (!j.accepted) {
          ++rep.lemmaFailures;
          addSample(rep, options, r.source,
                    "early check rejected a body whose synthesis fits: prefix=" +
                        system->show(x0) + " bound=" + system->show(xm));
        }
      }
    }
  }

  return rep;
}

std::string VerifyReport::text() const {
  std::ostringstream o;
  o << "verification of '" << system << "' up to " << maxNodes << " nodes\n";
  o << "  shapes " << trees << ", programs " << programs << " (accepted "
    << accepted << ", rejected " << rejected << ")\n";
  o << "  acceptance divergences   " << divergences << "\n";
  o << "  effect mismatches        " << effectMismatches << "\n";
  o << "  error position mismatches " << positionMismatches << "\n";
  o << "  residual count violations " << counterViolations << "\n";
  o << "  early-entry sweep        " << lemmaChecked << " checked, "
    << lemmaFailures << " failures\n";
  for (const VerifySample& s : samples) {
    o << "  sample: " << s.detail << "\n";
    std::istringstream src(s.program);
    std::string line;
    while (std::getline(src, line)) o << "    | " << line << "\n";
  }
  o << (ok() ? "  ok\n" : "  FAILED\n");
  return o.str();
}

std::string VerifyReport::toJson() const {
  nlohmann::json j;
  j["system"] = system;
  j["maxNodes"] = maxNodes;
  j["trees"] = trees;
  j["programs"] = programs;
  j["accepted"] = accepted;
  j["rejected"] = rejected;
  j["divergences"] = divergences;
  j["effectMismatches"] = effectMismatches;
  j["positionMismatches"] = positionMismatches;
  j["counterViolations"] = counterViolations;
  j["lemmaChecked"] = lemmaChecked;
  j["lemmaFailures"] = lemmaFailures;
  j["ok"] = ok();
  nlohmann::json samplesJson = nlohmann::json::array();
  for (const VerifySample& s : samples)
    samplesJson.push_back({{"detail", s.detail}, {"program", s.program}});
  j["samples"] = samplesJson;
  return j.dump(2) + "\n";
}

}  // namespace residuum
