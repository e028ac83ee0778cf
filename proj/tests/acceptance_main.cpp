// Acceptance gate for the checker: one pass/fail line per shipped guarantee.
// Each section enforces both the behavior and its runtime budget; the binary
// exits nonzero when any line fails.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "residuum/checker.hpp"
#include "residuum/control.hpp"
#include "residuum/dfa.hpp"
#include "residuum/diagnostics.hpp"
#include "residuum/enumerate.hpp"
#include "residuum/finite_quantale.hpp"
#include "residuum/laws.hpp"
#include "residuum/registry.hpp"
#include "residuum/trace.hpp"

#include "test_util.hpp"

using namespace residuum;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failedCriteria = 0;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) problems_.push_back(detail);
  }

  // Marks the end of a timed phase and enforces its budget.
  void phaseBudget(Clock::time_point t0, double capSeconds,
                   const std::string& phase) {
    double s = secondsSince(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s took %.2fs (budget %.0fs)",
                  phase.c_str(), s, capSeconds);
    expect(s < capSeconds, buf);
  }

  void finish() {
    double s = secondsSince(start_);
    std::printf("%s  %s (%.2fs)\n", problems_.empty() ? "PASS" : "FAIL",
                name_.c_str(), s);
    for (const std::string& p : problems_)
      std::printf("      - %s\n", p.c_str());
    if (!problems_.empty()) ++g_failedCriteria;
  }

 private:
  std::string name_;
  std::vector<std::string> problems_;
  Clock::time_point start_ = Clock::now();
};

Effect lit(const EffectSystem& sys, const std::string& text) {
  if (std::optional<Effect> e = sys.parseLiteral(text)) return *e;
  if (std::optional<Effect> e = sys.atom(text)) return *e;
  throw std::runtime_error("'" + text + "' is not an effect of " +
                           std::string(sys.id()));
}

std::string showOpt(const EffectSystem& sys, const std::optional<Effect>& e) {
  return e ? sys.show(*e) : "<undefined>";
}

// The diamond join-semilattice used as the commutative system under test.
std::shared_ptr<const EffectSystem> diamondLift() {
  FiniteQuantale::Def d;
  d.id = "diamond-lift";
  d.elements = {"bot", "a", "b", "top"};
  d.unit = 0;
  d.joinTable = {
      0, 1, 2, 3,
      1, 1, 3, 3,
      2, 3, 2, 3,
      3, 3, 3, 3,
  };
  d.atoms = {{"left", "a"}, {"right", "b"}, {"full", "top"}};
  return std::make_shared<FiniteQuantale>(
      FiniteQuantale::commutativeLift(std::move(d)));
}

std::set<std::string> wordSet(const Dfa& d, std::size_t maxLen) {
  std::vector<std::string> v = dfa::acceptedWords(d, maxLen, 200000);
  return std::set<std::string>(v.begin(), v.end());
}

std::vector<std::uint32_t> toSyms(const std::string& w) {
  std::vector<std::uint32_t> out;
  for (char c : w) out.push_back(c == 'a' ? 0u : 1u);
  return out;
}

// ---------------------------------------------------------------------------

void criterionLaws() {
  Criterion c("algebra-laws");

  Clock::time_point t0 = Clock::now();
  std::vector<std::shared_ptr<const EffectSystem>> finiteSystems = {
      makeSystem("atomicity"), makeSystem("reentrancy"),
      makeSystem("must:a,b,c"), makeSystem("pmonad:s1,s2,s3"), diamondLift()};
  for (const auto& sys : finiteSystems) {
    LawReport rep = checkLaws(*sys);
    c.expect(rep.exhaustive,
             std::string(sys->id()) + ": expected an exhaustive law run");
    for (const LawResult& l : rep.laws) {
      if (l.failures == 0) continue;
      std::string ce = l.firstCounterexample ? *l.firstCounterexample : "";
      c.expect(false, std::string(sys->id()) + ": law " + l.name + " failed (" +
                          ce + ")");
    }
  }
  c.phaseBudget(t0, 5.0, "exhaustive law runs");

  Clock::time_point t1 = Clock::now();
  TraceSystem ts({"a", "b"}, "trace:a,b");
  LawReport rep = checkLaws(ts, 1000);
  c.expect(!rep.exhaustive, "trace law run should be sampled, not exhaustive");
  bool sawTriples = false;
  for (const LawResult& l : rep.laws) {
    if (l.name == "seq-associative") {
      sawTriples = l.casesChecked >= 1000;
      if (!sawTriples)
        c.expect(false, "trace seq-associative checked fewer than 1000 triples");
    }
    if (l.failures > 0) {
      std::string ce = l.firstCounterexample ? *l.firstCounterexample : "";
      c.expect(false, std::string("trace: law ") + l.name + " failed (" + ce +
                          ")");
    }
  }
  c.expect(sawTriples, "trace law report lacks the seq-associative law");

  // Cross-check every trace operation against word sets of length <= 4.
  std::mt19937_64 rng(0x5eedu);
  std::size_t residWordChecks = 0;
  for (int i = 0; i < 250; ++i) {
    Dfa da = dfa::fromRegex({"a", "b"},
                            TraceSystem::randomRegex(rng, {"a", "b"}, 6));
    Dfa db = dfa::fromRegex({"a", "b"},
                            TraceSystem::randomRegex(rng, {"a", "b"}, 6));
    Effect ea = ts.fromDfa(da);
    Effect eb = ts.fromDfa(db);
    std::set<std::string> wa = wordSet(da, 4);
    std::set<std::string> wb = wordSet(db, 4);

    std::optional<Effect> s = ts.seq(ea, eb);
    if (!s) {
      c.expect(false, "trace seq unexpectedly undefined");
      continue;
    }
    std::set<std::string> wantSeq;
    for (const std::string& x : wa)
      for (const std::string& y : wb)
        if (x.size() + y.size() <= 4) wantSeq.insert(x + y);
    c.expect(wordSet(s->dfa(), 4) == wantSeq,
             "trace seq disagrees with the word oracle");

    std::optional<Effect> j = ts.join(ea, eb);
    if (!j) {
      c.expect(false, "trace join unexpectedly undefined");
      continue;
    }
    std::set<std::string> wantJoin = wa;
    wantJoin.insert(wb.begin(), wb.end());
    c.expect(wordSet(j->dfa(), 4) == wantJoin,
             "trace join disagrees with the word oracle");

    std::optional<Effect> st = ts.iter(ea);
    if (!st) {
      c.expect(false, "trace iter unexpectedly undefined");
      continue;
    }
    std::set<std::string> wantStar{""};
    for (bool changed = true; changed;) {
      changed = false;
      std::set<std::string> next = wantStar;
      for (const std::string& w : wantStar)
        for (const std::string& x : wa)
          if (w.size() + x.size() <= 4 && next.insert(w + x).second)
            changed = true;
      wantStar.swap(next);
    }
    c.expect(wordSet(st->dfa(), 4) == wantStar,
             "trace iter disagrees with the word oracle");

    bool leWord = true;
    for (const std::string& x : wa)
      if (!wb.count(x)) leWord = false;
    bool le = ts.le(ea, eb);
    c.expect(le == dfa::subsetOf(da, db),
             "trace le disagrees with language inclusion");
    c.expect(!le || leWord, "trace le contradicts the word oracle");

    // Residual, against the quotient-complement identity and, for finite
    // prefixes, against direct per-word quantification.
    std::optional<Effect> r = ts.residual(ea, eb);
    Dfa dual = dfa::complementOf(dfa::leftQuotient(da, dfa::complementOf(db)));
    c.expect(r.has_value() == !dual.isEmpty(),
             "trace residual definedness disagrees with the quotient route");
    if (r)
      c.expect(r->dfa() == dual,
               "trace residual disagrees with the quotient route");

    if (dfa::isFiniteLanguage(da) && da.stateCount <= 8) {
      ++residWordChecks;
      std::set<std::string> allA = wordSet(da, da.stateCount);
      std::vector<std::string> candidates =
          dfa::acceptedWords(dfa::sigmaStar({"a", "b"}), 4, 200000);
      for (const std::string& w : candidates) {
        bool works = true;
        for (const std::string& x : allA)
          if (!db.accepts(toSyms(x + w))) {
            works = false;
            break;
          }
        bool inResid = r && r->dfa().accepts(toSyms(w));
        if (works != inResid) {
          c.expect(false, "trace residual word '" + w +
                              "' disagrees with quantification");
          break;
        }
      }
    }
  }
  c.expect(residWordChecks > 0, "no finite prefix sampled for the word check");
  c.phaseBudget(t1, 60.0, "trace law and word-oracle runs");
  c.finish();
}

void criterionOracle() {
  Criterion c("checker-vs-oracle");
  for (const char* key : {"atomicity", "reentrancy"}) {
    Clock::time_point t0 = Clock::now();
    VerifyOptions opts;
    opts.maxNodes = 5;
    VerifyReport rep = runVerification(makeSystem(key), opts);
    c.expect(rep.trees == 390,
             std::string(key) + ": expected 390 statement shapes, got " +
                 std::to_string(rep.trees));
    c.expect(rep.programs == 1950,
             std::string(key) + ": expected 1950 programs, got " +
                 std::to_string(rep.programs));
    c.expect(rep.divergences == 0, std::string(key) + ": acceptance diverged");
    c.expect(rep.effectMismatches == 0,
             std::string(key) + ": synthesized effects mismatched");
    c.expect(rep.positionMismatches == 0,
             std::string(key) + ": first-error positions mismatched");
    c.expect(rep.counterViolations == 0,
             std::string(key) + ": residual evaluation counts violated");
    c.expect(rep.lemmaFailures == 0,
             std::string(key) + ": early-entry sweep failed");
    c.phaseBudget(t0, 120.0, std::string(key) + " verification");
  }
  c.finish();
}

struct LocalizationCase {
  std::string file;
  std::string systemKey;
  std::string token;
  DiagKind kind;
};

void runLocalization(Criterion& c, const LocalizationCase& lc) {
  std::string path = testutil::corpusDir() + "/" + lc.file;
  std::string text = testutil::slurp(path);
  std::size_t line = testutil::markerLine(text, "<-- Error reported here");
  c.expect(line > 0, lc.file + ": marker comment missing");
  std::size_t col = testutil::columnOf(text, line, lc.token);
  c.expect(col > 0, lc.file + ": marked token missing");

  testutil::Pipeline p = testutil::checkFile(lc.systemKey, path);
  c.expect(p.result.diags.size() == 1,
           lc.file + ": expected exactly one diagnostic, got " +
               std::to_string(p.result.diags.size()));
  if (p.result.diags.size() != 1) return;
  const Diagnostic& d = p.result.diags[0];
  c.expect(d.kind == lc.kind,
           lc.file + ": unexpected kind " + diagKindName(d.kind));
  auto [gotLine, gotCol] = LineMap(text).lineCol(d.span.begin);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: reported at %zu:%zu, marker is %zu:%zu",
                lc.file.c_str(), gotLine, gotCol, line, col);
  c.expect(gotLine == line && gotCol == col, buf);
}

void criterionAtomicityLocalization() {
  Criterion c("atomicity-localization");
  Clock::time_point t0 = Clock::now();
  runLocalization(c, {"atomicity_append.eff", "atomicity", "sb_get_chars",
                      DiagKind::ResidualUndefined});
  runLocalization(c, {"atomicity_content_equals.eff", "atomicity",
                      "sb_get_value", DiagKind::ResidualUndefined});
  c.phaseBudget(t0, 1.0, "atomicity case studies");
  c.finish();
}

void criterionReentrancyLocalization() {
  Criterion c("reentrancy-localization");
  Clock::time_point t0 = Clock::now();

  std::string clean = testutil::corpusDir() + "/reentrancy_doc_example.eff";
  testutil::CmdResult cleanRun = testutil::runCommand(
      "\"" + testutil::cliPath() + "\" check --system reentrancy \"" + clean +
      "\"");
  c.expect(cleanRun.exitCode == 0,
           "transaction walkthrough should exit 0, got " +
               std::to_string(cleanRun.exitCode) + ": " + cleanRun.output);

  runLocalization(c, {"reentrancy_do_work.eff", "reentrancy",
                      "begin_transaction", DiagKind::ResidualUndefined});
  runLocalization(c, {"reentrancy_begin_begin.eff", "reentrancy", "perform",
                      DiagKind::UndefinedSeq});
  c.phaseBudget(t0, 1.0, "reentrancy case studies");
  c.finish();
}

void criterionResidualValues() {
  Criterion c("residual-values");

  auto spot = [&](const EffectSystem& sys, const std::string& a,
                  const std::string& b, const std::optional<std::string>& want) {
    std::optional<Effect> r = sys.residual(lit(sys, a), lit(sys, b));
    std::string got = showOpt(sys, r);
    std::string expect = want ? *want : "<undefined>";
    c.expect(got == expect, std::string(sys.id()) + ": " + a + " \\ " + b +
                                " = " + got + ", expected " + expect);
  };

  auto atomicity = makeSystem("atomicity");
  auto reentrancy = makeSystem("reentrancy");
  auto must = makeSystem("must:a,b,c");
  auto pmonad = makeSystem("pmonad:s1,s2,s3");
  TraceSystem trace({"a", "b", "c"}, "trace:a,b,c");

  spot(*atomicity, "L", "A", "L");
  spot(*atomicity, "A", "A", "L");
  spot(*reentrancy, "locking", "critical", std::nullopt);
  spot(*reentrancy, "locking", "entrant", "unlocking");
  spot(*must, "{a}", "{a,b}", "{b}");
  spot(*pmonad, "(s1,s2)", "(s1,s3)", "(s2,s3)");

  // unit \ z = z across every finite carrier.
  for (const auto& sys :
       {atomicity, reentrancy, must, pmonad, diamondLift()}) {
    std::optional<std::vector<Effect>> carrier = sys->carrier();
    c.expect(carrier.has_value(),
             std::string(sys->id()) + ": expected a finite carrier");
    if (!carrier) continue;
    for (const Effect& z : *carrier) {
      std::optional<Effect> r = sys->residual(sys->unit(), z);
      c.expect(r && *r == z, std::string(sys->id()) + ": unit \\ " +
                                 sys->show(z) + " = " + showOpt(*sys, r));
    }
  }

  // The explicit tables must agree with the join-of-witnesses derivation.
  for (const auto& sys : {atomicity, reentrancy, pmonad}) {
    const auto* fq = dynamic_cast<const FiniteQuantale*>(sys.get());
    c.expect(fq != nullptr, std::string(sys->id()) + ": not table-backed");
    if (!fq) continue;
    for (std::uint32_t a = 0; a < fq->size(); ++a)
      for (std::uint32_t b = 0; b < fq->size(); ++b)
        c.expect(fq->residIdx(a, b) == fq->deriveResidual(a, b),
                 std::string(sys->id()) + ": residual table diverges from the "
                                          "derivation at (" +
                     std::to_string(a) + "," + std::to_string(b) + ")");
  }

  // Must residual against brute force over the subset lattice: the result is
  // the meet of every completion that reaches the target.
  {
    EventSet universe{"a", "b", "c"};
    std::vector<EventSet> subsets;
    std::vector<std::string> names{"a", "b", "c"};
    for (int mask = 0; mask < 8; ++mask) {
      EventSet s;
      for (int i = 0; i < 3; ++i)
        if (mask & (1 << i)) s.insert(names[static_cast<std::size_t>(i)]);
      subsets.push_back(std::move(s));
    }
    EventSet sofar{"a"};
    EventSet target{"a", "b"};
    std::optional<EventSet> brute;
    for (const EventSet& z : subsets) {
      EventSet u = sofar;
      u.insert(z.begin(), z.end());
      bool reaches = true;
      for (const std::string& e : target) reaches = reaches && u.count(e);
      if (!reaches) continue;
      if (!brute) {
        brute = z;
      } else {
        EventSet meet;
        for (const std::string& e : *brute)
          if (z.count(e)) meet.insert(e);
        brute = std::move(meet);
      }
    }
    std::optional<Effect> r = must->residual(lit(*must, "{a}"),
                                             lit(*must, "{a,b}"));
    c.expect(brute.has_value() && r.has_value() && r->events() == *brute,
             "must residual disagrees with the subset brute force");
  }

  // Trace spot value with both the library result and the word route.
  {
    Effect a = lit(trace, "re\"a\"");
    Effect b = lit(trace, "re\"ab|ac\"");
    std::optional<Effect> r = trace.residual(a, b);
    c.expect(r.has_value() && *r == lit(trace, "re\"b|c\""),
             "trace {a} \\ {ab,ac} is not {b,c}");
    Dfa dual = dfa::complementOf(
        dfa::leftQuotient(a.dfa(), dfa::complementOf(b.dfa())));
    c.expect(r.has_value() && r->dfa() == dual,
             "trace residual disagrees with the quotient route");
    std::optional<Effect> ru = trace.residual(trace.unit(), b);
    c.expect(ru.has_value() && *ru == b, "trace unit residuation failed");
  }

  c.finish();
}

void criterionExceptionConstruction() {
  Criterion c("exception-construction");
  Clock::time_point t0 = Clock::now();

  auto base = makeSystem("atomicity");
  std::vector<Effect> carrier = *base->carrier();
  TagPoset flat;
  flat.declare("E1", std::nullopt);
  flat.declare("E2", std::nullopt);
  ControlAlgebra alg(base, flat);
  ControlTag t1 = ControlTag::exception("E1");
  ControlTag t2 = ControlTag::exception("E2");

  // Every pair of an optional normal effect and optional per-tag budgets,
  // minus the degenerate fully-absent pair.
  std::vector<ControlEffect> elems;
  for (int u = 0; u <= 5; ++u)
    for (int e1 = 0; e1 <= 5; ++e1)
      for (int e2 = 0; e2 <= 5; ++e2) {
        if (u == 0 && e1 == 0 && e2 == 0) continue;
        ControlEffect ce;
        if (u > 0) ce.underlying = carrier[static_cast<std::size_t>(u - 1)];
        if (e1 > 0)
          ce.entries.push_back({t1, carrier[static_cast<std::size_t>(e1 - 1)]});
        if (e2 > 0)
          ce.entries.push_back({t2, carrier[static_cast<std::size_t>(e2 - 1)]});
        elems.push_back(std::move(ce));
      }
  const std::size_t n = elems.size();
  c.expect(n == 215, "expected 215 control effects, got " + std::to_string(n));

  auto code = [&](const ControlEffect& ce) -> int {
    int u = ce.underlying ? static_cast<int>(ce.underlying->index()) + 1 : 0;
    int e1 = 0;
    int e2 = 0;
    for (const auto& [tag, p] : ce.entries) {
      if (tag == t1) e1 = static_cast<int>(p.index()) + 1;
      if (tag == t2) e2 = static_cast<int>(p.index()) + 1;
    }
    return u * 36 + e1 * 6 + e2 - 1;  // -1: the degenerate pair is skipped
  };

  constexpr int kUndef = -1;
  std::vector<int> seqT(n * n, kUndef), joinT(n * n, kUndef),
      residT(n * n, kUndef);
  bool escaped = false;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (auto r = alg.seq(elems[a], elems[b])) {
        int idx = code(*r);
        if (idx < 0 || static_cast<std::size_t>(idx) >= n) escaped = true;
        seqT[a * n + b] = idx;
      }
      if (auto r = alg.join(elems[a], elems[b])) {
        int idx = code(*r);
        if (idx < 0 || static_cast<std::size_t>(idx) >= n) escaped = true;
        joinT[a * n + b] = idx;
      }
      if (auto r = alg.residual(elems[a], elems[b])) {
        int idx = code(*r);
        if (idx < 0 || static_cast<std::size_t>(idx) >= n) escaped = true;
        residT[a * n + b] = idx;
      }
    }
  }
  c.expect(!escaped, "an operation left the enumerated space");
  const int unit = code(alg.unit());
  c.expect(unit >= 0, "the unit is outside the enumerated space");

  auto le = [&](int a, int b) {
    return joinT[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] ==
           b;
  };

  // Monoid and semilattice laws plus two-sided distributivity; iteration is
  // deliberately out of scope for this construction.
  std::size_t unitBad = 0, commBad = 0, idemBad = 0;
  for (std::size_t a = 0; a < n; ++a) {
    int ia = static_cast<int>(a);
    if (seqT[static_cast<std::size_t>(unit) * n + a] != ia) ++unitBad;
    if (seqT[a * n + static_cast<std::size_t>(unit)] != ia) ++unitBad;
    if (joinT[a * n + a] != ia) ++idemBad;
    for (std::size_t b = 0; b < n; ++b)
      if (joinT[a * n + b] != joinT[b * n + a]) ++commBad;
  }
  c.expect(unitBad == 0, "unit laws failed " + std::to_string(unitBad) +
                             " times");
  c.expect(idemBad == 0, "join idempotence failed");
  c.expect(commBad == 0, "join commutativity failed");

  auto at = [&](const std::vector<int>& t, int a, int b) -> int {
    if (a < 0 || b < 0) return kUndef;
    return t[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)];
  };
  std::size_t seqAssocBad = 0, joinAssocBad = 0, distLBad = 0, distRBad = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      int ab = seqT[a * n + b];
      int jab = joinT[a * n + b];
      for (std::size_t x = 0; x < n; ++x) {
        int ix = static_cast<int>(x);
        int bx = seqT[b * n + x];
        int jbx = joinT[b * n + x];
        if (at(seqT, ab, ix) != at(seqT, static_cast<int>(a), bx))
          ++seqAssocBad;
        if (at(joinT, jab, ix) != at(joinT, static_cast<int>(a), jbx))
          ++joinAssocBad;
        // a ; (b |_| x) = (a ; b) |_| (a ; x)
        int l1 = at(seqT, static_cast<int>(a), jbx);
        int ax = seqT[a * n + x];
        int r1 = (ab >= 0 && ax >= 0) ? at(joinT, ab, ax) : kUndef;
        if (l1 != r1) ++distLBad;
        // (a |_| b) ; x = (a ; x) |_| (b ; x)
        int l2 = at(seqT, jab, ix);
        int r2 = (ax >= 0 && bx >= 0) ? at(joinT, ax, bx) : kUndef;
        if (l2 != r2) ++distRBad;
      }
    }
  }
  c.expect(seqAssocBad == 0,
           "seq associativity failed " + std::to_string(seqAssocBad) + " times");
  c.expect(joinAssocBad == 0,
           "join associativity failed " + std::to_string(joinAssocBad) +
               " times");
  c.expect(distLBad == 0,
           "left distributivity failed " + std::to_string(distLBad) + " times");
  c.expect(distRBad == 0,
           "right distributivity failed " + std::to_string(distRBad) +
               " times");

  // The weak-residual contract: bounding, existence, self, unit.
  std::size_t selfBad = 0, unitResidBad = 0, boundingBad = 0, existenceBad = 0;
  for (std::size_t z = 0; z < n; ++z) {
    if (residT[z * n + z] == kUndef) ++selfBad;
    if (residT[static_cast<std::size_t>(unit) * n + z] != static_cast<int>(z))
      ++unitResidBad;
  }
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t z = 0; z < n; ++z) {
      int r = residT[y * n + z];
      if (r == kUndef) continue;
      for (std::size_t x = 0; x < n; ++x) {
        if (!le(static_cast<int>(x), r)) continue;
        int s = seqT[y * n + x];
        if (s == kUndef || !le(s, static_cast<int>(z))) ++boundingBad;
      }
    }
  }
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      int s = seqT[y * n + x];
      if (s == kUndef) continue;
      for (std::size_t z = 0; z < n; ++z)
        if (le(s, static_cast<int>(z)) && residT[y * n + z] == kUndef)
          ++existenceBad;
    }
  }
  c.expect(selfBad == 0, "self-residuation failed " + std::to_string(selfBad) +
                             " times");
  c.expect(unitResidBad == 0,
           "unit residuation failed " + std::to_string(unitResidBad) +
               " times");
  c.expect(boundingBad == 0,
           "residual bounding failed " + std::to_string(boundingBad) +
               " times");
  c.expect(existenceBad == 0,
           "residual existence failed " + std::to_string(existenceBad) +
               " times");

  // Exception-free effects embed homomorphically.
  for (const Effect& a : carrier) {
    for (const Effect& b : carrier) {
      std::optional<Effect> s = base->seq(a, b);
      std::optional<ControlEffect> sc = alg.seq(alg.lift(a), alg.lift(b));
      bool seqOk = s.has_value() == sc.has_value() &&
                   (!s || (sc->underlying && *sc->underlying == *s &&
                           sc->entries.empty()));
      c.expect(seqOk, "embedding does not preserve seq at (" + base->show(a) +
                          "," + base->show(b) + ")");
      std::optional<Effect> j = base->join(a, b);
      std::optional<ControlEffect> jc = alg.join(alg.lift(a), alg.lift(b));
      bool joinOk = j.has_value() == jc.has_value() &&
                    (!j || (jc->underlying && *jc->underlying == *j &&
                            jc->entries.empty()));
      c.expect(joinOk, "embedding does not preserve join at (" + base->show(a) +
                           "," + base->show(b) + ")");
      c.expect(base->le(a, b) == alg.le(alg.lift(a), alg.lift(b)),
               "embedding does not preserve order at (" + base->show(a) + "," +
                   base->show(b) + ")");
    }
  }
  c.expect(alg.unit().underlying && *alg.unit().underlying == base->unit(),
           "embedding does not preserve the unit");

  // Budget coherence across a three-tag hierarchy: after normalization each
  // tag's budget dominates the budgets of its declared subtags.
  TagPoset tree;
  tree.declare("Err", std::nullopt);
  tree.declare("Tx", std::string("Err"));
  tree.declare("Io", std::string("Err"));
  ControlAlgebra halg(base, tree);
  std::vector<ControlTag> tags{ControlTag::exception("Err"),
                               ControlTag::exception("Io"),
                               ControlTag::exception("Tx")};
  std::mt19937_64 rng(99u);
  for (int i = 0; i < 200; ++i) {
    ControlEffect ce;
    if (rng() % 4 != 0)
      ce.underlying = carrier[rng() % carrier.size()];
    for (const ControlTag& tag : tags)
      if (rng() % 3 != 0) ce.entries.push_back({tag, carrier[rng() % 5]});
    if (!ce.underlying && ce.entries.empty())
      ce.underlying = carrier[rng() % carrier.size()];

    std::optional<ControlEffect> norm = halg.normalize(ce);
    c.expect(norm.has_value(), "normalize undefined on a total-join base");
    if (!norm) continue;
    c.expect(norm->entries.size() == ce.entries.size(),
             "normalize changed the set of tags");
    for (const auto& [ta, pa] : norm->entries)
      for (const auto& [tb, pb] : norm->entries)
        if (!(ta == tb) && tree.leq(ta, tb))
          c.expect(base->le(pa, pb),
                   "subtag budget " + base->show(pa) +
                       " not dominated by supertag budget " + base->show(pb));
    std::optional<ControlEffect> again = halg.normalize(*norm);
    c.expect(again.has_value() && *again == *norm,
             "normalize is not idempotent");
  }

  c.phaseBudget(t0, 30.0, "exception construction checks");
  c.finish();
}

void criterionCommutativeReporting() {
  Criterion c("commutative-rereporting");

  std::string liftKey =
      "custom:" + testutil::corpusDir() + "/systems/lift2.json";
  std::string cpath =
      testutil::corpusDir() + "/commutative_two_violations.eff";
  std::string ctext = testutil::slurp(cpath);
  testutil::Pipeline cp = testutil::checkFile(liftKey, cpath);
  c.expect(cp.result.diags.size() == 2,
           "commutative program: expected two diagnostics, got " +
               std::to_string(cp.result.diags.size()));
  std::size_t first = testutil::markerLine(ctext, "<-- First violation");
  std::size_t second = testutil::markerLine(ctext, "<-- Second violation");
  LineMap clines(ctext);
  if (cp.result.diags.size() == 2) {
    for (std::size_t i = 0; i < 2; ++i) {
      const Diagnostic& d = cp.result.diags[i];
      c.expect(d.kind == DiagKind::ResidualUndefined,
               std::string("commutative diagnostic is ") + diagKindName(d.kind));
      std::size_t want = i == 0 ? first : second;
      auto [line, col] = clines.lineCol(d.span.begin);
      c.expect(line == want && col == testutil::columnOf(ctext, want, "perform"),
               "commutative diagnostic " + std::to_string(i + 1) +
                   " is on line " + std::to_string(line) + ", marker is " +
                   std::to_string(want));
    }
  }

  std::string apath = testutil::corpusDir() + "/atomicity_two_violations.eff";
  std::string atext = testutil::slurp(apath);
  testutil::Pipeline ap = testutil::checkFile("atomicity", apath);
  c.expect(ap.result.diags.size() == 1,
           "non-commutative program: expected one diagnostic, got " +
               std::to_string(ap.result.diags.size()));
  if (ap.result.diags.size() == 1) {
    std::size_t only = testutil::markerLine(atext, "<-- Only violation");
    auto [line, col] = LineMap(atext).lineCol(ap.result.diags[0].span.begin);
    c.expect(ap.result.diags[0].kind == DiagKind::ResidualUndefined,
             "non-commutative diagnostic has the wrong kind");
    c.expect(line == only && col == testutil::columnOf(atext, only, "perform"),
             "non-commutative diagnostic is on line " + std::to_string(line) +
                 ", marker is " + std::to_string(only));
  }

  c.finish();
}

}  // namespace

int main() {
  criterionLaws();
  criterionOracle();
  criterionAtomicityLocalization();
  criterionReentrancyLocalization();
  criterionResidualValues();
  criterionExceptionConstruction();
  criterionCommutativeReporting();
  if (g_failedCriteria == 0) {
    std::printf("all acceptance criteria hold\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failedCriteria);
  return 1;
}
