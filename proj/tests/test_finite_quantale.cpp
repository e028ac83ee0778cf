#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "residuum/finite_quantale.hpp"
#include "residuum/instances.hpp"

#include "test_util.hpp"

using namespace residuum;

namespace {

constexpr std::uint32_t U = FiniteQuantale::kUndef;

std::uint32_t indexOf(const FiniteQuantale& q, const std::string& name) {
  for (std::uint32_t i = 0; i < q.size(); ++i)
    if (q.def().elements[i] == name) return i;
  FAIL("no element ", name);
  return U;
}

std::string writeTemp(const std::string& name, const std::string& body) {
  std::string path = std::string("/tmp/") + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("constructor validates table shapes") {
  FiniteQuantale::Def d;
  d.id = "bad";
  CHECK_THROWS_AS(FiniteQuantale{d}, std::invalid_argument);  // empty carrier

  d.elements = {"u", "x"};
  d.unit = 5;
  d.seqTable.assign(4, 0);
  d.joinTable.assign(4, 0);
  CHECK_THROWS_AS(FiniteQuantale{d}, std::invalid_argument);  // unit index

  d.unit = 0;
  d.seqTable.assign(3, 0);
  CHECK_THROWS_AS(FiniteQuantale{d}, std::invalid_argument);  // seq size

  d.seqTable.assign(4, 7);
  CHECK_THROWS_AS(FiniteQuantale{d}, std::invalid_argument);  // cell range
}

TEST_CASE("derived iteration picks the least reflexive transitive bound") {
  FiniteQuantale at = atomicityQuantale();
  auto idx = [&](const char* n) { return indexOf(at, n); };
  CHECK(at.iterIdx(idx("B")) == idx("B"));
  CHECK(at.iterIdx(idx("L")) == idx("L"));
  CHECK(at.iterIdx(idx("R")) == idx("R"));
  // A is not closed under sequencing with itself, so iteration escalates.
  CHECK(at.iterIdx(idx("A")) == idx("Top"));
  CHECK(at.iterIdx(idx("Top")) == idx("Top"));

  FiniteQuantale re = reentrancyQuantale();
  auto ri = [&](const char* n) { return indexOf(re, n); };
  CHECK(re.iterIdx(ri("eps")) == ri("eps"));
  CHECK(re.iterIdx(ri("critical")) == ri("critical"));
  CHECK(re.iterIdx(ri("entrant")) == ri("entrant"));
  // Half-section shapes have no idempotent upper bound at all.
  CHECK(re.iterIdx(ri("locking")) == U);
  CHECK(re.iterIdx(ri("unlocking")) == U);
}

TEST_CASE("explicit state-pair residual table equals the derived one") {
  FiniteQuantale pm = pmonadQuantale({"s1", "s2", "s3"}, "pmonad:s1,s2,s3");
  const std::uint32_t n = static_cast<std::uint32_t>(pm.size());
  REQUIRE(n == 10);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      CAPTURE(pm.def().elements[a]);
      CAPTURE(pm.def().elements[b]);
      CHECK(pm.residIdx(a, b) == pm.deriveResidual(a, b));
    }
}

TEST_CASE("state-pair iteration stays deliberately minimal") {
  // The explicit table defines iteration only on the polymorphic identity,
  // although the derivation could also close the per-state identities.
  FiniteQuantale pm = pmonadQuantale({"s1", "s2"}, "pmonad:s1,s2");
  std::uint32_t i = indexOf(pm, "I");
  std::uint32_t d = indexOf(pm, "(s1,s1)");
  std::uint32_t od = indexOf(pm, "(s1,s2)");
  CHECK(pm.iterIdx(i) == i);
  CHECK(pm.iterIdx(d) == U);
  CHECK(pm.deriveIter(d) == d);
  CHECK(pm.iterIdx(od) == U);
  CHECK(pm.deriveIter(od) == U);
}

TEST_CASE("sequencing is monotone wherever defined") {
  for (const FiniteQuantale& q : {atomicityQuantale(), reentrancyQuantale(),
                                  pmonadQuantale({"s1", "s2"}, "pm"),
                                  FiniteQuantale::fromJsonFile(
                                      testutil::corpusDir() + "/systems/lift2.json",
                                      "lift2")}) {
    const std::uint32_t n = static_cast<std::uint32_t>(q.size());
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b) {
        if (!q.leIdx(a, b)) continue;
        for (std::uint32_t c = 0; c < n; ++c) {
          std::uint32_t ca = q.seqIdx(c, a), cb = q.seqIdx(c, b);
          if (ca != U && cb != U) CHECK(q.leIdx(ca, cb));
          std::uint32_t ac = q.seqIdx(a, c), bc = q.seqIdx(b, c);
          if (ac != U && bc != U) CHECK(q.leIdx(ac, bc));
        }
      }
  }
}

TEST_CASE("derived residual falls back to a maximal candidate") {
  // Deliberately lawless join (p and q have no join) to reach the fallback:
  // S = {u, p, q} for residual(p, p), whose join-fold fails.
  FiniteQuantale::Def d;
  d.id = "fallback";
  d.elements = {"u", "p", "q"};
  d.unit = 0;
  d.joinTable = {0, 1, 2,
                 1, 1, U,
                 2, U, 2};
  d.seqTable = {0, 1, 2,
                1, 1, 1,
                2, 2, 2};
  FiniteQuantale q(d);
  // seq(p, x) = p for every x, and p <= p, so S is the whole carrier; the
  // fold dies at join(p, q) and the maximal elements are p and q; lowest
  // index wins.
  CHECK(q.residIdx(1, 1) == 1);
}

TEST_CASE("partial order helpers match the join table") {
  FiniteQuantale re = reentrancyQuantale();
  auto ri = [&](const char* n) { return indexOf(re, n); };
  CHECK(re.leIdx(ri("eps"), ri("critical")));
  CHECK(re.leIdx(ri("eps"), ri("entrant")));
  CHECK_FALSE(re.leIdx(ri("critical"), ri("eps")));
  CHECK_FALSE(re.leIdx(ri("locking"), ri("entrant")));
  CHECK_FALSE(re.leIdx(ri("locking"), ri("critical")));

  auto eff = [&](const char* n) { return *re.parseLiteral(n); };
  CHECK(re.le(eff("eps"), eff("critical")));
  CHECK_FALSE(re.le(eff("critical"), eff("entrant")));
}

TEST_CASE("literals, atoms, and show round-trip") {
  FiniteQuantale at = atomicityQuantale();
  auto acq = at.atom("acquire");
  REQUIRE(acq.has_value());
  CHECK(at.show(*acq) == "R");
  auto lit = at.parseLiteral("R");
  REQUIRE(lit.has_value());
  CHECK(*lit == *acq);
  CHECK_FALSE(at.parseLiteral("nonsense").has_value());
  CHECK_FALSE(at.atom("nonsense").has_value());
  auto labels = at.atomLabels();
  CHECK(labels == std::vector<std::string>{"local", "acquire", "release",
                                           "atomic", "compound"});
  auto carrier = at.carrier();
  REQUIRE(carrier.has_value());
  CHECK(carrier->size() == 5);
}

TEST_CASE("commutative lift rejects non-bottom units") {
  FiniteQuantale::Def d;
  d.id = "lift";
  d.elements = {"x", "y"};
  d.unit = 0;
  d.joinTable = {0, U,
                 U, 1};
  CHECK_THROWS_AS(FiniteQuantale::commutativeLift(d), std::invalid_argument);
}

TEST_CASE("commutative lift equates sequencing with join") {
  FiniteQuantale::Def d;
  d.id = "lift";
  d.elements = {"bot", "a", "b", "top"};
  d.unit = 0;
  d.joinTable = {0, 1, 2, 3,
                 1, 1, 3, 3,
                 2, 3, 2, 3,
                 3, 3, 3, 3};
  FiniteQuantale q = FiniteQuantale::commutativeLift(d);
  CHECK(q.commutative());
  for (std::uint32_t a = 0; a < 4; ++a) {
    CHECK(q.iterIdx(a) == a);
    for (std::uint32_t b = 0; b < 4; ++b) {
      CHECK(q.seqIdx(a, b) == q.joinIdx(a, b));
      // residual(x, z) exists iff x <= z, and then equals z.
      std::uint32_t r = q.residIdx(a, b);
      if (q.leIdx(a, b))
        CHECK(r == b);
      else
        CHECK(r == U);
    }
  }
}

TEST_CASE("custom definitions load from JSON") {
  std::string path = testutil::corpusDir() + "/systems/lift2.json";
  FiniteQuantale q = FiniteQuantale::fromJsonFile(path, "custom:lift2");
  CHECK(q.size() == 4);
  CHECK(q.commutative());
  CHECK(q.def().elements == std::vector<std::string>{"bot", "a", "b", "top"});
  auto left = q.atom("left");
  REQUIRE(left.has_value());
  CHECK(q.show(*left) == "a");
  std::uint32_t a = 1, b = 2, top = 3;
  CHECK(q.seqIdx(a, b) == top);
  CHECK(q.residIdx(b, a) == U);
}

TEST_CASE("custom JSON loading reports precise errors") {
  CHECK_THROWS_WITH_AS(
      (void)FiniteQuantale::fromJsonFile("/nonexistent/q.json", "c"),
      doctest::Contains("cannot open"), std::invalid_argument);

  std::string broken = writeTemp("residuum_broken.json", "{ not json");
  CHECK_THROWS_AS((void)FiniteQuantale::fromJsonFile(broken, "c"),
                  std::invalid_argument);

  std::string foreign = writeTemp("residuum_foreign.json", R"({
    "elements": ["u"], "unit": "u",
    "seq": {"u": {"u": "ghost"}},
    "join": {"u": {"u": "u"}}
  })");
  CHECK_THROWS_WITH_AS((void)FiniteQuantale::fromJsonFile(foreign, "c"),
                       doctest::Contains("unknown element"),
                       std::invalid_argument);

  std::string badUnit = writeTemp("residuum_badunit.json", R"({
    "elements": ["u"], "unit": "v",
    "seq": {"u": {"u": "u"}},
    "join": {"u": {"u": "u"}}
  })");
  CHECK_THROWS_AS((void)FiniteQuantale::fromJsonFile(badUnit, "c"),
                  std::invalid_argument);

  std::remove(broken.c_str());
  std::remove(foreign.c_str());
  std::remove(badUnit.c_str());
}
