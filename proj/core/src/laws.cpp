#include "residuum/laws.hpp"

#include <functional>
#include <random>

#include "residuum/dfa.hpp"

namespace residuum {
namespace {

constexpr std::size_t kExhaustiveCap = 64;

bool partialEq(const std::optional<Effect>& a, const std::optional<Effect>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a.has_value() || *a == *b;
}

std::string showOpt(const EffectSystem& sys, const std::optional<Effect>& e) {
  return e ? sys.show(*e) : "(undefined)";
}

struct Runner {
  const EffectSystem& sys;
  std::vector<Effect> pool;
  bool exhaustive;
  std::size_t budget;
  std::uint64_t seed;
  std::vector<LawResult> results;

  using Verdict = std::optional<std::string>;  // failure message, or pass

  void run1(const std::string& name, const std::function<Verdict(const Effect&)>& f) {
    LawResult r{name};
    for (const Effect& x : pool) {
      try {
        Verdict v = f(x);
        ++r.casesChecked;
        if (v && r.failures++ == 0)
          r.firstCounterexample = "x=" + sys.show(x) + ": " + *v;
      } catch (const StateBudgetExceeded&) {
        ++r.casesSkipped;
      }
    }
    results.push_back(std::move(r));
  }

  void run2(const std::string& name,
            const std::function<Verdict(const Effect&, const Effect&)>& f) {
    LawResult r{name};
    auto probe = [&](const Effect& x, const Effect& y) {
      try {
        Verdict v = f(x, y);
        ++r.casesChecked;
        if (v && r.failures++ == 0)
          r.firstCounterexample =
              "x=" + sys.show(x) + ", y=" + sys.show(y) + ": " + *v;
      } catch (const StateBudgetExceeded&) {
        ++r.casesSkipped;
      }
    };
    if (exhaustive) {
      for (const Effect& x : pool)
        for (const Effect& y : pool) probe(x, y);
    } else {
      std::mt19937_64 rng(seed ^ std::hash<std::string>{}(name));
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (std::size_t i = 0; i < budget; ++i) probe(pool[pick(rng)], pool[pick(rng)]);
    }
    results.push_back(std::move(r));
  }

  void run3(const std::string& name,
            const std::function<Verdict(const Effect&, const Effect&, const Effect&)>& f) {
    LawResult r{name};
    auto probe = [&](const Effect& x, const Effect& y, const Effect& z) {
      try {
        Verdict v = f(x, y, z);
        ++r.casesChecked;
        if (v && r.failures++ == 0)
          r.firstCounterexample = "x=" + sys.show(x) + ", y=" + sys.show(y) +
                                  ", z=" + sys.show(z) + ": " + *v;
      } catch (const StateBudgetExceeded&) {
        ++r.casesSkipped;
      }
    };
    if (exhaustive) {
      for (const Effect& x : pool)
        for (const Effect& y : pool)
          for (const Effect& z : pool) probe(x, y, z);
    } else {
      std::mt19937_64 rng(seed ^ std::hash<std::string>{}(name));
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (std::size_t i = 0; i < budget; ++i)
        probe(pool[pick(rng)], pool[pick(rng)], pool[pick(rng)]);
    }
    results.push_back(std::move(r));
  }
};

void addToPool(std::vector<Effect>& pool, const Effect& e, std::size_t cap) {
  if (pool.size() >= cap) return;
  for (const Effect& p : pool)
    if (p == e) return;
  pool.push_back(e);
}

std::vector<Effect> samplePool(const EffectSystem& sys, std::uint64_t seed) {
  constexpr std::size_t kBase = 16;
  constexpr std::size_t kCap = 40;
  std::vector<Effect> pool;
  addToPool(pool, sys.unit(), kCap);
  for (std::size_t i = 0; i < kBase; ++i) {
    try {
      addToPool(pool, sys.sample(seed + i), kCap);
    } catch (const StateBudgetExceeded&) {
    }
  }
  // Derived operands so that laws with definedness premises (residual
  // lemmas especially) see inputs where the premise actually holds.
  std::mt19937_64 rng(seed * 7919 + 13);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t round = 0; round < 48 && pool.size() < kCap; ++round) {
    // By value: addToPool grows the vector, invalidating references into it.
    const Effect a = pool[pick(rng) % pool.size()];
    const Effect b = pool[pick(rng) % pool.size()];
    try {
      if (auto s = sys.seq(a, b)) addToPool(pool, *s, kCap);
      if (auto j = sys.join(a, b)) addToPool(pool, *j, kCap);
      if (auto r = sys.residual(a, b)) addToPool(pool, *r, kCap);
      if (auto it = sys.iter(a)) addToPool(pool, *it, kCap);
    } catch (const StateBudgetExceeded&) {
    }
  }
  return pool;
}

}  // namespace

LawReport checkLaws(const EffectSystem& sys, std::size_t sampleBudget,
                    std::uint64_t seed) {
  LawReport report;
  report.systemId = sys.id();

  std::optional<std::vector<Effect>> carrier = sys.carrier();
  Runner run{sys, {}, false, sampleBudget, seed, {}};
  if (carrier && carrier->size() <= kExhaustiveCap) {
    run.pool = *carrier;
    run.exhaustive = true;
  } else {
    run.pool = samplePool(sys, seed);
  }
  report.exhaustive = run.exhaustive;

  const Effect I = sys.unit();
  using V = Runner::Verdict;

  run.run1("unit-left", [&](const Effect& x) -> V {
    auto s = sys.seq(I, x);
    if (!s || !(*s == x))
      return "seq(I, x) = " + showOpt(sys, s) + ", expected x";
    return std::nullopt;
  });

  run.run1("unit-right", [&](const Effect& x) -> V {
    auto s = sys.seq(x, I);
    if (!s || !(*s == x))
      return "seq(x, I) = " + showOpt(sys, s) + ", expected x";
    return std::nullopt;
  });

  run.run3("seq-associative", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    auto xy = sys.seq(x, y);
    auto lhs = xy ? sys.seq(*xy, z) : std::nullopt;
    auto yz = sys.seq(y, z);
    auto rhs = yz ? sys.seq(x, *yz) : std::nullopt;
    if (!partialEq(lhs, rhs))
      return "(x;y);z = " + showOpt(sys, lhs) + " but x;(y;z) = " + showOpt(sys, rhs);
    return std::nullopt;
  });

  run.run2("join-commutative", [&](const Effect& x, const Effect& y) -> V {
    auto ab = sys.join(x, y);
    auto ba = sys.join(y, x);
    if (!partialEq(ab, ba))
      return "join(x,y) = " + showOpt(sys, ab) + " but join(y,x) = " + showOpt(sys, ba);
    return std::nullopt;
  });

  run.run1("join-idempotent", [&](const Effect& x) -> V {
    auto j = sys.join(x, x);
    if (!j || !(*j == x))
      return "join(x, x) = " + showOpt(sys, j) + ", expected x";
    return std::nullopt;
  });

  run.run3("join-associative", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    auto xy = sys.join(x, y);
    auto lhs = xy ? sys.join(*xy, z) : std::nullopt;
    auto yz = sys.join(y, z);
    auto rhs = yz ? sys.join(x, *yz) : std::nullopt;
    if (!partialEq(lhs, rhs))
      return "(x|y)|z = " + showOpt(sys, lhs) + " but x|(y|z) = " + showOpt(sys, rhs);
    return std::nullopt;
  });

  run.run3("distributes-left", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    auto yz = sys.join(y, z);
    auto lhs = yz ? sys.seq(x, *yz) : std::nullopt;
    auto xy = sys.seq(x, y);
    auto xz = sys.seq(x, z);
    auto rhs = (xy && xz) ? sys.join(*xy, *xz) : std::nullopt;
    if (!partialEq(lhs, rhs))
      return "x;(y|z) = " + showOpt(sys, lhs) + " but (x;y)|(x;z) = " + showOpt(sys, rhs);
    return std::nullopt;
  });

  run.run3("distributes-right", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    auto xy = sys.join(x, y);
    auto lhs = xy ? sys.seq(*xy, z) : std::nullopt;
    auto xz = sys.seq(x, z);
    auto yz = sys.seq(y, z);
    auto rhs = (xz && yz) ? sys.join(*xz, *yz) : std::nullopt;
    if (!partialEq(lhs, rhs))
      return "(x|y);z = " + showOpt(sys, lhs) + " but (x;z)|(y;z) = " + showOpt(sys, rhs);
    return std::nullopt;
  });

  run.run1("iter-extensive", [&](const Effect& x) -> V {
    auto it = sys.iter(x);
    if (it && !sys.le(x, *it))
      return "iter(x) = " + sys.show(*it) + " but x is not below it";
    return std::nullopt;
  });

  run.run1("iter-idempotent", [&](const Effect& x) -> V {
    auto it = sys.iter(x);
    if (!it) return std::nullopt;
    auto it2 = sys.iter(*it);
    if (!it2 || !(*it2 == *it))
      return "iter(iter(x)) = " + showOpt(sys, it2) + " but iter(x) = " + sys.show(*it);
    return std::nullopt;
  });

  run.run2("iter-monotone", [&](const Effect& x, const Effect& y) -> V {
    if (!sys.le(x, y)) return std::nullopt;
    auto ix = sys.iter(x);
    auto iy = sys.iter(y);
    if (ix && iy && !sys.le(*ix, *iy))
      return "x <= y but iter(x) = " + sys.show(*ix) + " is not below iter(y) = " + sys.show(*iy);
    return std::nullopt;
  });

  run.run1("iter-foldable", [&](const Effect& x) -> V {
    auto it = sys.iter(x);
    if (!it) return std::nullopt;
    auto s = sys.seq(*it, *it);
    if (!s || !sys.le(*s, *it))
      return "iter(x);iter(x) = " + showOpt(sys, s) + " is not below iter(x) = " + sys.show(*it);
    return std::nullopt;
  });

  run.run1("iter-possibly-empty", [&](const Effect& x) -> V {
    auto it = sys.iter(x);
    if (it && !sys.le(I, *it))
      return "unit is not below iter(x) = " + sys.show(*it);
    return std::nullopt;
  });

  run.run1("loop-unrolling", [&](const Effect& x) -> V {
    auto it = sys.iter(x);
    if (!it) return std::nullopt;
    Effect power = x;
    for (int n = 1; n <= 4; ++n) {
      if (!sys.le(power, *it))
        return "x^" + std::to_string(n) + " = " + sys.show(power) +
               " is not below iter(x) = " + sys.show(*it);
      auto next = sys.seq(power, x);
      if (!next) break;
      power = *next;
    }
    return std::nullopt;
  });

  run.run3("resid-bounding", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    auto r = sys.residual(y, z);
    if (!r || !sys.le(x, *r)) return std::nullopt;
    auto s = sys.seq(y, x);
    if (!s || !sys.le(*s, z))
      return "x <= residual(y,z) = " + sys.show(*r) + " but seq(y,x) = " +
             showOpt(sys, s) + " is not below z";
    return std::nullopt;
  });

  run.run3("resid-existence", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    auto s = sys.seq(y, x);
    if (!s || !sys.le(*s, z)) return std::nullopt;
    if (!sys.residual(y, z))
      return "seq(y,x) = " + sys.show(*s) + " is below z but residual(y,z) is undefined";
    return std::nullopt;
  });

  run.run1("resid-self", [&](const Effect& z) -> V {
    if (!sys.residual(z, z)) return "residual(z, z) is undefined";
    return std::nullopt;
  });

  run.run1("resid-unit", [&](const Effect& z) -> V {
    auto r = sys.residual(I, z);
    if (!r || !(*r == z))
      return "residual(I, z) = " + showOpt(sys, r) + ", expected z";
    return std::nullopt;
  });

  run.run2("resid-sequencing", [&](const Effect& y, const Effect& z) -> V {
    auto r = sys.residual(y, z);
    if (!r) return std::nullopt;
    auto s = sys.seq(y, *r);
    if (!s || !sys.le(*s, z))
      return "seq(y, residual(y,z)) = " + showOpt(sys, s) + " is not below z";
    return std::nullopt;
  });

  run.run3("resid-shifting", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    auto xy = sys.seq(x, y);
    bool lhs = xy && sys.residual(*xy, z).has_value();
    auto xz = sys.residual(x, z);
    bool rhs = xz && sys.residual(y, *xz).has_value();
    if (lhs != rhs)
      return std::string("residual(x;y, z) is ") + (lhs ? "defined" : "undefined") +
             " but residual(y, residual(x,z)) is " + (rhs ? "defined" : "undefined");
    return std::nullopt;
  });

  run.run3("resid-antitone", [&](const Effect& x, const Effect& y, const Effect& z) -> V {
    if (!sys.le(x, y)) return std::nullopt;
    if (sys.residual(y, z) && !sys.residual(x, z))
      return "x <= y and residual(y,z) is defined but residual(x,z) is not";
    return std::nullopt;
  });

  report.laws = std::move(run.results);
  return report;
}

}  // namespace residuum
