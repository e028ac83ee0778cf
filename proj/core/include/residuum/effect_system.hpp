#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "residuum/effect.hpp"

namespace residuum {

// One instantiation of the effect algebra: a set of effects with partial
// sequencing and join, a unit, iteration, and a residual operation.
//
// All binary operations are partial; absence of a result (std::nullopt)
// means the combination is undefined in this system, which the checker
// reports rather than papering over.  Equality of two partial results means
// "both undefined, or both defined and equal".
//
// The residual target \ operation answers: given that `sofar` has already
// happened and the overall bound is `target`, what is the largest effect the
// remaining computation may still have?  Its contract (weaker than a true
// residual) is:
//   bounding     x <= residual(y, z)  implies  seq(y, x) <= z
//   existence    seq(y, x) <= z       implies  residual(y, z) is defined
//   self         residual(z, z) is defined
//   unit         residual(unit, z) = z
class EffectSystem {
public:
  virtual ~EffectSystem() = default;

  virtual const std::string& id() const = 0;

  virtual Effect unit() const = 0;
  virtual std::optional<Effect> seq(const Effect& a, const Effect& b) const = 0;
  virtual std::optional<Effect> join(const Effect& a, const Effect& b) const = 0;
  virtual std::optional<Effect> iter(const Effect& a) const = 0;
  virtual std::optional<Effect> residual(const Effect& sofar,
                                         const Effect& target) const = 0;

  // True when seq and join coincide; the checker relaxes its error recovery
  // for such systems because effects can be re-ordered freely.
  virtual bool commutative() const = 0;

  // Partial order: le(a, b) iff join(a, b) is defined and equals b.
  bool le(const Effect& a, const Effect& b) const;

  virtual std::string show(const Effect& e) const = 0;

  // Effect literal as written in source, e.g. "locking", "{open,close}",
  // "re\"a(b|c)*\"".  Returns nullopt when the text is not a literal of this
  // system (the caller renders the error).
  virtual std::optional<Effect> parseLiteral(const std::string& text) const = 0;

  // Built-in atom names this system gives to leaf operations, for programs
  // that use named atoms rather than literals.  Empty for systems without a
  // fixed atom table.
  virtual std::vector<std::string> atomLabels() const = 0;
  virtual std::optional<Effect> atom(const std::string& label) const = 0;

  // Finite systems expose their whole carrier; infinite ones return nullopt
  // and the law suite falls back to sampling.
  virtual std::optional<std::vector<Effect>> carrier() const = 0;

  // Pseudo-random effect, used for law sampling on infinite carriers.
  virtual Effect sample(std::uint64_t seed) const = 0;

protected:
  // Guards against effects minted by a different system.
  void requireMine(const Effect& e) const;
};

}  // namespace residuum
