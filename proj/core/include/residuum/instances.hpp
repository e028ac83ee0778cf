#pragma once

#include <memory>
#include <string>
#include <vector>

#include "residuum/effect_system.hpp"
#include "residuum/finite_quantale.hpp"

namespace residuum {

// Atomicity (mover) effects B < {L, R} < A < Top with Lipton-style
// sequencing.  Atoms: local, acquire, release, atomic, compound.
FiniteQuantale atomicityQuantale();

// Reentrancy effects {locking, unlocking, critical, entrant, eps} for
// non-nestable critical sections; seq and join are partial.  Atoms: begin,
// end, inside, outside, skip.
FiniteQuantale reentrancyQuantale();

// Parameterized-monad effects: "I" plus all state pairs "(x,y)".  seq
// composes matching interfaces; join is near-discrete, relating only the
// polymorphic identity I to each per-state identity (x,x); residual follows
// (x,y)\(x,z) = (y,z), and iteration is defined only on the unit.
FiniteQuantale pmonadQuantale(const std::vector<std::string>& states,
                              const std::string& systemId);

// Must-effect system over a declared event universe: sets of events that
// are guaranteed to happen.  seq is union, join is intersection, the order
// is reverse inclusion, and the residual is total.
class MustSystem : public EffectSystem {
public:
  MustSystem(std::vector<std::string> universe, std::string systemId);

  const std::string& id() const override { return id_; }
  Effect unit() const override;
  std::optional<Effect> seq(const Effect& a, const Effect& b) const override;
  std::optional<Effect> join(const Effect& a, const Effect& b) const override;
  std::optional<Effect> iter(const Effect& a) const override;
  std::optional<Effect> residual(const Effect& sofar,
                                 const Effect& target) const override;
  bool commutative() const override { return true; }
  std::string show(const Effect& e) const override;
  std::optional<Effect> parseLiteral(const std::string& text) const override;
  std::vector<std::string> atomLabels() const override;
  std::optional<Effect> atom(const std::string& label) const override;
  std::optional<std::vector<Effect>> carrier() const override;
  Effect sample(std::uint64_t seed) const override;

  const std::vector<std::string>& universe() const { return universe_; }

private:
  Effect make(EventSet s) const;
  std::string id_;
  std::vector<std::string> universe_;
};

}  // namespace residuum
