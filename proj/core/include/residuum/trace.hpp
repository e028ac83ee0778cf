#pragma once

#include <random>
#include <string>
#include <vector>

#include "residuum/effect_system.hpp"

namespace residuum {

// Finite-trace effects: non-empty regular languages over a declared
// alphabet, represented as canonical minimal DFAs.  seq is concatenation,
// join is union, iteration is Kleene star, and the residual of X against Y
// is { w | forall x in X, xw in Y }, absent when that language is empty.
class TraceSystem : public EffectSystem {
public:
  TraceSystem(std::vector<std::string> symbols, std::string systemId);

  const std::string& id() const override { return id_; }
  Effect unit() const override;
  std::optional<Effect> seq(const Effect& a, const Effect& b) const override;
  std::optional<Effect> join(const Effect& a, const Effect& b) const override;
  std::optional<Effect> iter(const Effect& a) const override;
  std::optional<Effect> residual(const Effect& sofar,
                                 const Effect& target) const override;
  bool commutative() const override { return false; }
  std::string show(const Effect& e) const override;
  std::optional<Effect> parseLiteral(const std::string& text) const override;
  std::vector<std::string> atomLabels() const override;
  std::optional<Effect> atom(const std::string& label) const override;
  std::optional<std::vector<Effect>> carrier() const override;
  Effect sample(std::uint64_t seed) const override;

  const std::vector<std::string>& symbols() const { return symbols_; }

  Effect fromDfa(Dfa d) const;

  // Uniform random regex in the dialect parseLiteral accepts, with at most
  // maxSize leaf/operator nodes.  Used by law sampling and the word oracle.
  static std::string randomRegex(std::mt19937_64& rng,
                                 const std::vector<std::string>& symbols,
                                 int maxSize);

private:
  std::string id_;
  std::vector<std::string> symbols_;
};

}  // namespace residuum
