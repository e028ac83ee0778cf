#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "residuum/effect_system.hpp"

namespace residuum {

struct LawResult {
  std::string name;
  std::size_t casesChecked = 0;
  std::size_t casesSkipped = 0;  // state-budget aborts, not violations
  std::size_t failures = 0;
  std::optional<std::string> firstCounterexample;
};

struct LawReport {
  std::string systemId;
  bool exhaustive = false;
  std::vector<LawResult> laws;

  bool allPassed() const {
    for (const auto& l : laws)
      if (l.failures > 0) return false;
    return true;
  }
};

// Checks the algebra laws of a system: monoid and join-semilattice laws,
// two-sided distributivity, the five iteration properties plus loop
// unrolling, and the four residual axioms plus the derived residual lemmas.
//
// Finite carriers up to 64 elements are checked exhaustively; larger or
// infinite carriers are sampled with the given budget and seed.  Sampled
// operand pools are enriched with synthesized values (sequences, joins,
// residuals of samples) so that conditional laws get defined premises.
LawReport checkLaws(const EffectSystem& sys, std::size_t sampleBudget = 4000,
                    std::uint64_t seed = 12345);

}  // namespace residuum
