#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "residuum/effect_system.hpp"

namespace residuum {

// Differential verification of the checker against a brute-force oracle.
//
// Every statement shape up to `maxNodes` AST nodes is enumerated (atoms,
// blocks, if/else, while, and an applied lambda), instantiated with every
// atom of the system, and checked under every carrier element as the
// declared bound.  For each program the checker runs twice, once with early
// residual checks and once as plain synthesis, and an independent oracle
// recomputes the expected outcome from the algebra tables alone, never
// calling the checker's residual operation:
//
//   - all three runs must agree on acceptance,
//   - accepted programs must synthesize the effect the oracle computed,
//   - rejected programs must report their first effect error at the exact
//     source offset the oracle predicts,
//   - accepted early runs must evaluate exactly one residual per
//     instrumented program point.
//
// A separate sweep checks the early checker's entry points directly: for
// every enumerated body and every (prefix, bound) pair whose residual
// exists, if plain synthesis yields an effect that still fits the residual,
// the early check of that body must accept.
struct VerifyOptions {
  std::size_t maxNodes = 5;
  // Disables the checker's mid-path residual tests.  Acceptance must not
  // change (the final bound check subsumes them); error positions must.
  // Used as a negative control in the test suite.
  bool skipResidualChecks = false;
  std::size_t maxSamples = 5;
};

struct VerifySample {
  std::string program;
  std::string detail;
};

struct VerifyReport {
  std::string system;
  std::size_t maxNodes = 0;
  std::size_t trees = 0;
  std::size_t programs = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  std::size_t divergences = 0;         // acceptance disagreement
  std::size_t effectMismatches = 0;    // accepted, but wrong synthesized effect
  std::size_t positionMismatches = 0;  // rejected, but wrong first-error offset
  std::size_t counterViolations = 0;   // accepted, but residual count != 1 somewhere

  std::size_t lemmaChecked = 0;
  std::size_t lemmaFailures = 0;

  std::vector<VerifySample> samples;

  bool ok() const {
    return divergences == 0 && effectMismatches == 0 &&
           positionMismatches == 0 && counterViolations == 0 &&
           lemmaFailures == 0;
  }
  std::string text() const;
  std::string toJson() const;
};

// Requires a system with a finite carrier and a nonempty atom table.
// Throws std::invalid_argument otherwise.
VerifyReport runVerification(std::shared_ptr<const EffectSystem> system,
                             const VerifyOptions& options = {});

// Number of distinct statement shapes the verifier enumerates for a system
// with `atomCount` atoms and bodies of up to `maxNodes` AST nodes.  Exposed
// so tests can cross-check the enumeration against an independent count.
std::size_t enumeratedTreeCount(std::size_t atomCount, std::size_t maxNodes);

}  // namespace residuum
