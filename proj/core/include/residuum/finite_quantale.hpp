#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "residuum/effect_system.hpp"

namespace residuum {

// Effect system with an explicit finite carrier and operation tables.
// Cells hold carrier indices; kUndef marks undefined combinations.
//
// Tables for iter and residual may be supplied explicitly (e.g. loaded from
// a file) or derived:
//   - derived iter(x) is the least y with unit <= y, x <= y and y;y <= y,
//     undefined when no least such element exists;
//   - derived residual(y,z) considers S = { r | y;r defined and y;r <= z },
//     undefined when S is empty; otherwise the join of S when that join is
//     defined, else a maximal element of S (lowest carrier index on ties,
//     so diagnostics are reproducible).
class FiniteQuantale : public EffectSystem {
public:
  static constexpr std::uint32_t kUndef = 0xFFFFFFFFu;

  struct Def {
    std::string id;
    std::vector<std::string> elements;
    std::uint32_t unit = 0;
    std::vector<std::uint32_t> seqTable;    // n*n, row-major: seq[a*n+b]
    std::vector<std::uint32_t> joinTable;   // n*n
    std::vector<std::uint32_t> iterTable;   // n; empty = derive
    std::vector<std::uint32_t> residTable;  // n*n; empty = derive
    bool commutativeSeq = false;
    std::vector<std::pair<std::string, std::string>> atoms;  // label -> element
  };

  // Validates shapes and fills missing iter/residual tables by derivation.
  explicit FiniteQuantale(Def def);

  // Loads the JSON description used by `custom:` system keys.  Field
  // layout: elements, unit, seq, join, optional iter, optional residual,
  // commutative, atoms; null cells mean undefined.  Names not present in
  // `elements` are load errors.  Algebra laws are deliberately not checked
  // here; the `laws` command exists for that.
  static FiniteQuantale fromJsonFile(const std::string& path,
                                     const std::string& systemId);

  // seq := join over the given semilattice, making a commutative system.
  // The unit must be a bottom element (join(unit, x) = x for all x).
  static FiniteQuantale commutativeLift(Def semilattice);

  const std::string& id() const override { return def_.id; }
  Effect unit() const override;
  std::optional<Effect> seq(const Effect& a, const Effect& b) const override;
  std::optional<Effect> join(const Effect& a, const Effect& b) const override;
  std::optional<Effect> iter(const Effect& a) const override;
  std::optional<Effect> residual(const Effect& sofar,
                                 const Effect& target) const override;
  bool commutative() const override { return def_.commutativeSeq; }
  std::string show(const Effect& e) const override;
  std::optional<Effect> parseLiteral(const std::string& text) const override;
  std::vector<std::string> atomLabels() const override;
  std::optional<Effect> atom(const std::string& label) const override;
  std::optional<std::vector<Effect>> carrier() const override;
  Effect sample(std::uint64_t seed) const override;

  std::size_t size() const { return def_.elements.size(); }
  const Def& def() const { return def_; }

  // Index-level views used by tests and the verification oracle.
  std::uint32_t seqIdx(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t joinIdx(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t iterIdx(std::uint32_t a) const;
  std::uint32_t residIdx(std::uint32_t a, std::uint32_t b) const;
  bool leIdx(std::uint32_t a, std::uint32_t b) const;

  // The derivations, exposed so tests can re-run them against explicit
  // tables.  Both operate purely on seq/join.
  std::uint32_t deriveIter(std::uint32_t x) const;
  std::uint32_t deriveResidual(std::uint32_t sofar, std::uint32_t target) const;

private:
  Effect make(std::uint32_t idx) const;
  Def def_;
};

}  // namespace residuum
