#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "residuum/ast.hpp"
#include "residuum/control.hpp"
#include "residuum/diagnostics.hpp"
#include "residuum/resolve.hpp"

namespace residuum {

struct CheckOptions {
  // Early mode threads a remaining budget through the program and tests a
  // residual at every atom, call, throw, branch merge, and loop, reporting
  // bound violations at the first subexpression that commits to one.  With
  // early off, only the combining operators themselves are checked mid-path
  // and bounds are enforced at function boundaries.
  bool early = true;
  // Disables the mid-path residual tests while leaving everything else
  // intact.  Exists so self-verification has a sabotaged variant that must
  // be caught; never useful for real checking.
  bool skipResidualChecks = false;
};

struct CheckResult {
  std::vector<Diagnostic> diags;
  // Synthesized whole-body effect per function, by declaration order;
  // absent when checking that function failed.
  std::vector<std::optional<ControlEffect>> fnEffects;
  // Residual evaluations performed per AST node, keyed by span start.
  std::map<std::size_t, std::size_t> residualEvals;

  bool accepted() const { return diags.empty(); }
};

CheckResult checkModule(const ast::Module& m, const ResolvedModule& r,
                        std::shared_ptr<const EffectSystem> system,
                        const CheckOptions& options = {});

// Expression-level judgment for one function body, without the function
// boundary checks (no bound comparison, no escape-budget comparison at the
// end).  Used by self-verification to relate the two checking modes.
struct BlockJudgment {
  bool accepted = false;
  std::optional<ControlEffect> rel;  // synthesized body effect when accepted
  std::optional<std::size_t> firstFailureOffset;
  std::vector<Diagnostic> diags;
};

// Global-mode synthesis of the body of function `fnIndex`.
BlockJudgment synthesizeBody(const ast::Module& m, const ResolvedModule& r,
                             std::shared_ptr<const EffectSystem> system,
                             std::size_t fnIndex);

// Early-mode check of the body of function `fnIndex` under an arbitrary
// already-accumulated prefix `chi0` and target `bound`.
BlockJudgment checkBodyEarly(const ast::Module& m, const ResolvedModule& r,
                             std::shared_ptr<const EffectSystem> system,
                             std::size_t fnIndex, const ControlEffect& chi0,
                             const ControlEffect& bound);

// True for diagnostics produced by the effect discipline itself, as opposed
// to parsing, resolution, or plain type errors.
bool isEffectDiagnostic(DiagKind kind);

// Smallest span start among effect diagnostics, if any.
std::optional<std::size_t> earliestEffectFailure(
    const std::vector<Diagnostic>& diags);

}  // namespace residuum
