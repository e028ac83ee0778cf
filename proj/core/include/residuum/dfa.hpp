#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace residuum {

// Thrown when a language operation would need more DFA states than the cap
// allows.  The trace system treats the offending operation as unusable
// rather than silently truncating.
class StateBudgetExceeded : public std::runtime_error {
public:
  explicit StateBudgetExceeded(std::size_t wanted)
      : std::runtime_error("state budget exceeded: construction needs " +
                           std::to_string(wanted) + " states (cap " +
                           std::to_string(kMaxStates) + ")"),
        wanted_(wanted) {}
  static constexpr std::size_t kMaxStates = 10000;
  std::size_t wanted() const { return wanted_; }

private:
  std::size_t wanted_;
};

// A complete deterministic automaton over a fixed alphabet of symbol names.
// States are dense indices; next[s * alphabet.size() + a] is the successor
// of state s on symbol a.  All constructors in dfa.cpp return the canonical
// form: minimized, with states renumbered in BFS order from the start state
// (symbols in alphabet order).  Two canonical DFAs over the same alphabet
// accept the same language iff they are structurally equal, so the defaulted
// operator== decides language equality.
struct Dfa {
  std::vector<std::string> alphabet;
  std::uint32_t start = 0;
  std::uint32_t stateCount = 0;
  std::vector<std::uint32_t> next;
  std::vector<bool> accepting;

  friend bool operator==(const Dfa&, const Dfa&) = default;

  std::uint32_t step(std::uint32_t state, std::uint32_t sym) const {
    return next[static_cast<std::size_t>(state) * alphabet.size() + sym];
  }
  bool accepts(const std::vector<std::uint32_t>& word) const;
  bool isEmpty() const;
  bool acceptsEpsilon() const { return accepting[start]; }
};

namespace dfa {

// All constructors produce canonical (minimal, BFS-numbered) automata and
// expect their DFA arguments to share the same alphabet vector.

Dfa emptyLanguage(std::vector<std::string> alphabet);
Dfa epsilonLanguage(std::vector<std::string> alphabet);
Dfa singleSymbol(std::vector<std::string> alphabet, std::uint32_t sym);
Dfa sigmaStar(std::vector<std::string> alphabet);

Dfa canonicalize(const Dfa& d);

Dfa unionOf(const Dfa& a, const Dfa& b);
Dfa intersectionOf(const Dfa& a, const Dfa& b);
Dfa differenceOf(const Dfa& a, const Dfa& b);
Dfa complementOf(const Dfa& a);
Dfa concatOf(const Dfa& a, const Dfa& b);
Dfa starOf(const Dfa& a);

bool subsetOf(const Dfa& a, const Dfa& b);

// Left quotient: { w | exists x in A. x w in B }.
Dfa leftQuotient(const Dfa& a, const Dfa& b);

// Residual in the universal sense: { w | forall x in A. x w in B }.
// Built from the vector automaton whose single start state is the set of
// B-states reachable from B's start by some word of A.  Empty when no word
// works for every x.
Dfa universalResidual(const Dfa& a, const Dfa& b);

// Parse a small regular-expression dialect over single-character symbols:
// literals, '(' ')', '|', '*', '+', '?', juxtaposition for concatenation.
// Every literal must name a symbol of the alphabet.  Throws
// std::invalid_argument on malformed input or foreign symbols.
Dfa fromRegex(std::vector<std::string> alphabet, const std::string& pattern);

// Enumerate accepted words of length <= maxLen in shortlex order, up to
// maxCount of them.  Words are rendered with symbol names joined by sep.
std::vector<std::string> acceptedWords(const Dfa& d, std::size_t maxLen,
                                       std::size_t maxCount,
                                       const std::string& sep = "");

// True when the accepted language is finite, i.e. no cycle lies on a path
// from the start state to an accepting state.
bool isFiniteLanguage(const Dfa& d);

}  // namespace dfa
}  // namespace residuum
