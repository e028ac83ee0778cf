#include "residuum/trace.hpp"

#include <algorithm>
#include <stdexcept>

#include "residuum/dfa.hpp"

namespace residuum {

TraceSystem::TraceSystem(std::vector<std::string> symbols, std::string systemId)
    : id_(std::move(systemId)), symbols_(std::move(symbols)) {
  if (symbols_.empty())
    throw std::invalid_argument("trace: empty alphabet");
  for (const std::string& s : symbols_)
    if (s.empty()) throw std::invalid_argument("trace: empty symbol name");
  std::vector<std::string> sorted = symbols_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("trace: duplicate symbol in alphabet");
}

Effect TraceSystem::fromDfa(Dfa d) const { return Effect(id_, std::move(d)); }

Effect TraceSystem::unit() const {
  return fromDfa(dfa::epsilonLanguage(symbols_));
}

std::optional<Effect> TraceSystem::seq(const Effect& a, const Effect& b) const {
  requireMine(a);
  requireMine(b);
  return fromDfa(dfa::concatOf(a.dfa(), b.dfa()));
}

std::optional<Effect> TraceSystem::join(const Effect& a, const Effect& b) const {
  requireMine(a);
  requireMine(b);
  return fromDfa(dfa::unionOf(a.dfa(), b.dfa()));
}

std::optional<Effect> TraceSystem::iter(const Effect& a) const {
  requireMine(a);
  return fromDfa(dfa::starOf(a.dfa()));
}

std::optional<Effect> TraceSystem::residual(const Effect& sofar,
                                            const Effect& target) const {
  requireMine(sofar);
  requireMine(target);
  Dfa r = dfa::universalResidual(sofar.dfa(), target.dfa());
  if (r.isEmpty()) return std::nullopt;
  return fromDfa(std::move(r));
}

std::string TraceSystem::show(const Effect& e) const {
  requireMine(e);
  std::vector<std::string> words = dfa::acceptedWords(e.dfa(), 3, 5);
  std::string out = "{";
  for (std::size_t i = 0; i < words.size() && i < 4; ++i) {
    if (i) out += ",";
    out += words[i].empty() ? "ε" : words[i];
  }
  if (words.size() > 4) out += ",...";
  return out + "}";
}

std::optional<Effect> TraceSystem::parseLiteral(const std::string& text) const {
  if (text == "I") return unit();
  if (text.size() >= 4 && text.compare(0, 3, "re\"") == 0 && text.back() == '"') {
    try {
      return fromDfa(dfa::fromRegex(symbols_, text.substr(3, text.size() - 4)));
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
  return atom(text);
}

std::vector<std::string> TraceSystem::atomLabels() const { return symbols_; }

std::optional<Effect> TraceSystem::atom(const std::string& label) const {
  for (std::uint32_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == label)
      return fromDfa(dfa::singleSymbol(symbols_, i));
  return std::nullopt;
}

std::optional<std::vector<Effect>> TraceSystem::carrier() const {
  return std::nullopt;
}

std::string TraceSystem::randomRegex(std::mt19937_64& rng,
                                     const std::vector<std::string>& symbols,
                                     int maxSize) {
  // Weighted toward leaves so sizes stay small; each call consumes at
  // least one unit of the size budget.
  if (maxSize <= 1) {
    std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
    return symbols[pick(rng)];
  }
  std::uniform_int_distribution<int> shape(0, 5);
  switch (shape(rng)) {
    case 0:
    case 1: {
      std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
      return symbols[pick(rng)];
    }
    case 2: {
      std::uniform_int_distribution<int> split(1, maxSize - 1);
      int left = split(rng);
      return randomRegex(rng, symbols, left) +
             randomRegex(rng, symbols, maxSize - 1 - left);
    }
    case 3: {
      std::uniform_int_distribution<int> split(1, maxSize - 1);
      int left = split(rng);
      return "(" + randomRegex(rng, symbols, left) + "|" +
             randomRegex(rng, symbols, maxSize - 1 - left) + ")";
    }
    case 4:
      return "(" + randomRegex(rng, symbols, maxSize - 1) + ")*";
    default:
      return "(" + randomRegex(rng, symbols, maxSize - 1) + ")?";
  }
}

Effect TraceSystem::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed * 6364136223846793005ull + 1442695040888963407ull);

  bool singleChar = true;
  for (const std::string& s : symbols_)
    if (s.size() != 1) singleChar = false;
  if (singleChar) {
    // Random regular expressions of bounded size keep the sampled languages
    // varied: finite, infinite, empty-containing, nested stars.
    return fromDfa(dfa::fromRegex(symbols_, randomRegex(rng, symbols_, 6)));
  }

  // Multi-character symbol names do not fit the regex dialect; fall back to
  // a union of a few random words, sometimes starred.
  std::uniform_int_distribution<int> wordCount(1, 3);
  std::uniform_int_distribution<int> wordLen(0, 3);
  std::uniform_int_distribution<std::size_t> pick(0, symbols_.size() - 1);
  std::uniform_int_distribution<int> starred(0, 3);
  Dfa acc = dfa::emptyLanguage(symbols_);
  int n = wordCount(rng);
  for (int w = 0; w < n; ++w) {
    Dfa word = dfa::epsilonLanguage(symbols_);
    int len = wordLen(rng);
    for (int i = 0; i < len; ++i)
      word = dfa::concatOf(word, dfa::singleSymbol(symbols_, static_cast<std::uint32_t>(pick(rng))));
    acc = dfa::unionOf(acc, word);
  }
  if (starred(rng) == 0) acc = dfa::starOf(acc);
  return fromDfa(std::move(acc));
}

}  // namespace residuum
