#include "residuum/dfa.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

namespace residuum {

bool Dfa::accepts(const std::vector<std::uint32_t>& word) const {
  std::uint32_t s = start;
  for (std::uint32_t sym : word) s = step(s, sym);
  return accepting[s];
}

bool Dfa::isEmpty() const {
  std::vector<bool> seen(stateCount, false);
  std::queue<std::uint32_t> work;
  work.push(start);
  seen[start] = true;
  while (!work.empty()) {
    std::uint32_t s = work.front();
    work.pop();
    if (accepting[s]) return false;
    for (std::size_t a = 0; a < alphabet.size(); ++a) {
      std::uint32_t t = step(s, static_cast<std::uint32_t>(a));
      if (!seen[t]) {
        seen[t] = true;
        work.push(t);
      }
    }
  }
  return true;
}

namespace dfa {
namespace {

void checkBudget(std::size_t states) {
  if (states > StateBudgetExceeded::kMaxStates)
    throw StateBudgetExceeded(states);
}

void requireSameAlphabet(const Dfa& a, const Dfa& b) {
  if (a.alphabet != b.alphabet)
    throw std::logic_error("DFA operation across different alphabets");
}

// Nondeterministic automaton with epsilon moves, used as scaffolding for
// concatenation, star and regex construction.  One accept state set.
struct Nfa {
  std::size_t alphabetSize = 0;
  std::uint32_t stateCount = 0;
  std::uint32_t start = 0;
  std::vector<bool> accepting;
  // edges[s] = list of (symbol, target); epsilon[s] = list of targets.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edges;
  std::vector<std::vector<std::uint32_t>> epsilon;

  std::uint32_t addState() {
    accepting.push_back(false);
    edges.emplace_back();
    epsilon.emplace_back();
    return stateCount++;
  }
  void addEdge(std::uint32_t from, std::uint32_t sym, std::uint32_t to) {
    edges[from].push_back({sym, to});
  }
  void addEps(std::uint32_t from, std::uint32_t to) {
    epsilon[from].push_back(to);
  }
};

Nfa fromDfa(const Dfa& d) {
  Nfa n;
  n.alphabetSize = d.alphabet.size();
  for (std::uint32_t s = 0; s < d.stateCount; ++s) n.addState();
  n.start = d.start;
  for (std::uint32_t s = 0; s < d.stateCount; ++s) {
    n.accepting[s] = d.accepting[s];
    for (std::size_t a = 0; a < d.alphabet.size(); ++a)
      n.addEdge(s, static_cast<std::uint32_t>(a),
                d.step(s, static_cast<std::uint32_t>(a)));
  }
  return n;
}

void closeOverEpsilon(const Nfa& n, std::vector<std::uint32_t>& states) {
  std::vector<bool> in(n.stateCount, false);
  for (std::uint32_t s : states) in[s] = true;
  std::queue<std::uint32_t> work;
  for (std::uint32_t s : states) work.push(s);
  while (!work.empty()) {
    std::uint32_t s = work.front();
    work.pop();
    for (std::uint32_t t : n.epsilon[s]) {
      if (!in[t]) {
        in[t] = true;
        states.push_back(t);
        work.push(t);
      }
    }
  }
  std::sort(states.begin(), states.end());
}

// Subset construction.  The empty subset acts as the (complete) dead state,
// so the result is total even when the NFA is not.
Dfa determinize(const Nfa& n, std::vector<std::string> alphabet) {
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> subsets;
  auto intern = [&](std::vector<std::uint32_t> subset) {
    auto [it, fresh] = ids.try_emplace(subset, static_cast<std::uint32_t>(subsets.size()));
    if (fresh) {
      subsets.push_back(std::move(subset));
      checkBudget(subsets.size());
    }
    return it->second;
  };

  std::vector<std::uint32_t> initial = {n.start};
  closeOverEpsilon(n, initial);
  intern(std::move(initial));

  Dfa out;
  out.alphabet = std::move(alphabet);
  out.start = 0;
  const std::size_t k = out.alphabet.size();
  for (std::uint32_t cur = 0; cur < subsets.size(); ++cur) {
    for (std::size_t a = 0; a < k; ++a) {
      std::vector<std::uint32_t> tgt;
      for (std::uint32_t s : subsets[cur]) {
        for (auto [sym, to] : n.edges[s])
          if (sym == a) tgt.push_back(to);
      }
      std::sort(tgt.begin(), tgt.end());
      tgt.erase(std::unique(tgt.begin(), tgt.end()), tgt.end());
      closeOverEpsilon(n, tgt);
      out.next.push_back(intern(std::move(tgt)));
    }
  }
  out.stateCount = static_cast<std::uint32_t>(subsets.size());
  out.accepting.assign(out.stateCount, false);
  for (std::uint32_t s = 0; s < out.stateCount; ++s)
    for (std::uint32_t q : subsets[s])
      if (n.accepting[q]) out.accepting[s] = true;
  return canonicalize(out);
}

}  // namespace

Dfa canonicalize(const Dfa& d) {
  const std::size_t k = d.alphabet.size();

  // Trim to reachable states.
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> remap(d.stateCount, UINT32_MAX);
  order.push_back(d.start);
  remap[d.start] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      std::uint32_t t = d.step(order[i], static_cast<std::uint32_t>(a));
      if (remap[t] == UINT32_MAX) {
        remap[t] = static_cast<std::uint32_t>(order.size());
        order.push_back(t);
      }
    }
  }
  const std::uint32_t n = static_cast<std::uint32_t>(order.size());

  // Moore partition refinement on the reachable part.
  std::vector<std::uint32_t> cls(n);
  for (std::uint32_t s = 0; s < n; ++s) cls[s] = d.accepting[order[s]] ? 1 : 0;
  std::uint32_t classCount = 2;
  for (;;) {
    std::map<std::vector<std::uint32_t>, std::uint32_t> sig;
    std::vector<std::uint32_t> nextCls(n);
    for (std::uint32_t s = 0; s < n; ++s) {
      std::vector<std::uint32_t> key;
      key.reserve(k + 1);
      key.push_back(cls[s]);
      for (std::size_t a = 0; a < k; ++a)
        key.push_back(cls[remap[d.step(order[s], static_cast<std::uint32_t>(a))]]);
      auto [it, fresh] = sig.try_emplace(std::move(key), static_cast<std::uint32_t>(sig.size()));
      (void)fresh;
      nextCls[s] = it->second;
    }
    std::uint32_t newCount = static_cast<std::uint32_t>(sig.size());
    bool stable = (newCount == classCount);
    cls.swap(nextCls);
    classCount = newCount;
    if (stable) break;
  }

  // Quotient automaton, then BFS renumber so numbering is canonical.
  std::vector<std::uint32_t> rep(classCount, UINT32_MAX);
  for (std::uint32_t s = 0; s < n; ++s)
    if (rep[cls[s]] == UINT32_MAX) rep[cls[s]] = s;

  std::vector<std::uint32_t> bfsId(classCount, UINT32_MAX);
  std::vector<std::uint32_t> bfsOrder;
  bfsId[cls[0]] = 0;
  bfsOrder.push_back(cls[0]);
  for (std::size_t i = 0; i < bfsOrder.size(); ++i) {
    std::uint32_t s = rep[bfsOrder[i]];
    for (std::size_t a = 0; a < k; ++a) {
      std::uint32_t tc = cls[remap[d.step(order[s], static_cast<std::uint32_t>(a))]];
      if (bfsId[tc] == UINT32_MAX) {
        bfsId[tc] = static_cast<std::uint32_t>(bfsOrder.size());
        bfsOrder.push_back(tc);
      }
    }
  }

  Dfa out;
  out.alphabet = d.alphabet;
  out.start = 0;
  out.stateCount = static_cast<std::uint32_t>(bfsOrder.size());
  out.next.resize(static_cast<std::size_t>(out.stateCount) * k);
  out.accepting.assign(out.stateCount, false);
  for (std::uint32_t c = 0; c < out.stateCount; ++c) {
    std::uint32_t s = rep[bfsOrder[c]];
    out.accepting[c] = d.accepting[order[s]];
    for (std::size_t a = 0; a < k; ++a) {
      std::uint32_t tc = cls[remap[d.step(order[s], static_cast<std::uint32_t>(a))]];
      out.next[static_cast<std::size_t>(c) * k + a] = bfsId[tc];
    }
  }
  return out;
}

Dfa emptyLanguage(std::vector<std::string> alphabet) {
  Dfa d;
  d.alphabet = std::move(alphabet);
  d.start = 0;
  d.stateCount = 1;
  d.next.assign(d.alphabet.size(), 0);
  d.accepting = {false};
  return d;
}

Dfa epsilonLanguage(std::vector<std::string> alphabet) {
  Dfa d;
  d.alphabet = std::move(alphabet);
  const std::size_t k = d.alphabet.size();
  d.start = 0;
  d.stateCount = 2;
  d.next.assign(2 * k, 1);
  d.accepting = {true, false};
  if (k == 0) {
    d.stateCount = 1;
    d.next.clear();
    d.accepting = {true};
  }
  return d;
}

Dfa singleSymbol(std::vector<std::string> alphabet, std::uint32_t sym) {
  const std::size_t k = alphabet.size();
  Dfa d;
  d.alphabet = std::move(alphabet);
  d.start = 0;
  d.stateCount = 3;  // start, accept, dead
  d.next.assign(3 * k, 2);
  d.next[sym] = 1;
  d.accepting = {false, true, false};
  return canonicalize(d);
}

Dfa sigmaStar(std::vector<std::string> alphabet) {
  Dfa d;
  d.alphabet = std::move(alphabet);
  d.start = 0;
  d.stateCount = 1;
  d.next.assign(d.alphabet.size(), 0);
  d.accepting = {true};
  return d;
}

namespace {

enum class ProductOp { Union, Intersection, Difference };

Dfa product(const Dfa& a, const Dfa& b, ProductOp op) {
  requireSameAlphabet(a, b);
  const std::size_t k = a.alphabet.size();
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  auto intern = [&](std::uint32_t x, std::uint32_t y) {
    auto [it, fresh] = ids.try_emplace({x, y}, static_cast<std::uint32_t>(pairs.size()));
    if (fresh) {
      pairs.push_back({x, y});
      checkBudget(pairs.size());
    }
    return it->second;
  };
  intern(a.start, b.start);
  Dfa out;
  out.alphabet = a.alphabet;
  out.start = 0;
  for (std::uint32_t cur = 0; cur < pairs.size(); ++cur) {
    auto [x, y] = pairs[cur];
    for (std::size_t sym = 0; sym < k; ++sym)
      out.next.push_back(intern(a.step(x, static_cast<std::uint32_t>(sym)),
                                b.step(y, static_cast<std::uint32_t>(sym))));
  }
  out.stateCount = static_cast<std::uint32_t>(pairs.size());
  out.accepting.resize(out.stateCount);
  for (std::uint32_t s = 0; s < out.stateCount; ++s) {
    bool fa = a.accepting[pairs[s].first];
    bool fb = b.accepting[pairs[s].second];
    switch (op) {
      case ProductOp::Union: out.accepting[s] = fa || fb; break;
      case ProductOp::Intersection: out.accepting[s] = fa && fb; break;
      case ProductOp::Difference: out.accepting[s] = fa && !fb; break;
    }
  }
  return canonicalize(out);
}

}  // namespace

Dfa unionOf(const Dfa& a, const Dfa& b) { return product(a, b, ProductOp::Union); }
Dfa intersectionOf(const Dfa& a, const Dfa& b) { return product(a, b, ProductOp::Intersection); }
Dfa differenceOf(const Dfa& a, const Dfa& b) { return product(a, b, ProductOp::Difference); }

Dfa complementOf(const Dfa& a) {
  Dfa out = a;
  for (std::size_t s = 0; s < out.accepting.size(); ++s)
    out.accepting[s] = !out.accepting[s];
  return canonicalize(out);
}

bool subsetOf(const Dfa& a, const Dfa& b) {
  return differenceOf(a, b).isEmpty();
}

Dfa concatOf(const Dfa& a, const Dfa& b) {
  requireSameAlphabet(a, b);
  Nfa n = fromDfa(a);
  std::uint32_t offset = n.stateCount;
  for (std::uint32_t s = 0; s < b.stateCount; ++s) n.addState();
  for (std::uint32_t s = 0; s < b.stateCount; ++s) {
    n.accepting[offset + s] = b.accepting[s];
    for (std::size_t sym = 0; sym < b.alphabet.size(); ++sym)
      n.addEdge(offset + s, static_cast<std::uint32_t>(sym),
                offset + b.step(s, static_cast<std::uint32_t>(sym)));
  }
  for (std::uint32_t s = 0; s < a.stateCount; ++s) {
    if (a.accepting[s]) {
      n.addEps(s, offset + b.start);
      n.accepting[s] = false;
    }
  }
  return determinize(n, a.alphabet);
}

Dfa starOf(const Dfa& a) {
  Nfa n = fromDfa(a);
  std::uint32_t hub = n.addState();
  n.accepting[hub] = true;
  n.addEps(hub, n.start);
  for (std::uint32_t s = 0; s + 1 < n.stateCount; ++s)
    if (n.accepting[s]) n.addEps(s, hub);
  n.start = hub;
  return determinize(n, a.alphabet);
}

namespace {

// B-states reachable from B's start by some word of A, via the pair graph.
std::vector<std::uint32_t> imageStates(const Dfa& a, const Dfa& b) {
  requireSameAlphabet(a, b);
  const std::size_t k = a.alphabet.size();
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  std::queue<std::pair<std::uint32_t, std::uint32_t>> work;
  seen.insert({a.start, b.start});
  work.push({a.start, b.start});
  std::set<std::uint32_t> image;
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop();
    if (a.accepting[x]) image.insert(y);
    for (std::size_t sym = 0; sym < k; ++sym) {
      std::pair<std::uint32_t, std::uint32_t> nx = {
          a.step(x, static_cast<std::uint32_t>(sym)),
          b.step(y, static_cast<std::uint32_t>(sym))};
      if (seen.insert(nx).second) work.push(nx);
    }
  }
  return {image.begin(), image.end()};
}

}  // namespace

Dfa leftQuotient(const Dfa& a, const Dfa& b) {
  std::vector<std::uint32_t> starts = imageStates(a, b);
  Nfa n = fromDfa(b);
  std::uint32_t hub = n.addState();
  for (std::uint32_t s : starts) n.addEps(hub, s);
  n.start = hub;
  return determinize(n, b.alphabet);
}

Dfa universalResidual(const Dfa& a, const Dfa& b) {
  std::vector<std::uint32_t> image = imageStates(a, b);
  if (image.empty()) return sigmaStar(b.alphabet);

  // Track the image of the initial set under the word read so far; accept
  // when every tracked B-state accepts.
  const std::size_t k = b.alphabet.size();
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> sets;
  auto intern = [&](std::vector<std::uint32_t> v) {
    auto [it, fresh] = ids.try_emplace(v, static_cast<std::uint32_t>(sets.size()));
    if (fresh) {
      sets.push_back(std::move(v));
      checkBudget(sets.size());
    }
    return it->second;
  };
  intern(std::move(image));
  Dfa out;
  out.alphabet = b.alphabet;
  out.start = 0;
  for (std::uint32_t cur = 0; cur < sets.size(); ++cur) {
    for (std::size_t sym = 0; sym < k; ++sym) {
      std::vector<std::uint32_t> tgt;
      tgt.reserve(sets[cur].size());
      for (std::uint32_t s : sets[cur])
        tgt.push_back(b.step(s, static_cast<std::uint32_t>(sym)));
      std::sort(tgt.begin(), tgt.end());
      tgt.erase(std::unique(tgt.begin(), tgt.end()), tgt.end());
      out.next.push_back(intern(std::move(tgt)));
    }
  }
  out.stateCount = static_cast<std::uint32_t>(sets.size());
  out.accepting.resize(out.stateCount);
  for (std::uint32_t s = 0; s < out.stateCount; ++s) {
    bool all = true;
    for (std::uint32_t q : sets[s])
      if (!b.accepting[q]) { all = false; break; }
    out.accepting[s] = all;
  }
  return canonicalize(out);
}

namespace {

// Recursive-descent regex parser building NFA fragments with a single
// entry and a single exit state.
struct RegexParser {
  const std::string& pat;
  std::size_t pos = 0;
  Nfa& nfa;
  const std::map<char, std::uint32_t>& symOf;

  struct Frag {
    std::uint32_t in, out;
  };

  bool atEnd() const { return pos >= pat.size(); }
  char peek() const { return pat[pos]; }

  Frag parseAlt() {
    Frag lhs = parseCat();
    while (!atEnd() && peek() == '|') {
      ++pos;
      Frag rhs = parseCat();
      std::uint32_t in = nfa.addState();
      std::uint32_t out = nfa.addState();
      nfa.addEps(in, lhs.in);
      nfa.addEps(in, rhs.in);
      nfa.addEps(lhs.out, out);
      nfa.addEps(rhs.out, out);
      lhs = {in, out};
    }
    return lhs;
  }

  Frag parseCat() {
    std::optional<Frag> acc;
    while (!atEnd() && peek() != '|' && peek() != ')') {
      Frag f = parseRep();
      if (acc) {
        nfa.addEps(acc->out, f.in);
        acc = Frag{acc->in, f.out};
      } else {
        acc = f;
      }
    }
    if (!acc) {
      std::uint32_t s = nfa.addState();
      return {s, s};
    }
    return *acc;
  }

  Frag parseRep() {
    Frag f = parseAtom();
    while (!atEnd() && (peek() == '*' || peek() == '+' || peek() == '?')) {
      char op = pat[pos++];
      std::uint32_t in = nfa.addState();
      std::uint32_t out = nfa.addState();
      nfa.addEps(in, f.in);
      nfa.addEps(f.out, out);
      if (op == '*' || op == '?') nfa.addEps(in, out);
      if (op == '*' || op == '+') nfa.addEps(f.out, f.in);
      f = {in, out};
    }
    return f;
  }

  Frag parseAtom() {
    if (atEnd()) throw std::invalid_argument("regex: unexpected end of pattern");
    char c = pat[pos];
    if (c == '(') {
      ++pos;
      Frag f = parseAlt();
      if (atEnd() || pat[pos] != ')')
        throw std::invalid_argument("regex: missing ')'");
      ++pos;
      return f;
    }
    if (c == ')' || c == '|' || c == '*' || c == '+' || c == '?')
      throw std::invalid_argument(std::string("regex: unexpected '") + c + "'");
    ++pos;
    auto it = symOf.find(c);
    if (it == symOf.end())
      throw std::invalid_argument(std::string("regex: symbol '") + c +
                                  "' is not in the alphabet");
    std::uint32_t in = nfa.addState();
    std::uint32_t out = nfa.addState();
    nfa.addEdge(in, it->second, out);
    return {in, out};
  }
};

}  // namespace

Dfa fromRegex(std::vector<std::string> alphabet, const std::string& pattern) {
  std::map<char, std::uint32_t> symOf;
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    if (alphabet[i].size() != 1)
      throw std::invalid_argument("regex alphabet needs single-character symbols");
    symOf[alphabet[i][0]] = static_cast<std::uint32_t>(i);
  }
  Nfa n;
  n.alphabetSize = alphabet.size();
  RegexParser p{pattern, 0, n, symOf};
  RegexParser::Frag f = p.parseAlt();
  if (!p.atEnd())
    throw std::invalid_argument("regex: trailing input at position " +
                                std::to_string(p.pos));
  n.start = f.in;
  n.accepting[f.out] = true;
  return determinize(n, std::move(alphabet));
}

bool isFiniteLanguage(const Dfa& d) {
  const std::size_t k = d.alphabet.size();
  // Useful states: reachable from start and co-reachable to acceptance.
  std::vector<bool> reach(d.stateCount, false);
  std::queue<std::uint32_t> work;
  reach[d.start] = true;
  work.push(d.start);
  while (!work.empty()) {
    std::uint32_t s = work.front();
    work.pop();
    for (std::size_t a = 0; a < k; ++a) {
      std::uint32_t t = d.step(s, static_cast<std::uint32_t>(a));
      if (!reach[t]) {
        reach[t] = true;
        work.push(t);
      }
    }
  }
  std::vector<std::vector<std::uint32_t>> rev(d.stateCount);
  for (std::uint32_t s = 0; s < d.stateCount; ++s)
    for (std::size_t a = 0; a < k; ++a)
      rev[d.step(s, static_cast<std::uint32_t>(a))].push_back(s);
  std::vector<bool> co(d.stateCount, false);
  for (std::uint32_t s = 0; s < d.stateCount; ++s)
    if (d.accepting[s] && !co[s]) {
      co[s] = true;
      work.push(s);
    }
  while (!work.empty()) {
    std::uint32_t s = work.front();
    work.pop();
    for (std::uint32_t p : rev[s])
      if (!co[p]) {
        co[p] = true;
        work.push(p);
      }
  }
  // Iterative DFS over useful states looking for a back edge.
  std::vector<int> color(d.stateCount, 0);  // 0 white, 1 on stack, 2 done
  for (std::uint32_t root = 0; root < d.stateCount; ++root) {
    if (!(reach[root] && co[root]) || color[root] != 0) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& frame = stack.back();
      if (frame.second < k) {
        std::uint32_t t =
            d.step(frame.first, static_cast<std::uint32_t>(frame.second++));
        if (!(reach[t] && co[t])) continue;
        if (color[t] == 1) return false;  // cycle among useful states
        if (color[t] == 0) {
          color[t] = 1;
          stack.push_back({t, 0});
        }
      } else {
        color[frame.first] = 2;
        stack.pop_back();
      }
    }
  }
  return true;
}

std::vector<std::string> acceptedWords(const Dfa& d, std::size_t maxLen,
                                       std::size_t maxCount,
                                       const std::string& sep) {
  std::vector<std::string> out;
  const std::size_t k = d.alphabet.size();
  // (state, rendered word) pairs for the current length, extended in symbol
  // order so the output is shortlex.
  std::vector<std::pair<std::uint32_t, std::string>> layer = {{d.start, ""}};
  if (d.accepting[d.start]) out.push_back("");
  for (std::size_t len = 1; len <= maxLen && out.size() < maxCount; ++len) {
    std::vector<std::pair<std::uint32_t, std::string>> next;
    next.reserve(layer.size() * k);
    for (const auto& [s, w] : layer) {
      for (std::size_t a = 0; a < k; ++a) {
        std::uint32_t t = d.step(s, static_cast<std::uint32_t>(a));
        std::string word = w.empty() ? d.alphabet[a] : w + sep + d.alphabet[a];
        if (d.accepting[t] && out.size() < maxCount) out.push_back(word);
        next.push_back({t, std::move(word)});
      }
    }
    layer.swap(next);
  }
  return out;
}

}  // namespace dfa
}  // namespace residuum
