#include "residuum/instances.hpp"

#include <algorithm>
#include <stdexcept>

namespace residuum {

namespace {
constexpr std::uint32_t U = FiniteQuantale::kUndef;
}

FiniteQuantale atomicityQuantale() {
  FiniteQuantale::Def def;
  def.id = "atomicity";
  def.elements = {"B", "L", "R", "A", "Top"};
  def.unit = 0;
  // Row is the left operand.  B is the unit; L/R are left/right movers, A
  // atomic, Top unclassifiable.
  def.seqTable = {
      0, 1, 2, 3, 4,   // B ; _
      1, 1, 4, 4, 4,   // L ; _
      2, 3, 2, 3, 4,   // R ; _
      3, 3, 4, 4, 4,   // A ; _
      4, 4, 4, 4, 4,   // Top ; _
  };
  // Lattice: B below L and R, those below A, A below Top.
  def.joinTable = {
      0, 1, 2, 3, 4,
      1, 1, 3, 3, 4,
      2, 3, 2, 3, 4,
      3, 3, 3, 3, 4,
      4, 4, 4, 4, 4,
  };
  def.commutativeSeq = false;
  def.atoms = {
      {"local", "B"},   {"acquire", "R"}, {"release", "L"},
      {"atomic", "A"},  {"compound", "Top"},
  };
  return FiniteQuantale(std::move(def));
}

FiniteQuantale reentrancyQuantale() {
  FiniteQuantale::Def def;
  def.id = "reentrancy";
  def.elements = {"locking", "unlocking", "critical", "entrant", "eps"};
  def.unit = 4;
  // locking/unlocking are halves of a critical section; critical runs
  // inside one, entrant outside.  Nesting combinations are undefined.
  def.seqTable = {
      U, 3, 0, U, 0,   // locking ; _
      2, U, U, 1, 1,   // unlocking ; _
      U, 1, 2, U, 2,   // critical ; _
      0, U, U, 3, 3,   // entrant ; _
      0, 1, 2, 3, 4,   // eps ; _
  };
  // Only eps-critical and eps-entrant are comparable (plus reflexivity).
  def.joinTable = {
      0, U, U, U, U,
      U, 1, U, U, U,
      U, U, 2, U, 2,
      U, U, U, 3, 3,
      U, U, 2, 3, 4,
  };
  def.commutativeSeq = false;
  def.atoms = {
      {"begin", "locking"},  {"end", "unlocking"}, {"inside", "critical"},
      {"outside", "entrant"}, {"skip", "eps"},
  };
  return FiniteQuantale(std::move(def));
}

FiniteQuantale pmonadQuantale(const std::vector<std::string>& states,
                              const std::string& systemId) {
  if (states.empty())
    throw std::invalid_argument("pmonad: empty state universe");
  FiniteQuantale::Def def;
  def.id = systemId;
  const std::uint32_t k = static_cast<std::uint32_t>(states.size());
  def.elements.push_back("I");
  for (std::uint32_t x = 0; x < k; ++x)
    for (std::uint32_t y = 0; y < k; ++y)
      def.elements.push_back("(" + states[x] + "," + states[y] + ")");
  const std::uint32_t n = 1 + k * k;
  def.unit = 0;
  auto pairIdx = [k](std::uint32_t x, std::uint32_t y) { return 1 + x * k + y; };
  auto post = [k](std::uint32_t e) { return (e - 1) % k; };
  auto pre = [k](std::uint32_t e) { return (e - 1) / k; };

  def.seqTable.assign(static_cast<std::size_t>(n) * n, U);
  def.joinTable.assign(static_cast<std::size_t>(n) * n, U);
  def.residTable.assign(static_cast<std::size_t>(n) * n, U);
  def.iterTable.assign(n, U);

  for (std::uint32_t e = 0; e < n; ++e) {
    def.seqTable[0 * n + e] = e;
    def.seqTable[e * n + 0] = e;
    def.joinTable[e * n + e] = e;
    def.residTable[0 * n + e] = e;  // unit residuation
  }
  // The polymorphic identity is absorbed by every per-state identity pair:
  // I |_| (x,x) = (x,x).  Joins of distinct pairs stay undefined, but this
  // one family is forced by distributivity, since I ; (x,x) and
  // (x,x) ; (x,x) are both (x,x).
  for (std::uint32_t x = 0; x < k; ++x) {
    std::uint32_t d = pairIdx(x, x);
    def.joinTable[0 * n + d] = d;
    def.joinTable[d * n + 0] = d;
  }
  def.iterTable[0] = 0;
  for (std::uint32_t a = 1; a < n; ++a) {
    for (std::uint32_t b = 1; b < n; ++b) {
      if (post(a) == pre(b))
        def.seqTable[a * n + b] = pairIdx(pre(a), post(b));
      // (x,y) \ (x,z) = (y,z); undefined when preconditions differ.
      if (pre(a) == pre(b))
        def.residTable[a * n + b] = pairIdx(post(a), post(b));
    }
  }
  def.commutativeSeq = false;
  for (std::uint32_t x = 0; x < k; ++x)
    for (std::uint32_t y = 0; y < k; ++y)
      def.atoms.push_back({states[x] + "_" + states[y],
                           def.elements[pairIdx(x, y)]});
  return FiniteQuantale(std::move(def));
}

MustSystem::MustSystem(std::vector<std::string> universe, std::string systemId)
    : id_(std::move(systemId)), universe_(std::move(universe)) {
  if (universe_.empty())
    throw std::invalid_argument("must: empty event universe");
  if (universe_.size() > 64)
    throw std::invalid_argument("must: universe larger than 64 events");
  std::sort(universe_.begin(), universe_.end());
  universe_.erase(std::unique(universe_.begin(), universe_.end()),
                  universe_.end());
}

Effect MustSystem::make(EventSet s) const { return Effect(id_, std::move(s)); }

Effect MustSystem::unit() const { return make({}); }

std::optional<Effect> MustSystem::seq(const Effect& a, const Effect& b) const {
  requireMine(a);
  requireMine(b);
  EventSet s = a.events();
  s.insert(b.events().begin(), b.events().end());
  return make(std::move(s));
}

std::optional<Effect> MustSystem::join(const Effect& a, const Effect& b) const {
  requireMine(a);
  requireMine(b);
  EventSet s;
  std::set_intersection(a.events().begin(), a.events().end(),
                        b.events().begin(), b.events().end(),
                        std::inserter(s, s.begin()));
  return make(std::move(s));
}

std::optional<Effect> MustSystem::iter(const Effect& a) const {
  requireMine(a);
  // Zero iterations guarantee nothing.
  return unit();
}

std::optional<Effect> MustSystem::residual(const Effect& sofar,
                                           const Effect& target) const {
  requireMine(sofar);
  requireMine(target);
  EventSet s;
  std::set_difference(target.events().begin(), target.events().end(),
                      sofar.events().begin(), sofar.events().end(),
                      std::inserter(s, s.begin()));
  return make(std::move(s));
}

std::string MustSystem::show(const Effect& e) const {
  requireMine(e);
  std::string out = "{";
  bool first = true;
  for (const std::string& ev : e.events()) {
    if (!first) out += ",";
    out += ev;
    first = false;
  }
  return out + "}";
}

std::optional<Effect> MustSystem::parseLiteral(const std::string& text) const {
  if (text == "I") return unit();
  auto known = [&](const std::string& ev) {
    return std::binary_search(universe_.begin(), universe_.end(), ev);
  };
  if (text.size() >= 2 && text.front() == '{' && text.back() == '}') {
    EventSet s;
    std::string body = text.substr(1, text.size() - 2);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t comma = body.find(',', pos);
      std::string ev = body.substr(pos, comma == std::string::npos
                                            ? std::string::npos
                                            : comma - pos);
      // Trim surrounding blanks.
      while (!ev.empty() && ev.front() == ' ') ev.erase(ev.begin());
      while (!ev.empty() && ev.back() == ' ') ev.pop_back();
      if (ev.empty() || !known(ev)) return std::nullopt;
      s.insert(ev);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return make(std::move(s));
  }
  if (known(text)) return make({text});
  return std::nullopt;
}

std::vector<std::string> MustSystem::atomLabels() const { return universe_; }

std::optional<Effect> MustSystem::atom(const std::string& label) const {
  if (std::binary_search(universe_.begin(), universe_.end(), label))
    return make({label});
  return std::nullopt;
}

std::optional<std::vector<Effect>> MustSystem::carrier() const {
  if (universe_.size() > 6) return std::nullopt;
  std::vector<Effect> all;
  const std::size_t count = std::size_t{1} << universe_.size();
  all.reserve(count);
  for (std::size_t bits = 0; bits < count; ++bits) {
    EventSet s;
    for (std::size_t i = 0; i < universe_.size(); ++i)
      if (bits & (std::size_t{1} << i)) s.insert(universe_[i]);
    all.push_back(make(std::move(s)));
  }
  return all;
}

Effect MustSystem::sample(std::uint64_t seed) const {
  EventSet s;
  for (std::size_t i = 0; i < universe_.size(); ++i)
    if (seed & (std::uint64_t{1} << (i % 64))) s.insert(universe_[i]);
  return make(std::move(s));
}

}  // namespace residuum
