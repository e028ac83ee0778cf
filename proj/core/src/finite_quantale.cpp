#include "residuum/finite_quantale.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace residuum {

namespace {

void requireTable(const std::vector<std::uint32_t>& t, std::size_t want,
                  const char* name) {
  if (t.size() != want)
    throw std::invalid_argument(std::string("finite quantale: ") + name +
                                " table has wrong size");
}

}  // namespace

FiniteQuantale::FiniteQuantale(Def def) : def_(std::move(def)) {
  const std::size_t n = def_.elements.size();
  if (n == 0) throw std::invalid_argument("finite quantale: empty carrier");
  if (def_.unit >= n) throw std::invalid_argument("finite quantale: bad unit index");
  requireTable(def_.seqTable, n * n, "seq");
  requireTable(def_.joinTable, n * n, "join");
  for (std::uint32_t cell : def_.seqTable)
    if (cell != kUndef && cell >= n)
      throw std::invalid_argument("finite quantale: seq cell out of range");
  for (std::uint32_t cell : def_.joinTable)
    if (cell != kUndef && cell >= n)
      throw std::invalid_argument("finite quantale: join cell out of range");

  if (def_.iterTable.empty()) {
    def_.iterTable.resize(n);
    for (std::uint32_t x = 0; x < n; ++x) def_.iterTable[x] = deriveIter(x);
  } else {
    requireTable(def_.iterTable, n, "iter");
  }
  if (def_.residTable.empty()) {
    def_.residTable.resize(n * n);
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        def_.residTable[a * n + b] = deriveResidual(a, b);
  } else {
    requireTable(def_.residTable, n * n, "residual");
  }
}

FiniteQuantale FiniteQuantale::commutativeLift(Def semilattice) {
  Def def = std::move(semilattice);
  const std::size_t n = def.elements.size();
  requireTable(def.joinTable, n * n, "join");
  for (std::uint32_t x = 0; x < n; ++x) {
    std::uint32_t j = def.joinTable[def.unit * n + x];
    if (j != x)
      throw std::invalid_argument(
          "commutative lift: unit '" + def.elements[def.unit] +
          "' is not a bottom element (join with '" + def.elements[x] +
          "' is not '" + def.elements[x] + "')");
  }
  def.seqTable = def.joinTable;
  def.commutativeSeq = true;
  def.iterTable.clear();
  def.residTable.clear();
  return FiniteQuantale(std::move(def));
}

std::uint32_t FiniteQuantale::seqIdx(std::uint32_t a, std::uint32_t b) const {
  return def_.seqTable[a * def_.elements.size() + b];
}
std::uint32_t FiniteQuantale::joinIdx(std::uint32_t a, std::uint32_t b) const {
  return def_.joinTable[a * def_.elements.size() + b];
}
std::uint32_t FiniteQuantale::iterIdx(std::uint32_t a) const {
  return def_.iterTable[a];
}
std::uint32_t FiniteQuantale::residIdx(std::uint32_t a, std::uint32_t b) const {
  return def_.residTable[a * def_.elements.size() + b];
}
bool FiniteQuantale::leIdx(std::uint32_t a, std::uint32_t b) const {
  return joinIdx(a, b) == b;
}

std::uint32_t FiniteQuantale::deriveIter(std::uint32_t x) const {
  const std::uint32_t n = static_cast<std::uint32_t>(def_.elements.size());
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t y = 0; y < n; ++y) {
    if (!leIdx(def_.unit, y) || !leIdx(x, y)) continue;
    std::uint32_t yy = seqIdx(y, y);
    if (yy == kUndef || !leIdx(yy, y)) continue;
    candidates.push_back(y);
  }
  for (std::uint32_t y : candidates) {
    bool least = true;
    for (std::uint32_t z : candidates)
      if (!leIdx(y, z)) { least = false; break; }
    if (least) return y;
  }
  return kUndef;
}

std::uint32_t FiniteQuantale::deriveResidual(std::uint32_t sofar,
                                             std::uint32_t target) const {
  const std::uint32_t n = static_cast<std::uint32_t>(def_.elements.size());
  std::vector<std::uint32_t> s;
  for (std::uint32_t r = 0; r < n; ++r) {
    std::uint32_t sr = seqIdx(sofar, r);
    if (sr != kUndef && leIdx(sr, target)) s.push_back(r);
  }
  if (s.empty()) return kUndef;
  std::uint32_t fold = s[0];
  bool foldOk = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    fold = joinIdx(fold, s[i]);
    if (fold == kUndef) { foldOk = false; break; }
  }
  if (foldOk) return fold;
  // No join of S: fall back to a maximal element, lowest index first so the
  // pick is deterministic.
  for (std::uint32_t r : s) {
    bool maximal = true;
    for (std::uint32_t q : s)
      if (q != r && leIdx(r, q)) { maximal = false; break; }
    if (maximal) return r;
  }
  return s[0];  // unreachable: a finite nonempty poset has maximal elements
}

Effect FiniteQuantale::make(std::uint32_t idx) const {
  return Effect(def_.id, idx);
}

Effect FiniteQuantale::unit() const { return make(def_.unit); }

std::optional<Effect> FiniteQuantale::seq(const Effect& a, const Effect& b) const {
  requireMine(a);
  requireMine(b);
  std::uint32_t r = seqIdx(a.index(), b.index());
  if (r == kUndef) return std::nullopt;
  return make(r);
}

std::optional<Effect> FiniteQuantale::join(const Effect& a, const Effect& b) const {
  requireMine(a);
  requireMine(b);
  std::uint32_t r = joinIdx(a.index(), b.index());
  if (r == kUndef) return std::nullopt;
  return make(r);
}

std::optional<Effect> FiniteQuantale::iter(const Effect& a) const {
  requireMine(a);
  std::uint32_t r = iterIdx(a.index());
  if (r == kUndef) return std::nullopt;
  return make(r);
}

std::optional<Effect> FiniteQuantale::residual(const Effect& sofar,
                                               const Effect& target) const {
  requireMine(sofar);
  requireMine(target);
  std::uint32_t r = residIdx(sofar.index(), target.index());
  if (r == kUndef) return std::nullopt;
  return make(r);
}

std::string FiniteQuantale::show(const Effect& e) const {
  requireMine(e);
  return def_.elements[e.index()];
}

std::optional<Effect> FiniteQuantale::parseLiteral(const std::string& text) const {
  if (text == "I") return unit();
  for (std::uint32_t i = 0; i < def_.elements.size(); ++i)
    if (def_.elements[i] == text) return make(i);
  return std::nullopt;
}

std::vector<std::string> FiniteQuantale::atomLabels() const {
  std::vector<std::string> out;
  out.reserve(def_.atoms.size());
  for (const auto& [label, elem] : def_.atoms) out.push_back(label);
  return out;
}

std::optional<Effect> FiniteQuantale::atom(const std::string& label) const {
  for (const auto& [l, elem] : def_.atoms) {
    if (l != label) continue;
    for (std::uint32_t i = 0; i < def_.elements.size(); ++i)
      if (def_.elements[i] == elem) return make(i);
  }
  return std::nullopt;
}

std::optional<std::vector<Effect>> FiniteQuantale::carrier() const {
  std::vector<Effect> all;
  all.reserve(def_.elements.size());
  for (std::uint32_t i = 0; i < def_.elements.size(); ++i) all.push_back(make(i));
  return all;
}

Effect FiniteQuantale::sample(std::uint64_t seed) const {
  return make(static_cast<std::uint32_t>(seed % def_.elements.size()));
}

namespace {

std::uint32_t elementIndex(const std::vector<std::string>& elements,
                           const std::string& name, const std::string& where) {
  for (std::uint32_t i = 0; i < elements.size(); ++i)
    if (elements[i] == name) return i;
  throw std::invalid_argument("custom quantale: unknown element '" + name +
                              "' in " + where);
}

std::vector<std::uint32_t> loadBinaryTable(const nlohmann::json& obj,
                                           const std::vector<std::string>& elements,
                                           const std::string& where) {
  const std::size_t n = elements.size();
  std::vector<std::uint32_t> table(n * n, FiniteQuantale::kUndef);
  for (const auto& [rowName, row] : obj.items()) {
    std::uint32_t a = elementIndex(elements, rowName, where);
    for (const auto& [colName, cell] : row.items()) {
      std::uint32_t b = elementIndex(elements, colName, where);
      if (cell.is_null()) continue;
      table[a * n + b] =
          elementIndex(elements, cell.get<std::string>(), where);
    }
  }
  return table;
}

}  // namespace

FiniteQuantale FiniteQuantale::fromJsonFile(const std::string& path,
                                            const std::string& systemId) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("custom quantale: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("custom quantale: " + path + ": " + e.what());
  }

  Def def;
  def.id = systemId;
  def.elements = j.at("elements").get<std::vector<std::string>>();
  def.unit = elementIndex(def.elements, j.at("unit").get<std::string>(), "unit");
  def.seqTable = loadBinaryTable(j.at("seq"), def.elements, "seq");
  def.joinTable = loadBinaryTable(j.at("join"), def.elements, "join");
  if (j.contains("iter") && !j.at("iter").is_null()) {
    const std::size_t n = def.elements.size();
    def.iterTable.assign(n, kUndef);
    for (const auto& [name, cell] : j.at("iter").items()) {
      std::uint32_t x = elementIndex(def.elements, name, "iter");
      if (!cell.is_null())
        def.iterTable[x] = elementIndex(def.elements, cell.get<std::string>(), "iter");
    }
  }
  if (j.contains("residual") && !j.at("residual").is_null())
    def.residTable = loadBinaryTable(j.at("residual"), def.elements, "residual");
  def.commutativeSeq = j.value("commutative", false);
  if (j.contains("atoms")) {
    for (const auto& [label, elem] : j.at("atoms").items()) {
      std::string elemName = elem.get<std::string>();
      elementIndex(def.elements, elemName, "atoms");
      def.atoms.push_back({label, elemName});
    }
  }
  return FiniteQuantale(std::move(def));
}

}  // namespace residuum
