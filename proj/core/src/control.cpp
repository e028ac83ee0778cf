#include "residuum/control.hpp"

#include <algorithm>

namespace residuum {

std::string ControlTag::display() const {
  switch (kind) {
    case Kind::Exception: return name;
    case Kind::Break: return name.empty() ? "break" : "break " + name;
    case Kind::Return: return "return";
  }
  return "?";
}

bool TagPoset::declare(const std::string& name,
                       const std::optional<std::string>& parent) {
  if (parent_.count(name)) return false;
  if (parent && !parent_.count(*parent)) return false;
  parent_.emplace(name, parent);
  return true;
}

bool TagPoset::declared(const std::string& name) const {
  return parent_.count(name) != 0;
}

bool TagPoset::leq(const ControlTag& t, const ControlTag& u) const {
  if (t == u) return true;
  if (t.kind != ControlTag::Kind::Exception ||
      u.kind != ControlTag::Kind::Exception)
    return false;
  std::string cur = t.name;
  while (true) {
    auto it = parent_.find(cur);
    if (it == parent_.end() || !it->second) return false;
    cur = *it->second;
    if (cur == u.name) return true;
  }
}

std::optional<std::vector<std::pair<ControlTag, Effect>>>
ControlAlgebra::mergeEntries(
    const std::vector<std::pair<ControlTag, Effect>>& a,
    const std::vector<std::pair<ControlTag, Effect>>& b) const {
  std::vector<std::pair<ControlTag, Effect>> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      std::optional<Effect> m = base_->join(a[i].second, b[j].second);
      if (!m) return std::nullopt;
      out.push_back({a[i].first, std::move(*m)});
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<ControlEffect> ControlAlgebra::seq(const ControlEffect& a,
                                                 const ControlEffect& b) const {
  if (!a.underlying) return a;  // everything after an escape is unreachable
  const Effect& chi = *a.underlying;

  std::optional<Effect> u;
  if (b.underlying) {
    u = base_->seq(chi, *b.underlying);
    if (!u) return std::nullopt;
  }
  std::vector<std::pair<ControlTag, Effect>> shifted;
  shifted.reserve(b.entries.size());
  for (const auto& [tag, p] : b.entries) {
    std::optional<Effect> q = base_->seq(chi, p);
    if (!q) return std::nullopt;
    shifted.push_back({tag, std::move(*q)});
  }
  auto merged = mergeEntries(a.entries, shifted);
  if (!merged) return std::nullopt;
  return ControlEffect{std::move(u), std::move(*merged)};
}

std::optional<ControlEffect> ControlAlgebra::join(const ControlEffect& a,
                                                  const ControlEffect& b) const {
  std::optional<Effect> u;
  if (a.underlying && b.underlying) {
    u = base_->join(*a.underlying, *b.underlying);
    if (!u) return std::nullopt;
  } else if (a.underlying) {
    u = a.underlying;
  } else if (b.underlying) {
    u = b.underlying;
  }
  auto merged = mergeEntries(a.entries, b.entries);
  if (!merged) return std::nullopt;
  return ControlEffect{std::move(u), std::move(*merged)};
}

std::optional<ControlEffect> ControlAlgebra::iter(const ControlEffect& a) const {
  if (!a.underlying) {
    // Zero iterations are possible, so the normal path reappears; escapes
    // keep their prefixes.
    return ControlEffect{base_->unit(), a.entries};
  }
  std::optional<Effect> star = base_->iter(*a.underlying);
  if (!star) return std::nullopt;
  std::vector<std::pair<ControlTag, Effect>> entries;
  entries.reserve(a.entries.size());
  for (const auto& [tag, p] : a.entries) {
    // An escape on iteration n happens after n-1 whole passes.
    std::optional<Effect> q = base_->seq(*star, p);
    if (!q) return std::nullopt;
    entries.push_back({tag, std::move(*q)});
  }
  return ControlEffect{std::move(star), std::move(entries)};
}

std::optional<ControlEffect> ControlAlgebra::residual(
    const ControlEffect& sofar, const ControlEffect& target,
    const std::vector<ControlTag>* ignore) const {
  // Every escape already accumulated must fit some target escape budget,
  // unless an enclosing construct accounts for it.
  for (const auto& [tag, p] : sofar.entries) {
    bool covered = false;
    if (ignore) {
      for (const ControlTag& ig : *ignore)
        if (poset_.leq(tag, ig)) { covered = true; break; }
    }
    if (covered) continue;
    bool bounded = false;
    for (const auto& [ttag, tp] : target.entries) {
      if (poset_.leq(tag, ttag) && base_->le(p, tp)) {
        bounded = true;
        break;
      }
    }
    if (!bounded) return std::nullopt;
  }

  // A prefix with no normal continuation consumes none of the budget.
  if (!sofar.underlying) return target;
  const Effect& chi = *sofar.underlying;

  std::optional<Effect> u;
  if (target.underlying) u = base_->residual(chi, *target.underlying);
  std::vector<std::pair<ControlTag, Effect>> entries;
  for (const auto& [tag, p] : target.entries) {
    std::optional<Effect> r = base_->residual(chi, p);
    if (r) entries.push_back({tag, std::move(*r)});
  }
  if (!u && entries.empty()) return std::nullopt;
  return ControlEffect{std::move(u), std::move(entries)};
}

bool ControlAlgebra::le(const ControlEffect& a, const ControlEffect& b) const {
  std::optional<ControlEffect> j = join(a, b);
  return j.has_value() && *j == b;
}

std::optional<ControlEffect> ControlAlgebra::normalize(
    const ControlEffect& c,
    std::pair<ControlTag, ControlTag>* conflict) const {
  ControlEffect out{c.underlying, {}};
  out.entries.reserve(c.entries.size());
  for (const auto& [tag, p] : c.entries) {
    Effect acc = p;
    for (const auto& [sub, q] : c.entries) {
      if (sub == tag || !poset_.leq(sub, tag)) continue;
      std::optional<Effect> j = base_->join(acc, q);
      if (!j) {
        if (conflict) *conflict = {sub, tag};
        return std::nullopt;
      }
      acc = std::move(*j);
    }
    out.entries.push_back({tag, std::move(acc)});
  }
  return out;
}

std::optional<ControlEffect> ControlAlgebra::handle(
    const ControlEffect& body,
    const std::vector<std::pair<ControlTag, ControlEffect>>& clauses) const {
  std::vector<std::pair<ControlTag, Effect>> kept;
  std::vector<ControlEffect> pieces;
  for (const auto& [tag, p] : body.entries) {
    const ControlEffect* handler = nullptr;
    for (const auto& [ctag, h] : clauses) {
      if (poset_.leq(tag, ctag)) {
        handler = &h;
        break;
      }
    }
    if (!handler) {
      kept.push_back({tag, p});
      continue;
    }
    // The caught path runs the prefix, then the handler.
    std::optional<ControlEffect> piece = seq(lift(p), *handler);
    if (!piece) return std::nullopt;
    pieces.push_back(std::move(*piece));
  }

  std::optional<ControlEffect> acc;
  if (body.underlying || !kept.empty())
    acc = ControlEffect{body.underlying, std::move(kept)};
  for (const ControlEffect& piece : pieces) {
    if (!acc) {
      acc = piece;
      continue;
    }
    acc = join(*acc, piece);
    if (!acc) return std::nullopt;
  }
  return acc;
}

std::optional<ControlEffect> ControlAlgebra::flatten(
    const ControlEffect& c, const std::vector<ControlTag>& tags) const {
  std::optional<Effect> u = c.underlying;
  std::vector<std::pair<ControlTag, Effect>> kept;
  for (const auto& [tag, p] : c.entries) {
    bool matches = false;
    for (const ControlTag& t : tags)
      if (tag == t) { matches = true; break; }
    if (!matches) {
      kept.push_back({tag, p});
      continue;
    }
    if (!u) {
      u = p;
    } else {
      u = base_->join(*u, p);
      if (!u) return std::nullopt;
    }
  }
  return ControlEffect{std::move(u), std::move(kept)};
}

std::string ControlAlgebra::show(const ControlEffect& c) const {
  std::string out = c.underlying ? base_->show(*c.underlying) : "-";
  if (!c.entries.empty()) {
    out += " {";
    bool first = true;
    for (const auto& [tag, p] : c.entries) {
      if (!first) out += ", ";
      out += tag.display() + ": " + base_->show(p);
      first = false;
    }
    out += "}";
  }
  return out;
}

}  // namespace residuum
