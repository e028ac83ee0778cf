#include "residuum/diagnostics.hpp"

#include <algorithm>

#include "json.hpp"

namespace residuum {

LineMap::LineMap(std::string_view text) : size_(text.size()) {
  for (std::size_t i = 0; i < text.size(); ++i)
    if (text[i] == '\n') starts_.push_back(i + 1);
}

std::pair<std::size_t, std::size_t> LineMap::lineCol(std::size_t offset) const {
  if (offset > size_) offset = size_;
  auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
  std::size_t line = static_cast<std::size_t>(it - starts_.begin());
  std::size_t col = offset - starts_[line - 1] + 1;
  return {line, col};
}

const char* diagKindName(DiagKind k) {
  switch (k) {
    case DiagKind::UnboundVar: return "UnboundVar";
    case DiagKind::TypeMismatch: return "TypeMismatch";
    case DiagKind::NotAFunction: return "NotAFunction";
    case DiagKind::UndefinedSeq: return "UndefinedSeq";
    case DiagKind::UndefinedJoin: return "UndefinedJoin";
    case DiagKind::UndefinedIter: return "UndefinedIter";
    case DiagKind::ResidualUndefined: return "ResidualUndefined";
    case DiagKind::BoundExceeded: return "BoundExceeded";
    case DiagKind::UncaughtException: return "UncaughtException";
    case DiagKind::SyntaxError: return "SyntaxError";
    case DiagKind::ResolveError: return "ResolveError";
    case DiagKind::IoError: return "IoError";
  }
  return "Unknown";
}

void sortDiagnostics(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     if (a.file != b.file) return a.file < b.file;
                     if (a.span.begin != b.span.begin)
                       return a.span.begin < b.span.begin;
                     if (a.span.end != b.span.end) return a.span.end < b.span.end;
                     return static_cast<int>(a.kind) < static_cast<int>(b.kind);
                   });
}

std::string renderTextLine(const Diagnostic& d, const LineMap& lines) {
  auto [line, col] = lines.lineCol(d.span.begin);
  std::string out = d.file + ":" + std::to_string(line) + ":" +
                    std::to_string(col) + ": " + diagKindName(d.kind) + ": " +
                    d.message;
  if (!d.sofar.empty() || !d.target.empty()) {
    out += " [";
    if (!d.sofar.empty()) out += "sofar=" + d.sofar;
    if (!d.sofar.empty() && !d.target.empty()) out += ", ";
    if (!d.target.empty()) out += "target=" + d.target;
    out += "]";
  }
  return out;
}

std::string renderText(const std::vector<Diagnostic>& diags,
                       const std::map<std::string, LineMap>& lineMaps,
                       std::size_t maxErrors) {
  static const LineMap empty;
  std::string out;
  std::size_t shown = 0;
  for (const Diagnostic& d : diags) {
    if (maxErrors != 0 && shown == maxErrors) {
      out += "(" + std::to_string(diags.size() - shown) +
             " more diagnostics suppressed)\n";
      return out;
    }
    auto it = lineMaps.find(d.file);
    out += renderTextLine(d, it == lineMaps.end() ? empty : it->second);
    out += "\n";
    ++shown;
  }
  return out;
}

std::string renderJson(const std::vector<Diagnostic>& diags,
                       const std::map<std::string, LineMap>& lineMaps,
                       std::size_t maxErrors) {
  static const LineMap empty;
  nlohmann::json arr = nlohmann::json::array();
  std::size_t shown = 0;
  for (const Diagnostic& d : diags) {
    if (maxErrors != 0 && shown == maxErrors) break;
    auto it = lineMaps.find(d.file);
    const LineMap& lines = it == lineMaps.end() ? empty : it->second;
    auto [line, col] = lines.lineCol(d.span.begin);
    auto [endLine, endCol] = lines.lineCol(d.span.end);
    nlohmann::json obj{
        {"file", d.file},
        {"line", line},
        {"col", col},
        {"endLine", endLine},
        {"endCol", endCol},
        {"kind", diagKindName(d.kind)},
        {"message", d.message},
        {"sofar", d.sofar.empty() ? nlohmann::json() : nlohmann::json(d.sofar)},
        {"target",
         d.target.empty() ? nlohmann::json() : nlohmann::json(d.target)},
        {"system", d.system},
    };
    arr.push_back(std::move(obj));
    ++shown;
  }
  return arr.dump(2) + "\n";
}

}  // namespace residuum
