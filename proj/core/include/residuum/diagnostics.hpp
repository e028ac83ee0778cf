#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace residuum {

// Half-open byte range into a source buffer.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

// Byte offset -> 1-based line/column translation for one source buffer.
class LineMap {
 public:
  LineMap() = default;
  explicit LineMap(std::string_view text);

  std::pair<std::size_t, std::size_t> lineCol(std::size_t offset) const;

 private:
  std::vector<std::size_t> starts_{0};
  std::size_t size_ = 0;
};

enum class DiagKind {
  UnboundVar,
  TypeMismatch,
  NotAFunction,
  UndefinedSeq,
  UndefinedJoin,
  UndefinedIter,
  ResidualUndefined,
  BoundExceeded,
  UncaughtException,
  SyntaxError,
  ResolveError,
  IoError,
};

const char* diagKindName(DiagKind k);

struct Diagnostic {
  DiagKind kind = DiagKind::SyntaxError;
  std::string file;
  Span span;
  std::string message;
  // Rendered effects attached to effect-level reports; empty when the
  // diagnostic has no meaningful value for them.
  std::string sofar;
  std::string target;
  std::string system;
};

// Orders by (file, span.begin, span.end, kind) so reports read top-down.
void sortDiagnostics(std::vector<Diagnostic>& diags);

std::string renderTextLine(const Diagnostic& d, const LineMap& lines);

// maxErrors == 0 means unlimited. Truncation affects output only.
std::string renderText(const std::vector<Diagnostic>& diags,
                       const std::map<std::string, LineMap>& lineMaps,
                       std::size_t maxErrors = 0);
std::string renderJson(const std::vector<Diagnostic>& diags,
                       const std::map<std::string, LineMap>& lineMaps,
                       std::size_t maxErrors = 0);

}  // namespace residuum
