#pragma once

#include <string>
#include <vector>

#include "residuum/ast.hpp"
#include "residuum/diagnostics.hpp"

namespace residuum {

struct ParseResult {
  ast::Module module;
  std::vector<Diagnostic> diags;
};

// Parses one source buffer. `systemId` is only stamped into diagnostics.
// `try ... finally` is lowered away during parsing by duplicating the
// finalizer into the normal path and every catch path, so downstream passes
// never see a finalizer.
ParseResult parseSource(std::string source, std::string file,
                        std::string systemId);

}  // namespace residuum
