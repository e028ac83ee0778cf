#pragma once

#include <string>

#include "residuum/ast.hpp"

namespace residuum {

// Canonical source rendering. Printing a parsed module and reparsing the
// output reproduces the same tree, so print-of-parse is a fixpoint.
std::string prettyPrint(const ast::Module& m);

}  // namespace residuum
