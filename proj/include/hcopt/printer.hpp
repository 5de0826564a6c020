#pragma once

#include <string>

#include "hcopt/ast.hpp"

namespace hcopt {

// Canonical style: 4-space indent, one statement per line, every control
// body braced, binary operands that are themselves operators parenthesized.
std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent = 0);
std::string print_decl(const VarDecl& d);
std::string print_function(const FunctionDef& f);
std::string pretty_print(const TranslationUnit& tu);

} // namespace hcopt
