#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hcopt/ast.hpp"
#include "hcopt/lexer.hpp"
#include "hcopt/preprocessor.hpp"

namespace hcopt {

/// Builds a TranslationUnit and checks that every identifier resolves.
TranslationUnit parse(const std::vector<Token>& tokens, const std::string& file = {});

/// preprocess + tokenize + parse.
TranslationUnit parse_source(std::string_view source, const Predefined& defines = {}, const std::string& file = {});

TranslationUnit load_file(const std::string& path, const Predefined& defines = {});

/// Parses a lone expression without name resolution.
Expr parse_expression(std::string_view text);

/// Parses a lone statement without name resolution.
Stmt parse_statement(std::string_view text);

/// Runs the identifier-resolution check on an already-built unit.
void resolve_names(const TranslationUnit& tu);

} // namespace hcopt
