#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hcopt/error.hpp"

namespace hcopt {

enum class TokenKind { Identifier, IntegerLiteral, StringLiteral, CharLiteral, Punctuator, Keyword };

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text; // exact lexeme, quotes included for string/char literals
    SourceSpan span;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_punct(std::string_view t) const { return is(TokenKind::Punctuator, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

/// Maps a line of preprocessed text (1-based index) back to its line in the
/// original file. Empty map means identity.
using LineMap = std::vector<int>;

/// Splits `source` into tokens. Comments are dropped; punctuators use
/// maximal munch.
std::vector<Token> tokenize(std::string_view source, const std::string& file = {}, const LineMap& lines = {});

bool is_keyword(std::string_view word);

/// Keywords the parser accepts. Everything else in the keyword table lexes
/// but is rejected as UnsupportedConstruct.
bool is_supported_keyword(std::string_view word);

/// Decodes the body of a string or char literal lexeme (quotes included).
std::string decode_literal(std::string_view lexeme);

std::string escape_literal(std::string_view raw, char quote);

} // namespace hcopt
