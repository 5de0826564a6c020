#include "hcopt/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace hcopt {

namespace {

constexpr std::array kKeywords = {
    // accepted
    "int", "unsigned", "char", "void", "if", "else", "while", "do", "for", "return", "static", "register", "sizeof",
    // recognized, outside the subset
    "struct", "union", "enum", "typedef", "switch", "case", "default", "goto", "break", "continue", "float",
    "double", "long", "short", "signed", "const", "volatile", "extern", "auto", "inline"};

constexpr std::size_t kSupportedKeywords = 13;

// Longest first within each leading character is handled by trying 3, 2, 1.
constexpr std::array kPunct3 = {"<<=", ">>=", "..."};
constexpr std::array kPunct2 = {"++", "--", "&&", "||", "<=", ">=", "==", "!=", "+=", "-=", "*=",
                                "/=", "%=", "&=", "|=", "^=", "<<", ">>", "->"};
constexpr std::string_view kPunct1 = "()[]{};,<>=+-*/%&|!~^?:.";

class Lexer {
public:
    Lexer(std::string_view src, const std::string& file, const LineMap& lines)
        : src_(src), file_(file), lines_(lines)
    {
    }

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            if (pos_ >= src_.size())
                break;
            out.push_back(next());
        }
        return out;
    }

private:
    std::string_view src_;
    const std::string& file_;
    const LineMap& lines_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    int map_line(int l) const
    {
        if (lines_.empty())
            return l;
        if (l - 1 < static_cast<int>(lines_.size()))
            return lines_[l - 1];
        return lines_.back();
    }

    SourceSpan span_from(int l0, int c0) const
    {
        // end is the last character of the token (inclusive)
        return SourceSpan{file_, map_line(l0), c0, map_line(line_), std::max(col_ - 1, 1)};
    }

    SourceSpan point() const { return SourceSpan{file_, map_line(line_), col_, map_line(line_), col_}; }

    char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments()
    {
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n')
                    advance();
            } else if (c == '/' && peek(1) == '*') {
                SourceSpan at = point();
                advance();
                advance();
                while (true) {
                    if (pos_ >= src_.size())
                        throw Error(ErrorKind::UnterminatedComment, "comment opened here is never closed", at);
                    if (peek() == '*' && peek(1) == '/') {
                        advance();
                        advance();
                        break;
                    }
                    advance();
                }
            } else {
                break;
            }
        }
    }

    Token next()
    {
        int l0 = line_, c0 = col_;
        std::size_t start = pos_;
        unsigned char c = static_cast<unsigned char>(peek());

        if (c >= 0x80)
            throw Error(ErrorKind::IllegalCharacter, "non-ASCII byte", point());

        if (std::isalpha(c) || c == '_') {
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                advance();
            std::string text(src_.substr(start, pos_ - start));
            TokenKind kind = is_keyword(text) ? TokenKind::Keyword : TokenKind::Identifier;
            return Token{kind, std::move(text), span_from(l0, c0)};
        }
        if (std::isdigit(c)) {
            while (std::isdigit(static_cast<unsigned char>(peek())))
                advance();
            if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')
                throw Error(ErrorKind::IllegalCharacter,
                            std::string("unsupported integer literal suffix '") + peek() + "'", point());
            return Token{TokenKind::IntegerLiteral, std::string(src_.substr(start, pos_ - start)),
                         span_from(l0, c0)};
        }
        if (c == '"' || c == '\'') {
            const char quote = static_cast<char>(c);
            SourceSpan at = point();
            advance();
            while (true) {
                if (pos_ >= src_.size() || peek() == '\n')
                    throw Error(ErrorKind::UnterminatedString,
                                quote == '"' ? "string literal is never closed" : "char literal is never closed",
                                at);
                if (peek() == '\\') {
                    advance();
                    if (pos_ >= src_.size() || peek() == '\n')
                        throw Error(ErrorKind::UnterminatedString, "escape at end of line", at);
                    advance();
                    continue;
                }
                if (peek() == quote) {
                    advance();
                    break;
                }
                advance();
            }
            std::string text(src_.substr(start, pos_ - start));
            if (quote == '\'' && decode_literal(text).size() != 1)
                throw Error(ErrorKind::IllegalCharacter, "char literal must hold exactly one character", at);
            return Token{quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral, std::move(text),
                         span_from(l0, c0)};
        }

        std::string_view rest = src_.substr(pos_);
        for (std::string_view p : kPunct3) {
            if (rest.starts_with(p))
                return punct(p, l0, c0);
        }
        for (std::string_view p : kPunct2) {
            if (rest.starts_with(p))
                return punct(p, l0, c0);
        }
        if (kPunct1.find(static_cast<char>(c)) != std::string_view::npos)
            return punct(rest.substr(0, 1), l0, c0);

        throw Error(ErrorKind::IllegalCharacter, std::string("unexpected character '") + static_cast<char>(c) + "'",
                    point());
    }

    Token punct(std::string_view p, int l0, int c0)
    {
        for (std::size_t i = 0; i < p.size(); ++i)
            advance();
        return Token{TokenKind::Punctuator, std::string(p), span_from(l0, c0)};
    }
};

} // namespace

std::string_view to_string(TokenKind kind)
{
    switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::IntegerLiteral: return "integer-literal";
    case TokenKind::StringLiteral: return "string-literal";
    case TokenKind::CharLiteral: return "char-literal";
    case TokenKind::Punctuator: return "punctuator";
    case TokenKind::Keyword: return "keyword";
    }
    return "?";
}

bool is_keyword(std::string_view word)
{
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_supported_keyword(std::string_view word)
{
    auto end = kKeywords.begin() + kSupportedKeywords;
    return std::find(kKeywords.begin(), end, word) != end;
}

std::vector<Token> tokenize(std::string_view source, const std::string& file, const LineMap& lines)
{
    return Lexer(source, file, lines).run();
}

std::string decode_literal(std::string_view lexeme)
{
    std::string out;
    if (lexeme.size() < 2)
        return out;
    std::string_view body = lexeme.substr(1, lexeme.size() - 2);
    for (std::size_t i = 0; i < body.size(); ++i) {
        char c = body[i];
        if (c != '\\' || i + 1 >= body.size()) {
            out += c;
            continue;
        }
        char e = body[++i];
        switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        case 'a': out += '\a'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'v': out += '\v'; break;
        default: out += e; break; // \\ \' \" \?
        }
    }
    return out;
}

std::string escape_literal(std::string_view raw, char quote)
{
    std::string out(1, quote);
    for (char c : raw) {
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '\0': out += "\\0"; break;
        case '\a': out += "\\a"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        case '\v': out += "\\v"; break;
        case '\\': out += "\\\\"; break;
        default:
            if (c == quote)
                out += '\\';
            out += c;
        }
    }
    out += quote;
    return out;
}

} // namespace hcopt
