#include "hcopt/preprocessor.hpp"

#include <cctype>
#include <unordered_map>

namespace hcopt {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

// Replaces comments with a single space, keeping embedded newlines so line
// numbers survive.
std::string strip_comments(std::string_view src, const std::string& file)
{
    std::string out;
    out.reserve(src.size());
    int line = 1, col = 1;
    auto bump = [&](char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    };
    for (std::size_t i = 0; i < src.size();) {
        char c = src[i];
        if (c == '"' || c == '\'') {
            out += c;
            bump(c);
            ++i;
            while (i < src.size() && src[i] != c && src[i] != '\n') {
                if (src[i] == '\\' && i + 1 < src.size() && src[i + 1] != '\n') {
                    out += src[i];
                    bump(src[i]);
                    ++i;
                }
                out += src[i];
                bump(src[i]);
                ++i;
            }
            if (i < src.size() && src[i] == c) {
                out += c;
                bump(c);
                ++i;
            }
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') {
                bump(src[i]);
                ++i;
            }
            out += ' ';
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            SourceSpan at{file, line, col, line, col};
            i += 2;
            col += 2;
            out += ' ';
            bool closed = false;
            while (i < src.size()) {
                if (src[i] == '*' && i + 1 < src.size() && src[i + 1] == '/') {
                    i += 2;
                    col += 2;
                    closed = true;
                    break;
                }
                if (src[i] == '\n')
                    out += '\n';
                bump(src[i]);
                ++i;
            }
            if (!closed)
                throw Error(ErrorKind::UnterminatedComment, "comment opened here is never closed", at);
            continue;
        }
        out += c;
        bump(c);
        ++i;
    }
    return out;
}

class Expander {
public:
    Expander(const std::unordered_map<std::string, MacroDef>& macros, const std::string& file)
        : macros_(macros), file_(file)
    {
    }

    std::string expand(std::string_view text, int line, int depth) const
    {
        if (depth > kMaxMacroDepth)
            throw Error(ErrorKind::RecursiveMacro, "macro expansion deeper than 16 levels",
                        SourceSpan{file_, line, 1, line, 1});
        std::string out;
        std::size_t i = 0;
        while (i < text.size()) {
            char c = text[i];
            if (c == '"' || c == '\'') {
                std::size_t j = i + 1;
                while (j < text.size() && text[j] != c) {
                    if (text[j] == '\\')
                        ++j;
                    ++j;
                }
                j = std::min(j + 1, text.size());
                out.append(text.substr(i, j - i));
                i = j;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < text.size() && ident_char(text[j]))
                    ++j;
                out.append(text.substr(i, j - i));
                i = j;
                continue;
            }
            if (!ident_start(c)) {
                out += c;
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < text.size() && ident_char(text[j]))
                ++j;
            std::string name(text.substr(i, j - i));
            auto it = macros_.find(name);
            if (it == macros_.end()) {
                out += name;
                i = j;
                continue;
            }
            const MacroDef& m = it->second;
            if (!m.function_like()) {
                out += expand(m.replacement_text, line, depth + 1);
                i = j;
                continue;
            }
            std::size_t k = j;
            while (k < text.size() && (text[k] == ' ' || text[k] == '\t'))
                ++k;
            if (k >= text.size() || text[k] != '(') {
                out += name;
                i = j;
                continue;
            }
            auto [args, after] = collect_args(text, k, line);
            if (args.size() != m.params->size() && !(m.params->empty() && args.size() == 1 && args[0].empty()))
                throw Error(ErrorKind::SyntaxError,
                            "macro '" + name + "' expects " + std::to_string(m.params->size()) + " arguments",
                            SourceSpan{file_, line, 1, line, 1});
            out += expand(substitute(m, args), line, depth + 1);
            i = after;
        }
        return out;
    }

private:
    const std::unordered_map<std::string, MacroDef>& macros_;
    const std::string& file_;

    std::pair<std::vector<std::string>, std::size_t> collect_args(std::string_view text, std::size_t open,
                                                                  int line) const
    {
        std::vector<std::string> args;
        std::string cur;
        int depth = 0;
        for (std::size_t i = open + 1; i < text.size(); ++i) {
            char c = text[i];
            if (c == '"' || c == '\'') {
                std::size_t j = i + 1;
                while (j < text.size() && text[j] != c) {
                    if (text[j] == '\\')
                        ++j;
                    ++j;
                }
                cur.append(text.substr(i, std::min(j + 1, text.size()) - i));
                i = j;
                continue;
            }
            if (c == '(') {
                ++depth;
            } else if (c == ')') {
                if (depth == 0) {
                    args.push_back(trim(cur));
                    return {args, i + 1};
                }
                --depth;
            } else if (c == ',' && depth == 0) {
                args.push_back(trim(cur));
                cur.clear();
                continue;
            }
            cur += c;
        }
        throw Error(ErrorKind::UnsupportedConstruct, "macro invocation must close on the same line",
                    SourceSpan{file_, line, 1, line, 1});
    }

    static std::string substitute(const MacroDef& m, const std::vector<std::string>& args)
    {
        const std::string& r = m.replacement_text;
        std::string out;
        std::size_t i = 0;
        while (i < r.size()) {
            if (r[i] == '"' || r[i] == '\'') {
                char q = r[i];
                std::size_t j = i + 1;
                while (j < r.size() && r[j] != q) {
                    if (r[j] == '\\')
                        ++j;
                    ++j;
                }
                j = std::min(j + 1, r.size());
                out.append(r, i, j - i);
                i = j;
                continue;
            }
            if (!ident_start(r[i])) {
                out += r[i++];
                continue;
            }
            std::size_t j = i;
            while (j < r.size() && ident_char(r[j]))
                ++j;
            std::string word = r.substr(i, j - i);
            bool replaced = false;
            for (std::size_t p = 0; p < m.params->size(); ++p) {
                if ((*m.params)[p] == word) {
                    out += p < args.size() ? args[p] : std::string();
                    replaced = true;
                    break;
                }
            }
            if (!replaced)
                out += word;
            i = j;
        }
        return out;
    }
};

struct CondFrame {
    bool parent_active;
    bool taken;
    bool seen_else;
    int line;
};

} // namespace

PreprocessResult preprocess(std::string_view source, const std::set<std::string>& predefined,
                            const std::string& file)
{
    Predefined defs;
    for (const auto& name : predefined)
        defs.emplace(name, "1");
    return preprocess(source, defs, file);
}

PreprocessResult preprocess(std::string_view source, const Predefined& predefined, const std::string& file)
{
    const std::string clean = strip_comments(source, file);

    std::unordered_map<std::string, MacroDef> macros;
    for (const auto& [name, value] : predefined) {
        MacroDef m;
        m.name = name;
        m.replacement_text = value;
        m.replacement = tokenize(value, file);
        m.span = SourceSpan{file, 1, 1, 1, 1};
        macros[name] = std::move(m);
    }

    PreprocessResult result;
    std::vector<CondFrame> conds;
    Expander expander(macros, file);
    auto active = [&] { return conds.empty() || (conds.back().parent_active && conds.back().taken); };

    std::size_t pos = 0;
    int line_no = 0;
    while (pos < clean.size()) {
        ++line_no;
        std::size_t nl = clean.find('\n', pos);
        bool has_nl = nl != std::string::npos;
        std::string_view line(clean.data() + pos, (has_nl ? nl : clean.size()) - pos);
        pos = has_nl ? nl + 1 : clean.size();

        std::string t = trim(line);
        SourceSpan here{file, line_no, 1, line_no, static_cast<int>(std::max<std::size_t>(line.size(), 1))};
        if (!t.empty() && t[0] == '#') {
            std::string body = trim(std::string_view(t).substr(1));
            std::size_t w = 0;
            while (w < body.size() && ident_char(body[w]))
                ++w;
            std::string directive = body.substr(0, w);
            std::string rest = trim(std::string_view(body).substr(w));

            if (directive == "ifdef" || directive == "ifndef") {
                bool defined = macros.count(rest) > 0;
                bool taken = directive == "ifdef" ? defined : !defined;
                conds.push_back(CondFrame{active(), taken, false, line_no});
            } else if (directive == "else") {
                if (conds.empty() || conds.back().seen_else)
                    throw Error(ErrorKind::UnbalancedConditional, "#else without matching #ifdef", here);
                conds.back().taken = !conds.back().taken;
                conds.back().seen_else = true;
            } else if (directive == "endif") {
                if (conds.empty())
                    throw Error(ErrorKind::UnbalancedConditional, "#endif without matching #ifdef", here);
                conds.pop_back();
            } else if (!active()) {
                // other directives inside a disabled region are ignored
            } else if (directive == "include") {
                // the builtin environment is ambient
            } else if (directive == "define") {
                std::size_t n = 0;
                while (n < rest.size() && ident_char(rest[n]))
                    ++n;
                if (n == 0 || !ident_start(rest[0]))
                    throw Error(ErrorKind::SyntaxError, "#define needs a macro name", here);
                MacroDef m;
                m.name = rest.substr(0, n);
                m.span = here;
                std::string tail;
                if (n < rest.size() && rest[n] == '(') {
                    std::size_t close = rest.find(')', n);
                    if (close == std::string::npos)
                        throw Error(ErrorKind::SyntaxError, "unterminated macro parameter list", here);
                    std::vector<std::string> params;
                    std::string plist = rest.substr(n + 1, close - n - 1);
                    std::size_t s = 0;
                    while (s <= plist.size()) {
                        std::size_t comma = plist.find(',', s);
                        std::string p = trim(std::string_view(plist).substr(
                            s, (comma == std::string::npos ? plist.size() : comma) - s));
                        if (!p.empty())
                            params.push_back(p);
                        if (comma == std::string::npos)
                            break;
                        s = comma + 1;
                    }
                    m.params = std::move(params);
                    tail = rest.substr(close + 1);
                } else {
                    tail = rest.substr(n);
                }
                m.replacement_text = trim(tail);
                m.replacement = tokenize(m.replacement_text, file, LineMap{line_no});
                result.macros.push_back(m);
                macros[m.name] = std::move(m);
            } else if (directive == "undef") {
                macros.erase(rest);
            } else {
                throw Error(ErrorKind::UnsupportedConstruct, "unsupported directive #" + directive, here);
            }
            continue;
        }
        if (!active())
            continue;
        result.text += expander.expand(line, line_no, 0);
        if (has_nl)
            result.text += '\n';
        result.lines.push_back(line_no);
    }
    if (!conds.empty())
        throw Error(ErrorKind::UnbalancedConditional, "#ifdef opened here is never closed",
                    SourceSpan{file, conds.back().line, 1, conds.back().line, 1});
    return result;
}

} // namespace hcopt
