#include "hcopt/parser.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hcopt {

namespace {

SourceSpan join(const SourceSpan& a, const SourceSpan& b)
{
    return SourceSpan{a.file, a.line_start, a.col_start, b.line_end, b.col_end};
}

class Parser {
public:
    Parser(const std::vector<Token>& toks, std::string file) : toks_(toks), file_(std::move(file)) {}

    TranslationUnit unit()
    {
        TranslationUnit tu;
        tu.file = file_;
        while (!at_end())
            external(tu);
        return tu;
    }

    Expr lone_expression()
    {
        Expr e = expression();
        if (!at_end())
            fail_expected("end of expression");
        return e;
    }

    Stmt lone_statement()
    {
        std::vector<Stmt> out;
        statement(out);
        if (!at_end())
            fail_expected("end of statement");
        if (out.size() == 1)
            return std::move(out[0]);
        SourceSpan span = out.empty() ? SourceSpan{} : out.front().span;
        return Stmt::block(std::move(out), span);
    }

private:
    const std::vector<Token>& toks_;
    std::string file_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= toks_.size(); }

    const Token& peek(std::size_t k = 0) const
    {
        static const Token eof{TokenKind::Punctuator, "<eof>", {}};
        return pos_ + k < toks_.size() ? toks_[pos_ + k] : eof;
    }

    SourceSpan here() const
    {
        if (!at_end())
            return peek().span;
        if (!toks_.empty())
            return toks_.back().span;
        return SourceSpan{file_, 1, 1, 1, 1};
    }

    const SourceSpan& prev_span() const { return toks_[pos_ - 1].span; }

    [[noreturn]] void fail_expected(const std::string& what) const
    {
        std::string got = at_end() ? "end of input" : "'" + peek().text + "'";
        throw Error(ErrorKind::SyntaxError, "expected " + what + ", found " + got, here());
    }

    [[noreturn]] void unsupported(const std::string& what) const
    {
        throw Error(ErrorKind::UnsupportedConstruct, what + " is outside the supported C subset", here());
    }

    bool accept(std::string_view punct)
    {
        if (peek().is_punct(punct)) {
            ++pos_;
            return true;
        }
        return false;
    }

    const Token& expect(std::string_view punct)
    {
        if (!peek().is_punct(punct))
            fail_expected("'" + std::string(punct) + "'");
        return toks_[pos_++];
    }

    std::string expect_ident()
    {
        if (peek().kind != TokenKind::Identifier)
            fail_expected("identifier");
        return toks_[pos_++].text;
    }

    void reject_unsupported_keyword() const
    {
        const Token& t = peek();
        if (t.kind == TokenKind::Keyword && !is_supported_keyword(t.text))
            unsupported("'" + t.text + "'");
    }

    bool at_type_start() const
    {
        const Token& t = peek();
        if (t.kind == TokenKind::Keyword)
            return t.text == "int" || t.text == "unsigned" || t.text == "char" || t.text == "void" ||
                   t.text == "static" || t.text == "register";
        return t.kind == TokenKind::Identifier && t.text == "time_t";
    }

    struct Specifiers {
        CType type;
        bool is_static = false;
    };

    Specifiers specifiers()
    {
        Specifiers s;
        bool have_base = false;
        while (true) {
            reject_unsupported_keyword();
            const Token& t = peek();
            if (t.is_keyword("static")) {
                s.is_static = true;
                ++pos_;
            } else if (t.is_keyword("register")) {
                s.type.is_register_hint = true;
                ++pos_;
            } else if (!have_base && t.is_keyword("unsigned")) {
                ++pos_;
                if (peek().is_keyword("int"))
                    ++pos_;
                else if (peek().is_keyword("char"))
                    unsupported("'unsigned char'");
                s.type.base = BaseType::UnsignedInt;
                have_base = true;
            } else if (!have_base && t.is_keyword("int")) {
                ++pos_;
                s.type.base = BaseType::Int;
                have_base = true;
            } else if (!have_base && t.is_keyword("char")) {
                ++pos_;
                s.type.base = BaseType::Char;
                have_base = true;
            } else if (!have_base && t.is_keyword("void")) {
                ++pos_;
                s.type.base = BaseType::Void;
                have_base = true;
            } else if (!have_base && t.kind == TokenKind::Identifier && t.text == "time_t") {
                // time_t comes from the ambient header as a plain int
                ++pos_;
                s.type.base = BaseType::Int;
                have_base = true;
            } else {
                break;
            }
        }
        if (!have_base)
            fail_expected("type name");
        return s;
    }

    int pointer_stars()
    {
        int n = 0;
        while (accept("*"))
            ++n;
        if (n > 2)
            unsupported("pointer depth above 2");
        return n;
    }

    // type-name inside a cast or sizeof: base followed by stars
    CType type_name()
    {
        Specifiers s = specifiers();
        if (s.is_static || s.type.is_register_hint)
            fail_expected("type name");
        s.type.pointer_depth = pointer_stars();
        return s.type;
    }

    std::vector<std::int64_t> array_dims()
    {
        std::vector<std::int64_t> dims;
        while (accept("[")) {
            if (peek().kind != TokenKind::IntegerLiteral)
                fail_expected("constant array size");
            SourceSpan at = here();
            std::int64_t n = int_value(toks_[pos_++]);
            if (n <= 0)
                throw Error(ErrorKind::SyntaxError, "array size must be positive", at);
            dims.push_back(n);
            expect("]");
        }
        return dims;
    }

    static std::int64_t int_value(const Token& t)
    {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size())
            throw Error(ErrorKind::SyntaxError, "integer literal out of range", t.span);
        return v;
    }

    void external(TranslationUnit& tu)
    {
        SourceSpan start = here();
        Specifiers spec = specifiers();
        while (true) {
            CType t = spec.type;
            t.pointer_depth = pointer_stars();
            std::string name = expect_ident();
            if (peek().is_punct("(")) {
                function_rest(tu, spec, t, std::move(name), start);
                return;
            }
            VarDecl d;
            d.name = std::move(name);
            d.type = t;
            d.is_static = spec.is_static;
            d.dims = array_dims();
            if (accept("="))
                d.init = initializer();
            tu.globals.push_back(GlobalDecl{std::move(d), join(start, prev_span())});
            if (accept(","))
                continue;
            expect(";");
            tu.globals.back().span = join(start, prev_span());
            return;
        }
    }

    void function_rest(TranslationUnit& tu, const Specifiers& spec, CType ret, std::string name,
                       const SourceSpan& start)
    {
        expect("(");
        std::vector<Param> params;
        if (peek().is_keyword("void") && peek(1).is_punct(")")) {
            ++pos_;
        } else if (!peek().is_punct(")")) {
            do {
                Specifiers ps = specifiers();
                if (ps.is_static)
                    fail_expected("parameter type");
                CType pt = ps.type;
                pt.pointer_depth = pointer_stars();
                std::string pname = expect_ident();
                if (peek().is_punct("["))
                    unsupported("array parameter");
                params.push_back(Param{std::move(pname), pt});
            } while (accept(","));
        }
        expect(")");
        if (accept(";"))
            return; // prototype
        if (!peek().is_punct("{"))
            fail_expected("'{' or ';'");
        FunctionDef f;
        f.name = std::move(name);
        f.return_type = ret;
        f.params = std::move(params);
        f.is_static = spec.is_static;
        f.body = block();
        f.span = join(start, f.body.span);
        tu.functions.push_back(std::move(f));
    }

    Expr initializer()
    {
        if (peek().is_punct("{"))
            unsupported("brace initializer");
        return assignment();
    }

    Stmt block()
    {
        SourceSpan start = expect("{").span;
        std::vector<Stmt> children;
        while (!peek().is_punct("}")) {
            if (at_end())
                fail_expected("'}'");
            statement(children);
        }
        expect("}");
        return Stmt::block(std::move(children), join(start, prev_span()));
    }

    // Body of a control statement, always normalized to a Block.
    Stmt body()
    {
        if (peek().is_punct("{"))
            return block();
        SourceSpan start = here();
        std::vector<Stmt> out;
        statement(out);
        if (out.size() == 1 && out[0].kind == StmtKind::Block)
            return std::move(out[0]);
        if (!out.empty() && out[0].kind == StmtKind::VarDecl)
            throw Error(ErrorKind::SyntaxError, "a declaration is not a statement", start);
        return Stmt::block(std::move(out), join(start, prev_span()));
    }

    void statement(std::vector<Stmt>& out)
    {
        reject_unsupported_keyword();
        SourceSpan start = here();
        const Token& t = peek();
        if (t.is_punct("{")) {
            out.push_back(block());
            return;
        }
        if (t.is_punct(";")) {
            ++pos_;
            out.push_back(Stmt::block({}, start));
            return;
        }
        if (at_type_start()) {
            declaration(out);
            return;
        }
        if (t.is_keyword("if")) {
            ++pos_;
            expect("(");
            Expr cond = expression();
            expect(")");
            Stmt s;
            s.kind = StmtKind::If;
            s.expr = std::move(cond);
            s.body.push_back(body());
            if (peek().is_keyword("else")) {
                ++pos_;
                s.body.push_back(body());
            }
            s.span = join(start, prev_span());
            out.push_back(std::move(s));
            return;
        }
        if (t.is_keyword("while")) {
            ++pos_;
            expect("(");
            Expr cond = expression();
            expect(")");
            Stmt s;
            s.kind = StmtKind::While;
            s.expr = std::move(cond);
            s.body.push_back(body());
            s.span = join(start, prev_span());
            out.push_back(std::move(s));
            return;
        }
        if (t.is_keyword("do")) {
            ++pos_;
            Stmt s;
            s.kind = StmtKind::DoWhile;
            s.body.push_back(body());
            if (!peek().is_keyword("while"))
                fail_expected("'while'");
            ++pos_;
            expect("(");
            s.expr = expression();
            expect(")");
            expect(";");
            s.span = join(start, prev_span());
            out.push_back(std::move(s));
            return;
        }
        if (t.is_keyword("for")) {
            ++pos_;
            expect("(");
            if (at_type_start())
                unsupported("declaration in for-init");
            Stmt s;
            s.kind = StmtKind::For;
            if (!peek().is_punct(";"))
                s.init = expression();
            expect(";");
            if (!peek().is_punct(";"))
                s.expr = expression();
            expect(";");
            if (!peek().is_punct(")"))
                s.step = expression();
            expect(")");
            s.body.push_back(body());
            s.span = join(start, prev_span());
            out.push_back(std::move(s));
            return;
        }
        if (t.is_keyword("return")) {
            ++pos_;
            std::optional<Expr> value;
            if (!peek().is_punct(";"))
                value = expression();
            expect(";");
            out.push_back(Stmt::ret(std::move(value), join(start, prev_span())));
            return;
        }
        if (t.is_keyword("else"))
            fail_expected("statement");
        Expr e = expression();
        expect(";");
        out.push_back(Stmt::expression(std::move(e), join(start, prev_span())));
    }

    void declaration(std::vector<Stmt>& out)
    {
        SourceSpan start = here();
        Specifiers spec = specifiers();
        std::size_t first = out.size();
        do {
            SourceSpan dstart = out.size() == first ? start : here();
            VarDecl d;
            d.type = spec.type;
            d.type.pointer_depth = pointer_stars();
            d.name = expect_ident();
            if (peek().is_punct("("))
                unsupported("local function declaration");
            d.dims = array_dims();
            d.is_static = spec.is_static;
            if (accept("="))
                d.init = initializer();
            out.push_back(Stmt::declaration(std::move(d), join(dstart, prev_span())));
        } while (accept(","));
        expect(";");
        for (std::size_t i = first; i < out.size(); ++i)
            out[i].span.line_end = prev_span().line_end, out[i].span.col_end = prev_span().col_end;
    }

    // ---- expressions ----

    Expr expression()
    {
        Expr e = assignment();
        if (peek().is_punct(","))
            unsupported("comma operator");
        return e;
    }

    static bool is_lvalue(const Expr& e)
    {
        return e.kind == ExprKind::Var || e.kind == ExprKind::Index || e.kind == ExprKind::Deref;
    }

    Expr assignment()
    {
        Expr lhs = ternary();
        const Token& t = peek();
        if (t.kind != TokenKind::Punctuator)
            return lhs;
        std::optional<AssignOp> op;
        if (t.text == "=")
            op = AssignOp::Assign;
        else if (t.text == "+=")
            op = AssignOp::Add;
        else if (t.text == "-=")
            op = AssignOp::Sub;
        else if (t.text == "*=")
            op = AssignOp::Mul;
        else if (t.text == "/=")
            op = AssignOp::Div;
        else if (t.text == "%=" || t.text == "&=" || t.text == "|=" || t.text == "^=" || t.text == "<<=" ||
                 t.text == ">>=")
            unsupported("'" + t.text + "'");
        if (!op)
            return lhs;
        if (!is_lvalue(lhs))
            throw Error(ErrorKind::SyntaxError, "left side of assignment is not assignable", lhs.span);
        ++pos_;
        Expr rhs = assignment();
        SourceSpan span = join(lhs.span, rhs.span);
        return Expr::assign(*op, std::move(lhs), std::move(rhs), span);
    }

    Expr ternary()
    {
        Expr cond = binary(1);
        if (!accept("?"))
            return cond;
        Expr then = expression();
        expect(":");
        Expr otherwise = ternary();
        Expr e;
        e.kind = ExprKind::Ternary;
        e.span = join(cond.span, otherwise.span);
        e.args.push_back(std::move(cond));
        e.args.push_back(std::move(then));
        e.args.push_back(std::move(otherwise));
        return e;
    }

    std::optional<BinaryOp> binary_op_here() const
    {
        const Token& t = peek();
        if (t.kind != TokenKind::Punctuator)
            return std::nullopt;
        static const std::map<std::string, BinaryOp, std::less<>> ops = {
            {"+", BinaryOp::Add},     {"-", BinaryOp::Sub},     {"*", BinaryOp::Mul},    {"/", BinaryOp::Div},
            {"%", BinaryOp::Mod},     {"<", BinaryOp::Lt},      {"<=", BinaryOp::Le},    {">", BinaryOp::Gt},
            {">=", BinaryOp::Ge},     {"==", BinaryOp::Eq},     {"!=", BinaryOp::Ne},    {"&&", BinaryOp::LogAnd},
            {"||", BinaryOp::LogOr},  {"&", BinaryOp::BitAnd},  {"|", BinaryOp::BitOr},  {"<<", BinaryOp::Shl},
            {">>", BinaryOp::Shr}};
        if (t.text == "^")
            unsupported("'^'");
        auto it = ops.find(t.text);
        if (it == ops.end())
            return std::nullopt;
        return it->second;
    }

    Expr binary(int min_prec)
    {
        Expr lhs = unary();
        while (true) {
            auto op = binary_op_here();
            if (!op || precedence(*op) < min_prec)
                return lhs;
            ++pos_;
            Expr rhs = binary(precedence(*op) + 1);
            SourceSpan span = join(lhs.span, rhs.span);
            lhs = Expr::binary(*op, std::move(lhs), std::move(rhs), span);
        }
    }

    bool at_cast() const
    {
        if (!peek().is_punct("("))
            return false;
        const Token& t = peek(1);
        if (t.kind == TokenKind::Keyword)
            return t.text == "int" || t.text == "unsigned" || t.text == "char" || t.text == "void" ||
                   !is_supported_keyword(t.text);
        return t.kind == TokenKind::Identifier && t.text == "time_t";
    }

    Expr unary()
    {
        reject_unsupported_keyword();
        SourceSpan start = here();
        const Token& t = peek();
        if (t.kind == TokenKind::Punctuator) {
            auto prefix = [&](auto make) {
                ++pos_;
                Expr operand = unary();
                SourceSpan span = join(start, operand.span);
                return make(std::move(operand), span);
            };
            if (t.text == "-")
                return prefix([](Expr e, SourceSpan s) { return Expr::unary(UnaryOp::Neg, std::move(e), s); });
            if (t.text == "!")
                return prefix([](Expr e, SourceSpan s) { return Expr::unary(UnaryOp::Not, std::move(e), s); });
            if (t.text == "~")
                return prefix([](Expr e, SourceSpan s) { return Expr::unary(UnaryOp::BitNot, std::move(e), s); });
            if (t.text == "*")
                return prefix([](Expr e, SourceSpan s) { return Expr::wrap(ExprKind::Deref, std::move(e), s); });
            if (t.text == "&")
                return prefix([](Expr e, SourceSpan s) {
                    if (!is_lvalue(e))
                        throw Error(ErrorKind::SyntaxError, "cannot take the address of this expression", s);
                    return Expr::wrap(ExprKind::AddrOf, std::move(e), s);
                });
            if (t.text == "++" || t.text == "--") {
                ExprKind k = t.text == "++" ? ExprKind::PreInc : ExprKind::PreDec;
                return prefix([k](Expr e, SourceSpan s) {
                    if (!is_lvalue(e))
                        throw Error(ErrorKind::SyntaxError, "operand of ++/-- is not assignable", s);
                    return Expr::wrap(k, std::move(e), s);
                });
            }
            if (t.text == "+")
                unsupported("unary '+'");
            if (at_cast()) {
                ++pos_;
                CType ty = type_name();
                expect(")");
                Expr operand = unary();
                SourceSpan span = join(start, operand.span);
                Expr e = Expr::wrap(ExprKind::Cast, std::move(operand), span);
                e.type = ty;
                return e;
            }
        }
        if (t.is_keyword("sizeof")) {
            ++pos_;
            if (!at_cast())
                unsupported("sizeof applied to an expression");
            expect("(");
            CType ty = type_name();
            expect(")");
            if (ty.base == BaseType::Void && ty.pointer_depth == 0)
                throw Error(ErrorKind::SyntaxError, "sizeof(void)", start);
            return Expr::sizeof_type(ty, join(start, prev_span()));
        }
        return postfix();
    }

    Expr postfix()
    {
        Expr e = primary();
        while (true) {
            const Token& t = peek();
            if (t.is_punct("[")) {
                ++pos_;
                Expr idx = expression();
                expect("]");
                SourceSpan span = join(e.span, prev_span());
                e = Expr::index(std::move(e), std::move(idx), span);
            } else if (t.is_punct("(")) {
                if (e.kind != ExprKind::Var)
                    unsupported("call through an expression");
                ++pos_;
                std::vector<Expr> args;
                if (!peek().is_punct(")")) {
                    do {
                        args.push_back(assignment());
                    } while (accept(","));
                }
                expect(")");
                SourceSpan span = join(e.span, prev_span());
                e = Expr::call(e.name, std::move(args), span);
            } else if (t.is_punct("++") || t.is_punct("--")) {
                if (!is_lvalue(e))
                    throw Error(ErrorKind::SyntaxError, "operand of ++/-- is not assignable", e.span);
                ExprKind k = t.text == "++" ? ExprKind::PostInc : ExprKind::PostDec;
                ++pos_;
                SourceSpan span = join(e.span, prev_span());
                e = Expr::wrap(k, std::move(e), span);
            } else if (t.is_punct(".") || t.is_punct("->")) {
                unsupported("member access");
            } else {
                return e;
            }
        }
    }

    Expr primary()
    {
        reject_unsupported_keyword();
        const Token& t = peek();
        switch (t.kind) {
        case TokenKind::IntegerLiteral: {
            ++pos_;
            return Expr::int_lit(int_value(t), t.span);
        }
        case TokenKind::CharLiteral: {
            ++pos_;
            Expr e;
            e.kind = ExprKind::CharLit;
            e.value = static_cast<signed char>(decode_literal(t.text)[0]);
            e.span = t.span;
            return e;
        }
        case TokenKind::StringLiteral: {
            Expr e;
            e.kind = ExprKind::StrLit;
            e.span = t.span;
            while (peek().kind == TokenKind::StringLiteral) {
                e.name += decode_literal(peek().text);
                e.span = join(e.span, peek().span);
                ++pos_;
            }
            return e;
        }
        case TokenKind::Identifier: {
            ++pos_;
            return Expr::var(t.text, t.span);
        }
        default:
            break;
        }
        if (t.is_punct("(")) {
            ++pos_;
            Expr e = expression();
            expect(")");
            return e;
        }
        fail_expected("expression");
    }
};

// ---- name resolution ----

class Resolver {
public:
    explicit Resolver(const TranslationUnit& tu) : tu_(tu) {}

    void run()
    {
        std::set<std::string> fn_names;
        for (const auto& f : tu_.functions) {
            if (is_builtin_function(f.name))
                throw Error(ErrorKind::SyntaxError, "'" + f.name + "' redefines a builtin", f.span);
            if (!fn_names.insert(f.name).second)
                throw Error(ErrorKind::SyntaxError, "function '" + f.name + "' defined twice", f.span);
        }
        std::set<std::string> global_names;
        for (const auto& g : tu_.globals) {
            check_decl(g.decl, g.span);
            if (!global_names.insert(g.decl.name).second || fn_names.count(g.decl.name))
                throw Error(ErrorKind::SyntaxError, "global '" + g.decl.name + "' declared twice", g.span);
            if (g.decl.init) {
                check_expr(*g.decl.init);
            }
            globals_.insert(g.decl.name);
        }
        for (const auto& f : tu_.functions) {
            scopes_.clear();
            scopes_.emplace_back();
            for (const auto& p : f.params) {
                if (p.type.base == BaseType::Void && p.type.pointer_depth == 0)
                    throw Error(ErrorKind::SyntaxError, "parameter '" + p.name + "' has type void", f.span);
                if (!scopes_.back().insert(p.name).second)
                    throw Error(ErrorKind::SyntaxError, "duplicate parameter '" + p.name + "'", f.span);
            }
            // the body block shares the parameter scope
            for (const auto& s : f.body.body)
                check_stmt(s);
        }
    }

private:
    const TranslationUnit& tu_;
    std::set<std::string> globals_;
    std::vector<std::set<std::string>> scopes_;

    static void check_decl(const VarDecl& d, const SourceSpan& span)
    {
        if (d.type.base == BaseType::Void && d.type.pointer_depth == 0)
            throw Error(ErrorKind::SyntaxError, "variable '" + d.name + "' has type void", span);
        if (d.init && d.is_array() && d.init->kind != ExprKind::StrLit)
            throw Error(ErrorKind::UnsupportedConstruct, "array initializer other than a string literal", span);
        if (d.init && d.is_array() && (d.type != kChar || d.dims.size() != 1))
            throw Error(ErrorKind::UnsupportedConstruct, "string initializer for a non-char array", span);
    }

    bool visible(const std::string& name) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->count(name))
                return true;
        return globals_.count(name) > 0 || is_builtin_value(name);
    }

    void check_stmt(const Stmt& s)
    {
        switch (s.kind) {
        case StmtKind::Block:
            scopes_.emplace_back();
            for (const auto& c : s.body)
                check_stmt(c);
            scopes_.pop_back();
            return;
        case StmtKind::VarDecl:
            check_decl(*s.decl, s.span);
            if (s.decl->init)
                check_expr(*s.decl->init);
            if (!scopes_.back().insert(s.decl->name).second)
                throw Error(ErrorKind::SyntaxError, "'" + s.decl->name + "' redeclared in the same scope", s.span);
            return;
        default:
            for_each_own_expr(s, [&](const Expr& e) { check_expr(e); });
            for (const auto& c : s.body)
                check_stmt(c);
        }
    }

    void check_expr(const Expr& e)
    {
        walk_expr(e, [&](const Expr& x) {
            if (x.kind == ExprKind::Var && !visible(x.name))
                throw Error(ErrorKind::UnresolvedIdentifier, "'" + x.name + "' is not declared", x.span);
            if (x.kind == ExprKind::Call && !tu_.find_function(x.name) && !is_builtin_function(x.name))
                throw Error(ErrorKind::UnresolvedIdentifier, "function '" + x.name + "' is not declared", x.span);
        });
    }
};

} // namespace

TranslationUnit parse(const std::vector<Token>& tokens, const std::string& file)
{
    Parser p(tokens, file);
    TranslationUnit tu = p.unit();
    resolve_names(tu);
    return tu;
}

void resolve_names(const TranslationUnit& tu) { Resolver(tu).run(); }

TranslationUnit parse_source(std::string_view source, const Predefined& defines, const std::string& file)
{
    PreprocessResult pp = preprocess(source, defines, file);
    TranslationUnit tu = parse(tokenize(pp.text, file, pp.lines), file);
    tu.macros = std::move(pp.macros);
    return tu;
}

TranslationUnit load_file(const std::string& path, const Predefined& defines)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos)
        name = name.substr(slash + 1);
    return parse_source(ss.str(), defines, name);
}

Expr parse_expression(std::string_view text)
{
    auto toks = tokenize(text);
    return Parser(toks, {}).lone_expression();
}

Stmt parse_statement(std::string_view text)
{
    auto toks = tokenize(text);
    return Parser(toks, {}).lone_statement();
}

} // namespace hcopt
