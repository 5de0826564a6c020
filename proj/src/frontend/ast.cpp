#include "hcopt/ast.hpp"

#include <algorithm>
#include <array>

namespace hcopt {

int size_of(const CType& t)
{
    if (t.pointer_depth > 0)
        return 8;
    switch (t.base) {
    case BaseType::Int:
    case BaseType::UnsignedInt: return 4;
    case BaseType::Char: return 1;
    case BaseType::Void: return 0;
    }
    return 0;
}

std::string to_string(const CType& t)
{
    std::string out;
    if (t.is_register_hint)
        out += "register ";
    switch (t.base) {
    case BaseType::Int: out += "int"; break;
    case BaseType::UnsignedInt: out += "unsigned int"; break;
    case BaseType::Char: out += "char"; break;
    case BaseType::Void: out += "void"; break;
    }
    if (t.pointer_depth > 0)
        out += ' ' + std::string(static_cast<std::size_t>(t.pointer_depth), '*');
    return out;
}

std::string_view spelling(UnaryOp op)
{
    switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Not: return "!";
    case UnaryOp::BitNot: return "~";
    }
    return "?";
}

std::string_view spelling(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::LogAnd: return "&&";
    case BinaryOp::LogOr: return "||";
    case BinaryOp::BitAnd: return "&";
    case BinaryOp::BitOr: return "|";
    case BinaryOp::Shl: return "<<";
    case BinaryOp::Shr: return ">>";
    }
    return "?";
}

std::string_view spelling(AssignOp op)
{
    switch (op) {
    case AssignOp::Assign: return "=";
    case AssignOp::Add: return "+=";
    case AssignOp::Sub: return "-=";
    case AssignOp::Mul: return "*=";
    case AssignOp::Div: return "/=";
    }
    return "?";
}

int precedence(BinaryOp op)
{
    switch (op) {
    case BinaryOp::LogOr: return 1;
    case BinaryOp::LogAnd: return 2;
    case BinaryOp::BitOr: return 3;
    case BinaryOp::BitAnd: return 4;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 5;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 6;
    case BinaryOp::Shl:
    case BinaryOp::Shr: return 7;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 8;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 9;
    }
    return 0;
}

bool is_comparison(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
    case BinaryOp::Eq:
    case BinaryOp::Ne: return true;
    default: return false;
    }
}

bool is_logical(BinaryOp op) { return op == BinaryOp::LogAnd || op == BinaryOp::LogOr; }

Expr Expr::int_lit(std::int64_t v, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::IntLit;
    e.value = v;
    e.span = std::move(span);
    return e;
}

Expr Expr::var(std::string name, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::Var;
    e.name = std::move(name);
    e.span = std::move(span);
    return e;
}

Expr Expr::unary(UnaryOp op, Expr operand, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::Unary;
    e.unary_op = op;
    e.args.push_back(std::move(operand));
    e.span = std::move(span);
    return e;
}

Expr Expr::binary(BinaryOp op, Expr l, Expr r, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::Binary;
    e.binary_op = op;
    e.args.push_back(std::move(l));
    e.args.push_back(std::move(r));
    e.span = std::move(span);
    return e;
}

Expr Expr::assign(AssignOp op, Expr target, Expr value, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::Assign;
    e.assign_op = op;
    e.args.push_back(std::move(target));
    e.args.push_back(std::move(value));
    e.span = std::move(span);
    return e;
}

Expr Expr::call(std::string callee, std::vector<Expr> args, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::Call;
    e.name = std::move(callee);
    e.args = std::move(args);
    e.span = std::move(span);
    return e;
}

Expr Expr::index(Expr base, Expr idx, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::Index;
    e.args.push_back(std::move(base));
    e.args.push_back(std::move(idx));
    e.span = std::move(span);
    return e;
}

Expr Expr::wrap(ExprKind kind, Expr operand, SourceSpan span)
{
    Expr e;
    e.kind = kind;
    e.args.push_back(std::move(operand));
    e.span = std::move(span);
    return e;
}

Expr Expr::sizeof_type(CType t, SourceSpan span)
{
    Expr e;
    e.kind = ExprKind::SizeofType;
    e.type = t;
    e.span = std::move(span);
    return e;
}

std::int64_t VarDecl::element_count() const
{
    std::int64_t n = 1;
    for (auto d : dims)
        n *= d;
    return n;
}

Stmt Stmt::expression(Expr e, SourceSpan span)
{
    Stmt s;
    s.kind = StmtKind::Expr;
    s.expr = std::move(e);
    s.span = std::move(span);
    return s;
}

Stmt Stmt::block(std::vector<Stmt> children, SourceSpan span)
{
    Stmt s;
    s.kind = StmtKind::Block;
    s.body = std::move(children);
    s.span = std::move(span);
    return s;
}

Stmt Stmt::declaration(VarDecl d, SourceSpan span)
{
    Stmt s;
    s.kind = StmtKind::VarDecl;
    s.decl = std::move(d);
    s.span = std::move(span);
    return s;
}

Stmt Stmt::ret(std::optional<Expr> e, SourceSpan span)
{
    Stmt s;
    s.kind = StmtKind::Return;
    s.expr = std::move(e);
    s.span = std::move(span);
    return s;
}

const FunctionDef* TranslationUnit::find_function(std::string_view name) const
{
    for (const auto& f : functions)
        if (f.name == name)
            return &f;
    return nullptr;
}

FunctionDef* TranslationUnit::find_function(std::string_view name)
{
    for (auto& f : functions)
        if (f.name == name)
            return &f;
    return nullptr;
}

const GlobalDecl* TranslationUnit::find_global(std::string_view name) const
{
    for (const auto& g : globals)
        if (g.decl.name == name)
            return &g;
    return nullptr;
}

bool structurally_equal(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind || a.args.size() != b.args.size())
        return false;
    switch (a.kind) {
    case ExprKind::IntLit:
    case ExprKind::CharLit:
        if (a.value != b.value)
            return false;
        break;
    case ExprKind::StrLit:
    case ExprKind::Var:
    case ExprKind::Call:
        if (a.name != b.name)
            return false;
        break;
    case ExprKind::Unary:
        if (a.unary_op != b.unary_op)
            return false;
        break;
    case ExprKind::Binary:
        if (a.binary_op != b.binary_op)
            return false;
        break;
    case ExprKind::Assign:
        if (a.assign_op != b.assign_op)
            return false;
        break;
    case ExprKind::Cast:
    case ExprKind::SizeofType:
        if (a.type != b.type)
            return false;
        break;
    default:
        break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(a.args[i], b.args[i]))
            return false;
    return true;
}

namespace {

bool opt_equal(const std::optional<Expr>& a, const std::optional<Expr>& b)
{
    if (a.has_value() != b.has_value())
        return false;
    return !a || structurally_equal(*a, *b);
}

bool decl_equal(const VarDecl& a, const VarDecl& b)
{
    return a.name == b.name && a.type == b.type && a.dims == b.dims && a.is_static == b.is_static &&
           opt_equal(a.init, b.init);
}

} // namespace

bool structurally_equal(const Stmt& a, const Stmt& b)
{
    if (a.kind != b.kind || a.body.size() != b.body.size())
        return false;
    if (!opt_equal(a.expr, b.expr) || !opt_equal(a.init, b.init) || !opt_equal(a.step, b.step))
        return false;
    if (a.decl.has_value() != b.decl.has_value())
        return false;
    if (a.decl && !decl_equal(*a.decl, *b.decl))
        return false;
    for (std::size_t i = 0; i < a.body.size(); ++i)
        if (!structurally_equal(a.body[i], b.body[i]))
            return false;
    return true;
}

bool structurally_equal(const FunctionDef& a, const FunctionDef& b)
{
    if (a.name != b.name || a.return_type != b.return_type || a.is_static != b.is_static ||
        a.params.size() != b.params.size())
        return false;
    for (std::size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type)
            return false;
    return structurally_equal(a.body, b.body);
}

bool structurally_equal(const TranslationUnit& a, const TranslationUnit& b)
{
    if (a.globals.size() != b.globals.size() || a.functions.size() != b.functions.size())
        return false;
    for (std::size_t i = 0; i < a.globals.size(); ++i)
        if (!decl_equal(a.globals[i].decl, b.globals[i].decl))
            return false;
    for (std::size_t i = 0; i < a.functions.size(); ++i)
        if (!structurally_equal(a.functions[i], b.functions[i]))
            return false;
    return true;
}

namespace {

constexpr std::array kBuiltinFunctions = {"printf", "sprintf", "putchar", "fflush", "malloc", "free",
                                          "memset", "strlen",  "rand",    "srand",  "time"};

} // namespace

bool is_builtin_function(std::string_view name)
{
    return std::find(kBuiltinFunctions.begin(), kBuiltinFunctions.end(), name) != kBuiltinFunctions.end();
}

bool is_builtin_value(std::string_view name) { return name == "NULL" || name == "stdout"; }

CType builtin_return_type(std::string_view name)
{
    if (name == "malloc" || name == "memset")
        return CType{BaseType::Void, 1, false};
    if (name == "free" || name == "srand")
        return kVoid;
    if (name == "strlen")
        return kUnsigned;
    return kInt;
}

void set_spans(Expr& e, const SourceSpan& span)
{
    walk_expr(e, [&](Expr& x) { x.span = span; });
}

void set_spans(Stmt& s, const SourceSpan& span)
{
    walk_stmts(s, [&](Stmt& st) {
        st.span = span;
        for_each_own_expr(st, [&](Expr& e) { set_spans(e, span); });
    });
}

} // namespace hcopt
