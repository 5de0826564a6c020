#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcopt/error.hpp"
#include "hcopt/preprocessor.hpp"

namespace hcopt {

enum class BaseType { Int, UnsignedInt, Char, Void };

struct CType {
    BaseType base = BaseType::Int;
    int pointer_depth = 0; // 0..2
    bool is_register_hint = false;

    bool is_pointer() const { return pointer_depth > 0; }
    bool is_integer() const { return pointer_depth == 0 && base != BaseType::Void; }
    CType pointee() const { return CType{base, pointer_depth - 1, false}; }
    CType pointer_to() const { return CType{base, pointer_depth + 1, false}; }
    CType unqualified() const { return CType{base, pointer_depth, false}; }

    bool operator==(const CType&) const = default;
};

inline constexpr CType kInt{BaseType::Int, 0, false};
inline constexpr CType kUnsigned{BaseType::UnsignedInt, 0, false};
inline constexpr CType kChar{BaseType::Char, 0, false};
inline constexpr CType kVoid{BaseType::Void, 0, false};

/// Storage size in bytes: int/unsigned 4, char 1, any pointer 8. void has none.
int size_of(const CType& t);
std::string to_string(const CType& t);

enum class UnaryOp { Neg, Not, BitNot };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, LogAnd, LogOr, BitAnd, BitOr, Shl, Shr };
enum class AssignOp { Assign, Add, Sub, Mul, Div };

std::string_view spelling(UnaryOp op);
std::string_view spelling(BinaryOp op);
std::string_view spelling(AssignOp op);

/// C binding strength; larger binds tighter.
int precedence(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_logical(BinaryOp op);

enum class ExprKind {
    IntLit,
    StrLit,
    CharLit,
    Var,
    Unary,
    Binary,
    Assign,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
    Index,
    Deref,
    AddrOf,
    Call,
    Ternary,
    Cast,
    SizeofType,
};

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    std::int64_t value = 0; // IntLit, CharLit
    std::string name;       // Var and Call: identifier; StrLit: decoded bytes
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    AssignOp assign_op = AssignOp::Assign;
    CType type;              // Cast, SizeofType
    std::vector<Expr> args;  // operands in source order; call arguments
    SourceSpan span;

    const Expr& lhs() const { return args[0]; }
    const Expr& rhs() const { return args[1]; }
    Expr& lhs() { return args[0]; }
    Expr& rhs() { return args[1]; }
    const Expr& operand() const { return args[0]; }
    Expr& operand() { return args[0]; }

    bool is_var(std::string_view n) const { return kind == ExprKind::Var && name == n; }
    bool is_int(std::int64_t v) const { return kind == ExprKind::IntLit && value == v; }

    static Expr int_lit(std::int64_t v, SourceSpan span = {});
    static Expr var(std::string name, SourceSpan span = {});
    static Expr unary(UnaryOp op, Expr e, SourceSpan span = {});
    static Expr binary(BinaryOp op, Expr l, Expr r, SourceSpan span = {});
    static Expr assign(AssignOp op, Expr target, Expr value, SourceSpan span = {});
    static Expr call(std::string callee, std::vector<Expr> args, SourceSpan span = {});
    static Expr index(Expr base, Expr idx, SourceSpan span = {});
    static Expr wrap(ExprKind kind, Expr e, SourceSpan span = {});
    static Expr sizeof_type(CType t, SourceSpan span = {});
};

enum class StmtKind { Expr, Block, If, While, DoWhile, For, Return, VarDecl };

struct VarDecl {
    std::string name;
    CType type;                      // element type for arrays
    std::vector<std::int64_t> dims;  // empty for scalars
    std::optional<Expr> init;
    bool is_static = false;

    bool is_array() const { return !dims.empty(); }
    std::int64_t element_count() const;
};

/// Statement node. Loop bodies and if-branches are always Blocks; the parser
/// wraps single statements so the tree has one canonical shape.
struct Stmt {
    StmtKind kind = StmtKind::Block;
    std::optional<Expr> expr;   // Expr: the expression; If/While/DoWhile/For: condition; Return: value
    std::optional<Expr> init;   // For
    std::optional<Expr> step;   // For
    std::vector<Stmt> body;     // Block: children; If: then[, else]; loops: [body]
    std::optional<VarDecl> decl;
    SourceSpan span;

    const Stmt& then_branch() const { return body[0]; }
    Stmt& then_branch() { return body[0]; }
    const Stmt* else_branch() const { return body.size() > 1 ? &body[1] : nullptr; }
    Stmt* else_branch() { return body.size() > 1 ? &body[1] : nullptr; }
    const Stmt& loop_body() const { return body[0]; }
    Stmt& loop_body() { return body[0]; }

    bool is_loop() const { return kind == StmtKind::While || kind == StmtKind::DoWhile || kind == StmtKind::For; }

    static Stmt expression(Expr e, SourceSpan span = {});
    static Stmt block(std::vector<Stmt> children, SourceSpan span = {});
    static Stmt declaration(VarDecl d, SourceSpan span = {});
    static Stmt ret(std::optional<Expr> e, SourceSpan span = {});
};

struct Param {
    std::string name;
    CType type;
};

struct FunctionDef {
    std::string name;
    CType return_type;
    std::vector<Param> params;
    Stmt body; // Block
    bool is_static = false;
    SourceSpan span;
};

struct GlobalDecl {
    VarDecl decl;
    SourceSpan span;
};

struct TranslationUnit {
    std::string file;
    std::vector<GlobalDecl> globals;
    std::vector<FunctionDef> functions;
    std::vector<MacroDef> macros; // provenance only

    const FunctionDef* find_function(std::string_view name) const;
    FunctionDef* find_function(std::string_view name);
    const GlobalDecl* find_global(std::string_view name) const;
};

// Span-insensitive structural equality. Macros are provenance and ignored.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const FunctionDef& a, const FunctionDef& b);
bool structurally_equal(const TranslationUnit& a, const TranslationUnit& b);

// Builtin environment provided by the ambient header.
bool is_builtin_function(std::string_view name);
bool is_builtin_value(std::string_view name); // NULL, stdout
CType builtin_return_type(std::string_view name);

/// Overwrites every span in the subtree. Used for synthesized code.
void set_spans(Expr& e, const SourceSpan& span);
void set_spans(Stmt& s, const SourceSpan& span);

// Pre-order traversal. `f` receives each expression node; children are
// visited after the parent.
template <class E, class F>
void walk_expr(E& e, F&& f)
{
    f(e);
    for (auto& a : e.args)
        walk_expr(a, f);
}

/// Visits every statement in pre-order.
template <class S, class F>
void walk_stmts(S& s, F&& f)
{
    f(s);
    for (auto& child : s.body)
        walk_stmts(child, f);
}

/// Visits every expression slot owned directly by `s` (not its children).
template <class S, class F>
void for_each_own_expr(S& s, F&& f)
{
    if (s.kind == StmtKind::For && s.init)
        f(*s.init);
    if (s.expr)
        f(*s.expr);
    if (s.kind == StmtKind::For && s.step)
        f(*s.step);
    if (s.kind == StmtKind::VarDecl && s.decl && s.decl->init)
        f(*s.decl->init);
}

/// Visits every expression node in the statement subtree, pre-order.
template <class S, class F>
void walk_all_exprs(S& s, F&& f)
{
    walk_stmts(s, [&](auto& st) { for_each_own_expr(st, [&](auto& e) { walk_expr(e, f); }); });
}

} // namespace hcopt
