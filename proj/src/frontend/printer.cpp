#include "hcopt/printer.hpp"

#include "hcopt/lexer.hpp"

namespace hcopt {

namespace {

std::string type_prefix(const CType& t)
{
    switch (t.base) {
    case BaseType::Int: return "int";
    case BaseType::UnsignedInt: return "unsigned int";
    case BaseType::Char: return "char";
    case BaseType::Void: return "void";
    }
    return "int";
}

std::string declarator(const CType& t, const std::string& name)
{
    return type_prefix(t) + " " + std::string(static_cast<std::size_t>(t.pointer_depth), '*') + name;
}

std::string abstract_type(const CType& t)
{
    std::string out = type_prefix(t);
    if (t.pointer_depth > 0)
        out += " " + std::string(static_cast<std::size_t>(t.pointer_depth), '*');
    return out;
}

bool is_operator_node(const Expr& e)
{
    return e.kind == ExprKind::Binary || e.kind == ExprKind::Assign || e.kind == ExprKind::Ternary;
}

bool is_prefix_node(const Expr& e)
{
    switch (e.kind) {
    case ExprKind::Unary:
    case ExprKind::Deref:
    case ExprKind::AddrOf:
    case ExprKind::PreInc:
    case ExprKind::PreDec:
    case ExprKind::Cast: return true;
    default: return false;
    }
}

std::string paren(const std::string& s) { return "(" + s + ")"; }

std::string operand_of_binary(const Expr& e)
{
    return is_operator_node(e) ? paren(print_expr(e)) : print_expr(e);
}

std::string operand_of_prefix(const Expr& e)
{
    return is_operator_node(e) || is_prefix_node(e) ? paren(print_expr(e)) : print_expr(e);
}

std::string operand_of_postfix(const Expr& e)
{
    switch (e.kind) {
    case ExprKind::Var:
    case ExprKind::Index:
    case ExprKind::Call:
    case ExprKind::IntLit:
    case ExprKind::StrLit:
    case ExprKind::CharLit:
    case ExprKind::PostInc:
    case ExprKind::PostDec:
    case ExprKind::SizeofType: return print_expr(e);
    default: return paren(print_expr(e));
    }
}

std::string indent_str(int n) { return std::string(static_cast<std::size_t>(n) * 4, ' '); }

void print_block_body(std::string& out, const Stmt& block, int indent)
{
    if (block.kind != StmtKind::Block) {
        out += print_stmt(block, indent + 1);
        return;
    }
    for (const auto& c : block.body)
        out += print_stmt(c, indent + 1);
}

} // namespace

std::string print_expr(const Expr& e)
{
    switch (e.kind) {
    case ExprKind::IntLit:
        return e.value < 0 ? paren(std::to_string(e.value)) : std::to_string(e.value);
    case ExprKind::CharLit:
        return escape_literal(std::string(1, static_cast<char>(e.value)), '\'');
    case ExprKind::StrLit:
        return escape_literal(e.name, '"');
    case ExprKind::Var:
        return e.name;
    case ExprKind::Unary:
        return std::string(spelling(e.unary_op)) + operand_of_prefix(e.operand());
    case ExprKind::Deref:
        return "*" + operand_of_prefix(e.operand());
    case ExprKind::AddrOf:
        return "&" + operand_of_prefix(e.operand());
    case ExprKind::PreInc:
        return "++" + operand_of_prefix(e.operand());
    case ExprKind::PreDec:
        return "--" + operand_of_prefix(e.operand());
    case ExprKind::PostInc:
        return operand_of_postfix(e.operand()) + "++";
    case ExprKind::PostDec:
        return operand_of_postfix(e.operand()) + "--";
    case ExprKind::Binary:
        return operand_of_binary(e.lhs()) + " " + std::string(spelling(e.binary_op)) + " " +
               operand_of_binary(e.rhs());
    case ExprKind::Assign: {
        std::string rhs = e.rhs().kind == ExprKind::Assign ? paren(print_expr(e.rhs())) : print_expr(e.rhs());
        return print_expr(e.lhs()) + " " + std::string(spelling(e.assign_op)) + " " + rhs;
    }
    case ExprKind::Index:
        return operand_of_postfix(e.lhs()) + "[" + print_expr(e.rhs()) + "]";
    case ExprKind::Call: {
        std::string out = e.name + "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i)
                out += ", ";
            out += print_expr(e.args[i]);
        }
        return out + ")";
    }
    case ExprKind::Ternary: {
        auto part = [](const Expr& x, bool allow_ternary) {
            bool wrap = x.kind == ExprKind::Assign || (!allow_ternary && x.kind == ExprKind::Ternary);
            return wrap ? paren(print_expr(x)) : print_expr(x);
        };
        return part(e.args[0], false) + " ? " + part(e.args[1], true) + " : " + part(e.args[2], true);
    }
    case ExprKind::Cast:
        return "(" + abstract_type(e.type) + ")" + operand_of_prefix(e.operand());
    case ExprKind::SizeofType:
        return "sizeof(" + abstract_type(e.type) + ")";
    }
    return "?";
}

std::string print_decl(const VarDecl& d)
{
    std::string out;
    if (d.is_static)
        out += "static ";
    if (d.type.is_register_hint)
        out += "register ";
    out += declarator(d.type, d.name);
    for (auto n : d.dims)
        out += "[" + std::to_string(n) + "]";
    if (d.init)
        out += " = " + print_expr(*d.init);
    return out + ";";
}

std::string print_stmt(const Stmt& s, int indent)
{
    const std::string pad = indent_str(indent);
    std::string out;
    switch (s.kind) {
    case StmtKind::Expr:
        return pad + print_expr(*s.expr) + ";\n";
    case StmtKind::VarDecl:
        return pad + print_decl(*s.decl) + "\n";
    case StmtKind::Return:
        return pad + (s.expr ? "return " + print_expr(*s.expr) + ";\n" : std::string("return;\n"));
    case StmtKind::Block:
        out = pad + "{\n";
        print_block_body(out, s, indent);
        return out + pad + "}\n";
    case StmtKind::If: {
        out = pad + "if (" + print_expr(*s.expr) + ") {\n";
        print_block_body(out, s.then_branch(), indent);
        const Stmt* els = s.else_branch();
        while (els) {
            if (els->kind == StmtKind::Block && els->body.size() == 1 && els->body[0].kind == StmtKind::If) {
                const Stmt& nested = els->body[0];
                out += pad + "} else if (" + print_expr(*nested.expr) + ") {\n";
                print_block_body(out, nested.then_branch(), indent);
                els = nested.else_branch();
            } else {
                out += pad + "} else {\n";
                print_block_body(out, *els, indent);
                els = nullptr;
            }
        }
        return out + pad + "}\n";
    }
    case StmtKind::While:
        out = pad + "while (" + print_expr(*s.expr) + ") {\n";
        print_block_body(out, s.loop_body(), indent);
        return out + pad + "}\n";
    case StmtKind::DoWhile:
        out = pad + "do {\n";
        print_block_body(out, s.loop_body(), indent);
        return out + pad + "} while (" + print_expr(*s.expr) + ");\n";
    case StmtKind::For:
        out = pad + "for (" + (s.init ? print_expr(*s.init) : std::string()) + "; " +
              (s.expr ? print_expr(*s.expr) : std::string()) + "; " + (s.step ? print_expr(*s.step) : std::string()) +
              ") {\n";
        print_block_body(out, s.loop_body(), indent);
        return out + pad + "}\n";
    }
    return out;
}

std::string print_function(const FunctionDef& f)
{
    std::string out;
    if (f.is_static)
        out += "static ";
    out += declarator(f.return_type, f.name) + "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
        if (i)
            out += ", ";
        std::string p = declarator(f.params[i].type, f.params[i].name);
        if (f.params[i].type.is_register_hint)
            p = "register " + p;
        out += p;
    }
    out += ") {\n";
    print_block_body(out, f.body, 0);
    return out + "}\n";
}

std::string pretty_print(const TranslationUnit& tu)
{
    std::string out;
    for (const auto& g : tu.globals)
        out += print_decl(g.decl) + "\n";
    for (const auto& f : tu.functions) {
        if (!out.empty())
            out += "\n";
        out += print_function(f);
    }
    return out;
}

} // namespace hcopt
