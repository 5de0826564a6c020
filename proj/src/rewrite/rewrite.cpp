#include "hcopt/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "../analysis/local.hpp"
#include "hcopt/printer.hpp"

namespace hcopt {

using namespace detail;

namespace {

[[noreturn]] void precondition(const std::string& what, const SourceSpan& span)
{
    throw Error(ErrorKind::PreconditionViolated, what, span.valid() ? std::optional<SourceSpan>(span) : std::nullopt);
}

bool zero_one(const Expr& e)
{
    if (is_boolean_valued(e))
        return true;
    return e.kind == ExprKind::Binary && (e.binary_op == BinaryOp::BitAnd || e.binary_op == BinaryOp::BitOr) &&
           zero_one(e.lhs()) && zero_one(e.rhs());
}

Expr booleanize(const Expr& e)
{
    if (zero_one(e))
        return e;
    return Expr::binary(BinaryOp::Ne, e, Expr::int_lit(0, e.span), e.span);
}

// Replaces every Var `name` with `make()`, without revisiting the replacement.
void replace_var(Expr& e, const std::string& name, const std::function<Expr(const Expr&)>& make)
{
    if (e.kind == ExprKind::Var && e.name == name) {
        e = make(e);
        return;
    }
    for (auto& a : e.args)
        replace_var(a, name, make);
}

void replace_var(Stmt& s, const std::string& name, const std::function<Expr(const Expr&)>& make)
{
    walk_stmts(s, [&](Stmt& st) { for_each_own_expr(st, [&](Expr& e) { replace_var(e, name, make); }); });
}

std::string fresh_name(std::set<std::string>& taken, const std::string& stem)
{
    for (int n = 0;; ++n) {
        std::string name = stem + std::to_string(n);
        if (taken.insert(name).second)
            return name;
    }
}

void insert_before_returns(Stmt& s, const Stmt& write_back)
{
    for (auto& child : s.body)
        insert_before_returns(child, write_back);
    if (s.kind != StmtKind::Block)
        return;
    for (std::size_t i = 0; i < s.body.size(); ++i) {
        if (s.body[i].kind == StmtKind::Return) {
            s.body.insert(s.body.begin() + static_cast<long>(i), write_back);
            ++i;
        }
    }
}

std::vector<const Stmt*> if_chain(const Stmt& s)
{
    std::vector<const Stmt*> chain;
    const Stmt* cur = &s;
    while (cur->kind == StmtKind::If && !cur->else_branch()) {
        chain.push_back(cur);
        const Stmt& then = cur->then_branch();
        if (then.body.size() != 1)
            break;
        cur = &then.body[0];
    }
    return chain;
}

Expr& expr_slot(Stmt& s, int slot)
{
    std::optional<Expr>* e = nullptr;
    switch (slot) {
    case 0: e = &s.init; break;
    case 1: e = &s.expr; break;
    case 2: e = &s.step; break;
    case 3: e = s.decl ? &s.decl->init : nullptr; break;
    default: break;
    }
    if (!e || !*e)
        throw Error(ErrorKind::SpanMismatch, "finding refers to a missing expression");
    return **e;
}

void collect_spans(const TranslationUnit& tu, std::set<SourceSpan>& out)
{
    for (const auto& g : tu.globals)
        out.insert(g.span);
    for (const auto& f : tu.functions) {
        out.insert(f.span);
        walk_stmts(f.body, [&](const Stmt& s) { out.insert(s.span); });
        walk_all_exprs(f.body, [&](const Expr& e) { out.insert(e.span); });
    }
}

} // namespace

Stmt rewrite_countdown(const Stmt& loop, const CanonicalLoop& c)
{
    if (loop.kind != StmtKind::For || c.dir != LoopDir::Up || !c.step1 || c.var_written_in_body ||
        !c.bound_loop_invariant)
        precondition("loop is not an invariant up-counting loop", loop.span);
    Expr last = c.inclusive ? c.bound : fold_add(c.bound, -1);
    Expr count = fold_add(fold_sub(last, c.init), 1);
    Expr top = fold_add(last, 1);

    Stmt out = loop;
    SourceSpan init_span = loop.init->span, cond_span = loop.expr->span, step_span = loop.step->span;
    out.init = Expr::assign(AssignOp::Assign, Expr::var(c.var), std::move(count));
    set_spans(*out.init, init_span);
    out.expr = Expr::binary(BinaryOp::Ne, Expr::var(c.var), Expr::int_lit(0));
    set_spans(*out.expr, cond_span);
    out.step = Expr::wrap(ExprKind::PostDec, Expr::var(c.var));
    set_spans(*out.step, step_span);
    replace_var(out.loop_body(), c.var, [&](const Expr& v) {
        Expr e = Expr::binary(BinaryOp::Sub, top, Expr::var(c.var));
        set_spans(e, v.span);
        return e;
    });
    return out;
}

Stmt rewrite_inline(const TranslationUnit& tu, const Stmt& call_stmt, const FunctionDef& callee)
{
    if (call_stmt.kind != StmtKind::Expr || call_stmt.expr->kind != ExprKind::Call ||
        call_stmt.expr->name != callee.name || call_stmt.expr->args.size() != callee.params.size())
        precondition("statement is not a call to " + callee.name, call_stmt.span);
    int returns = 0;
    walk_stmts(callee.body, [&](const Stmt& s) {
        if (s.kind == StmtKind::Return)
            ++returns;
    });
    bool trailing = !callee.body.body.empty() && callee.body.body.back().kind == StmtKind::Return;
    if (returns > 1 || (returns == 1 && !trailing))
        throw Error(ErrorKind::EarlyReturnUnsupported, callee.name + " returns before its end", callee.span);

    std::set<std::string> taken = identifiers(tu);
    std::set<std::string> callee_locals = local_names(callee);
    std::vector<Stmt> out;
    std::vector<std::string> temps;
    for (std::size_t i = 0; i < callee.params.size(); ++i) {
        std::string t = fresh_name(taken, "__t");
        if (callee_locals.count(t))
            throw Error(ErrorKind::NameCollision, "temporary " + t + " collides with a local of " + callee.name);
        temps.push_back(t);
        VarDecl d;
        d.name = t;
        d.type = callee.params[i].type.unqualified();
        d.init = call_stmt.expr->args[i];
        out.push_back(Stmt::declaration(std::move(d)));
    }
    Stmt body = callee.body;
    for (std::size_t i = 0; i < callee.params.size(); ++i) {
        if (declares(body, callee.params[i].name))
            precondition(callee.name + " redeclares parameter " + callee.params[i].name, callee.span);
        const std::string& t = temps[i];
        replace_var(body, callee.params[i].name, [&](const Expr& v) { return Expr::var(t, v.span); });
    }
    for (auto& s : body.body) {
        if (s.kind == StmtKind::Return) {
            if (s.expr && !side_effect_free(*s.expr, tu))
                out.push_back(Stmt::expression(std::move(*s.expr)));
            continue;
        }
        out.push_back(std::move(s));
    }
    Stmt block = Stmt::block(std::move(out));
    set_spans(block, call_stmt.span);
    return block;
}

FunctionDef rewrite_global_alias(const TranslationUnit& tu, const FunctionDef& fn, const std::string& global)
{
    const GlobalDecl* g = tu.find_global(global);
    if (!g || local_names(fn).count(global) || g->decl.dims.size() > 1)
        precondition(global + " is not an aliasable global in " + fn.name, fn.span);
    std::string local = "__local_" + global;
    std::set<std::string> visible = local_names(fn);
    walk_all_exprs(fn.body, [&](const Expr& e) { visible.insert(e.name); });
    for (const auto& other : tu.globals)
        visible.insert(other.decl.name);
    for (const auto& other : tu.functions)
        visible.insert(other.name);
    if (visible.count(local))
        throw Error(ErrorKind::NameCollision, local + " is already declared", fn.span);

    FunctionDef out = fn;
    bool written = !g->decl.is_array() && writes_var(fn.body, global);
    VarDecl d;
    d.name = local;
    d.type = g->decl.type.unqualified();
    if (g->decl.is_array())
        d.type.pointer_depth += 1;
    d.type.is_register_hint = true;
    d.init = Expr::var(global);
    replace_var(out.body, global, [&](const Expr& v) { return Expr::var(local, v.span); });
    if (written) {
        Stmt wb = Stmt::expression(Expr::assign(AssignOp::Assign, Expr::var(global), Expr::var(local)));
        set_spans(wb, fn.span);
        insert_before_returns(out.body, wb);
        if (out.body.body.empty() || out.body.body.back().kind != StmtKind::Return)
            out.body.body.push_back(wb);
    }
    Stmt decl = Stmt::declaration(std::move(d));
    set_spans(decl, fn.span);
    out.body.body.insert(out.body.body.begin(), std::move(decl));
    return out;
}

Expr rewrite_bitwise(const Expr& e)
{
    if (e.kind != ExprKind::Binary || !is_logical(e.binary_op))
        precondition("expression is not && or ||", e.span);
    BinaryOp op = e.binary_op == BinaryOp::LogAnd ? BinaryOp::BitAnd : BinaryOp::BitOr;
    return Expr::binary(op, booleanize(e.lhs()), booleanize(e.rhs()), e.span);
}

Stmt rewrite_nested_if_merge(const Stmt& s)
{
    auto chain = if_chain(s);
    if (chain.size() < 2)
        precondition("no nested if to merge", s.span);
    Expr cond = booleanize(*chain[0]->expr);
    for (std::size_t i = 1; i < chain.size(); ++i)
        cond = Expr::binary(BinaryOp::BitAnd, std::move(cond), booleanize(*chain[i]->expr), chain[i]->expr->span);
    Stmt out = s;
    out.expr = std::move(cond);
    out.body = {chain.back()->then_branch()};
    return out;
}

Stmt rewrite_memset(const Stmt& loop, const CType& elem)
{
    auto m = memset_shape(loop);
    if (!m)
        precondition("loop is not a zero fill", loop.span);
    Expr dst = m->lo.is_int(0) ? Expr::var(m->array) : Expr::binary(BinaryOp::Add, Expr::var(m->array), m->lo);
    Expr bytes = Expr::binary(BinaryOp::Mul, fold_sub(m->hi, m->lo), Expr::sizeof_type(elem.unqualified()));
    Stmt out = Stmt::expression(Expr::call("memset", {std::move(dst), Expr::int_lit(0), std::move(bytes)}));
    set_spans(out, loop.span);
    return out;
}

FunctionDef rewrite_unsigned(const FunctionDef& fn, const std::string& var)
{
    FunctionDef out = fn;
    int found = 0;
    walk_stmts(out.body, [&](Stmt& s) {
        if (s.kind != StmtKind::VarDecl || s.decl->name != var)
            return;
        ++found;
        if (s.decl->type.base != BaseType::Int || s.decl->type.pointer_depth != 0 || s.decl->is_array())
            precondition(var + " is not a scalar int", s.span);
        s.decl->type.base = BaseType::UnsignedInt;
    });
    if (found != 1)
        precondition(var + " is not declared exactly once in " + fn.name, fn.span);
    return out;
}

const std::vector<RuleId>& auto_plan_order()
{
    static const std::vector<RuleId> order{RuleId::GLOBAL_REG_ALIAS, RuleId::FN_INLINE,      RuleId::NESTED_IF_MERGE,
                                           RuleId::BITWISE_CONV,     RuleId::MEMSET_INIT,    RuleId::LOOP_COUNTDOWN,
                                           RuleId::UNSIGNED_PROMOTE};
    return order;
}

namespace {

// Applies one freshly detected finding to `tu`; returns (before, after) text.
std::pair<std::string, std::string> apply_one(TranslationUnit& tu, const Finding& f)
{
    FunctionDef& fn = tu.functions.at(static_cast<std::size_t>(f.target.function));
    switch (f.rule) {
    case RuleId::LOOP_COUNTDOWN: {
        Stmt& s = stmt_at(fn, f.target.stmt_path);
        auto c = loop_shape(s);
        if (!c)
            precondition("loop no longer matches", s.span);
        std::string before = print_stmt(s);
        s = rewrite_countdown(s, *c);
        return {before, print_stmt(s)};
    }
    case RuleId::FN_INLINE: {
        Stmt& s = stmt_at(fn, f.target.stmt_path);
        const FunctionDef* callee = tu.find_function(f.payload.at("callee"));
        if (!callee)
            precondition("callee disappeared", s.span);
        std::string before = print_stmt(s);
        Stmt replacement = rewrite_inline(tu, s, *callee);
        Stmt& target = stmt_at(tu.functions.at(static_cast<std::size_t>(f.target.function)), f.target.stmt_path);
        target = std::move(replacement);
        return {before, print_stmt(target)};
    }
    case RuleId::GLOBAL_REG_ALIAS: {
        std::string before = print_function(fn);
        fn = rewrite_global_alias(tu, fn, f.payload.at("global"));
        return {before, print_function(fn)};
    }
    case RuleId::BITWISE_CONV: {
        Expr* e = &expr_slot(stmt_at(fn, f.target.stmt_path), f.target.slot);
        for (int i : f.target.expr_path)
            e = &e->args.at(static_cast<std::size_t>(i));
        std::string before = print_expr(*e);
        *e = rewrite_bitwise(*e);
        return {before, print_expr(*e)};
    }
    case RuleId::NESTED_IF_MERGE: {
        Stmt& s = stmt_at(fn, f.target.stmt_path);
        std::string before = print_stmt(s);
        s = rewrite_nested_if_merge(s);
        return {before, print_stmt(s)};
    }
    case RuleId::MEMSET_INIT: {
        Stmt& s = stmt_at(fn, f.target.stmt_path);
        auto m = memset_shape(s);
        auto arr = m ? resolve_array(tu, fn, m->array) : std::nullopt;
        if (!arr)
            precondition("fill target is not a known array", s.span);
        std::string before = print_stmt(s);
        s = rewrite_memset(s, arr->elem);
        return {before, print_stmt(s)};
    }
    case RuleId::UNSIGNED_PROMOTE: {
        const std::string& v = f.payload.at("var");
        std::string before;
        walk_stmts(fn.body, [&](const Stmt& s) {
            if (s.kind == StmtKind::VarDecl && s.decl->name == v)
                before = print_stmt(s);
        });
        fn = rewrite_unsigned(fn, v);
        std::string after;
        walk_stmts(fn.body, [&](const Stmt& s) {
            if (s.kind == StmtKind::VarDecl && s.decl->name == v)
                after = print_stmt(s);
        });
        return {before, after};
    }
    default: break;
    }
    precondition(std::string(to_string(f.rule)) + " is not rewritable", f.span);
}

} // namespace

RewriteResult apply_plan(const TranslationUnit& tu, const std::vector<Finding>& findings, bool allow_unsafe,
                         const AnalysisOptions& options)
{
    std::set<SourceSpan> spans;
    collect_spans(tu, spans);
    for (const auto& f : findings)
        if (!spans.count(f.span))
            throw Error(ErrorKind::SpanMismatch,
                        std::string(to_string(f.rule)) + " finding at " + to_string(f.span) + " is not in the unit");

    RewriteResult result{tu, {}};
    ChangeReport& report = result.report;
    for (const auto& f : findings) {
        if (is_advisory(f.rule)) {
            report.skipped.push_back({f, "NOT_REWRITABLE"});
            continue;
        }
        if (f.safety != Safety::Safe && !allow_unsafe) {
            report.skipped.push_back({f, "NEEDS_OVERRIDE"});
            continue;
        }
        std::vector<Finding> fresh = detect(result.tu, {f.rule}, options);
        auto match = std::find_if(fresh.begin(), fresh.end(), [&](const Finding& g) {
            return g.rule == f.rule && g.span == f.span && g.payload == f.payload;
        });
        if (match == fresh.end()) {
            report.skipped.push_back({f, "STALE_SPAN"});
            continue;
        }
        if (match->safety != Safety::Safe && !allow_unsafe) {
            report.skipped.push_back({f, "NEEDS_OVERRIDE"});
            continue;
        }
        auto [before, after] = apply_one(result.tu, *match);
        report.applied.push_back({*match, std::move(before), std::move(after)});
        report.functions_touched.insert(match->function);
    }
    return result;
}

RewriteResult auto_plan(const TranslationUnit& tu, const std::set<RuleId>& rules, bool allow_unsafe,
                        const AnalysisOptions& options)
{
    RewriteResult result{tu, {}};
    for (RuleId rule : auto_plan_order()) {
        if (!rules.count(rule))
            continue;
        std::vector<Finding> plan = detect(result.tu, {rule}, options);
        RewriteResult step = apply_plan(result.tu, plan, allow_unsafe, options);
        result.tu = std::move(step.tu);
        auto& r = result.report;
        r.applied.insert(r.applied.end(), step.report.applied.begin(), step.report.applied.end());
        r.skipped.insert(r.skipped.end(), step.report.skipped.begin(), step.report.skipped.end());
        r.functions_touched.insert(step.report.functions_touched.begin(), step.report.functions_touched.end());
    }
    return result;
}

namespace {

std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        out.push_back(line);
    return out;
}

} // namespace

std::string unified_diff(const std::string& before, const std::string& after, const std::string& before_name,
                         const std::string& after_name, int context)
{
    std::vector<std::string> a = split_lines(before), b = split_lines(after);
    const std::size_t n = a.size(), m = b.size();
    // lcs[i][j] = LCS length of a[i..] and b[j..]
    std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

    struct Op {
        char tag;
        std::size_t ai, bi;
    };
    std::vector<Op> ops;
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[i] == b[j]) {
            ops.push_back({' ', i++, j++});
        } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
            ops.push_back({'-', i++, j});
        } else {
            ops.push_back({'+', i, j++});
        }
    }
    if (std::all_of(ops.begin(), ops.end(), [](const Op& o) { return o.tag == ' '; }))
        return "";

    std::string out = "--- " + before_name + "\n+++ " + after_name + "\n";
    const auto ctx = static_cast<std::size_t>(std::max(context, 0));
    std::size_t k = 0;
    while (k < ops.size()) {
        if (ops[k].tag == ' ') {
            ++k;
            continue;
        }
        std::size_t start = k >= ctx ? k - ctx : 0;
        std::size_t end = k;
        // extend while the next change is within 2*ctx unchanged lines
        std::size_t last_change = k;
        for (std::size_t p = k; p < ops.size(); ++p) {
            if (ops[p].tag != ' ')
                last_change = p;
            else if (p - last_change > 2 * ctx)
                break;
        }
        end = std::min(ops.size(), last_change + ctx + 1);
        std::size_t a_start = ops[start].ai, b_start = ops[start].bi, a_len = 0, b_len = 0;
        std::string body;
        for (std::size_t p = start; p < end; ++p) {
            const Op& o = ops[p];
            if (o.tag == ' ') {
                body += " " + a[o.ai] + "\n";
                ++a_len;
                ++b_len;
            } else if (o.tag == '-') {
                body += "-" + a[o.ai] + "\n";
                ++a_len;
            } else {
                body += "+" + b[o.bi] + "\n";
                ++b_len;
            }
        }
        out += "@@ -" + std::to_string(a_len ? a_start + 1 : a_start) + "," + std::to_string(a_len) + " +" +
               std::to_string(b_len ? b_start + 1 : b_start) + "," + std::to_string(b_len) + " @@\n" + body;
        k = end;
    }
    return out;
}

std::string render_change_report(const ChangeReport& report, const TranslationUnit& before,
                                 const TranslationUnit& after)
{
    std::string out;
    auto where = [](const Finding& f) {
        return std::string(to_string(f.rule)) + " " + f.span.file + ":" + std::to_string(f.span.line_start) + " " +
               f.function;
    };
    out += "applied " + std::to_string(report.applied.size()) + ", skipped " + std::to_string(report.skipped.size()) +
           "\n";
    if (report.applied.empty())
        out += "no changes applied\n";
    for (const auto& a : report.applied)
        out += "APPLIED " + where(a.finding) + ": " + a.finding.rationale + "\n";
    for (const auto& s : report.skipped)
        out += "SKIPPED " + where(s.finding) + ": " + s.reason + "\n";
    std::string name = before.file.empty() ? "unit.c" : before.file;
    out += unified_diff(pretty_print(before), pretty_print(after), "a/" + name, "b/" + name);
    return out;
}

} // namespace hcopt
