#include "hcopt/analysis.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "hcopt/printer.hpp"
#include "local.hpp"

namespace hcopt {

namespace {

constexpr std::array<std::string_view, 12> kRuleNames{
    "LOOP_COUNTDOWN", "FN_INLINE",          "GLOBAL_REG_ALIAS",   "BITWISE_CONV",      "NESTED_IF_MERGE",
    "MEMSET_INIT",    "UNSIGNED_PROMOTE",   "ADV_RECURSION",      "ADV_MULTIDIM_ARRAY", "ADV_STATIC_LINKAGE",
    "ADV_TINY_FN_MACRO", "ADV_WORD_SIZE",
};

} // namespace

std::string_view to_string(RuleId r) { return kRuleNames[static_cast<std::size_t>(r)]; }

std::optional<RuleId> rule_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kRuleNames.size(); ++i)
        if (kRuleNames[i] == s)
            return static_cast<RuleId>(i);
    return std::nullopt;
}

bool is_advisory(RuleId r) { return static_cast<int>(r) >= static_cast<int>(RuleId::ADV_RECURSION); }

const std::vector<RuleId>& all_rules()
{
    static const std::vector<RuleId> rules = [] {
        std::vector<RuleId> out;
        for (std::size_t i = 0; i < kRuleNames.size(); ++i)
            out.push_back(static_cast<RuleId>(i));
        return out;
    }();
    return rules;
}

const std::vector<RuleId>& rewritable_rules()
{
    static const std::vector<RuleId> rules(all_rules().begin(), all_rules().begin() + 7);
    return rules;
}

std::string_view to_string(Safety s)
{
    switch (s) {
    case Safety::Safe: return "SAFE";
    case Safety::UnsafeNeedsOverride: return "UNSAFE_NEEDS_OVERRIDE";
    case Safety::Advisory: return "ADVISORY";
    }
    return "?";
}

bool mentions(const Expr& e, std::string_view name)
{
    bool found = false;
    walk_expr(e, [&](const Expr& x) {
        if ((x.kind == ExprKind::Var || x.kind == ExprKind::Call) && x.name == name)
            found = true;
    });
    return found;
}

bool mentions(const Stmt& s, std::string_view name)
{
    bool found = false;
    walk_stmts(s, [&](const Stmt& st) {
        if (st.kind == StmtKind::VarDecl && st.decl->name == name)
            found = true;
    });
    walk_all_exprs(s, [&](const Expr& x) {
        if ((x.kind == ExprKind::Var || x.kind == ExprKind::Call) && x.name == name)
            found = true;
    });
    return found;
}

std::set<std::string> identifiers(const TranslationUnit& tu)
{
    std::set<std::string> out;
    for (const auto& g : tu.globals)
        out.insert(g.decl.name);
    for (const auto& f : tu.functions) {
        out.insert(f.name);
        for (const auto& p : f.params)
            out.insert(p.name);
        walk_stmts(f.body, [&](const Stmt& s) {
            if (s.kind == StmtKind::VarDecl)
                out.insert(s.decl->name);
        });
        walk_all_exprs(f.body, [&](const Expr& e) {
            if (e.kind == ExprKind::Var || e.kind == ExprKind::Call)
                out.insert(e.name);
        });
    }
    return out;
}

const Stmt& stmt_at(const FunctionDef& fn, const std::vector<int>& path)
{
    const Stmt* s = &fn.body;
    for (int i : path)
        s = &s->body.at(static_cast<std::size_t>(i));
    return *s;
}

Stmt& stmt_at(FunctionDef& fn, const std::vector<int>& path)
{
    Stmt* s = &fn.body;
    for (int i : path)
        s = &s->body.at(static_cast<std::size_t>(i));
    return *s;
}

bool side_effect_free(const Expr& e, const TranslationUnit&)
{
    bool pure = true;
    walk_expr(e, [&](const Expr& x) {
        switch (x.kind) {
        case ExprKind::Assign:
        case ExprKind::PreInc:
        case ExprKind::PreDec:
        case ExprKind::PostInc:
        case ExprKind::PostDec:
        case ExprKind::Call: pure = false; break;
        default: break;
        }
    });
    return pure;
}

bool is_boolean_valued(const Expr& e)
{
    if (e.kind == ExprKind::Unary)
        return e.unary_op == UnaryOp::Not;
    if (e.kind == ExprKind::Binary)
        return is_comparison(e.binary_op) || is_logical(e.binary_op);
    return false;
}

namespace detail {

bool writes_var(const Expr& e, std::string_view v)
{
    bool w = false;
    walk_expr(e, [&](const Expr& x) {
        switch (x.kind) {
        case ExprKind::Assign:
        case ExprKind::PreInc:
        case ExprKind::PreDec:
        case ExprKind::PostInc:
        case ExprKind::PostDec:
            if (x.args[0].is_var(v))
                w = true;
            break;
        default: break;
        }
    });
    return w;
}

bool writes_var(const Stmt& s, std::string_view v)
{
    bool w = false;
    walk_all_exprs(s, [&](const Expr& x) {
        if (!w && (x.kind == ExprKind::Assign || x.kind == ExprKind::PreInc || x.kind == ExprKind::PreDec ||
                   x.kind == ExprKind::PostInc || x.kind == ExprKind::PostDec))
            w = x.args[0].is_var(v);
    });
    return w;
}

bool address_taken(const Stmt& s, std::string_view v)
{
    bool taken = false;
    walk_all_exprs(s, [&](const Expr& x) {
        if (x.kind == ExprKind::AddrOf && x.operand().is_var(v))
            taken = true;
    });
    return taken;
}

bool declares(const Stmt& s, std::string_view v)
{
    bool d = false;
    walk_stmts(s, [&](const Stmt& st) {
        if (st.kind == StmtKind::VarDecl && st.decl->name == v)
            d = true;
    });
    return d;
}

bool has_user_call(const Stmt& s, const TranslationUnit& tu)
{
    bool c = false;
    walk_all_exprs(s, [&](const Expr& x) {
        if (x.kind == ExprKind::Call && tu.find_function(x.name))
            c = true;
    });
    return c;
}

std::set<std::string> local_names(const FunctionDef& fn)
{
    std::set<std::string> out;
    for (const auto& p : fn.params)
        out.insert(p.name);
    walk_stmts(fn.body, [&](const Stmt& s) {
        if (s.kind == StmtKind::VarDecl)
            out.insert(s.decl->name);
    });
    return out;
}

const VarDecl* find_local_decl(const FunctionDef& fn, std::string_view name)
{
    const VarDecl* found = nullptr;
    int n = 0;
    walk_stmts(fn.body, [&](const Stmt& s) {
        if (s.kind == StmtKind::VarDecl && s.decl->name == name) {
            found = &*s.decl;
            ++n;
        }
    });
    return n == 1 ? found : nullptr;
}

std::optional<CType> var_type(const TranslationUnit& tu, const FunctionDef& fn, std::string_view name, bool* is_array)
{
    if (is_array)
        *is_array = false;
    for (const auto& p : fn.params)
        if (p.name == name)
            return p.type;
    if (const VarDecl* d = find_local_decl(fn, name)) {
        if (is_array)
            *is_array = d->is_array();
        return d->type;
    }
    if (local_names(fn).count(std::string(name)))
        return std::nullopt;
    if (const GlobalDecl* g = tu.find_global(name)) {
        if (is_array)
            *is_array = g->decl.is_array();
        return g->decl.type;
    }
    return std::nullopt;
}

Expr fold_add(Expr e, std::int64_t k)
{
    if (k == 0)
        return e;
    if (e.kind == ExprKind::IntLit)
        return Expr::int_lit(e.value + k, e.span);
    if (e.kind == ExprKind::Binary && e.rhs().kind == ExprKind::IntLit &&
        (e.binary_op == BinaryOp::Add || e.binary_op == BinaryOp::Sub)) {
        std::int64_t c = e.binary_op == BinaryOp::Add ? e.rhs().value : -e.rhs().value;
        Expr base = std::move(e.lhs());
        return fold_add(std::move(base), c + k);
    }
    if (k > 0)
        return Expr::binary(BinaryOp::Add, std::move(e), Expr::int_lit(k));
    return Expr::binary(BinaryOp::Sub, std::move(e), Expr::int_lit(-k));
}

Expr fold_sub(Expr b, const Expr& a)
{
    if (a.kind == ExprKind::IntLit)
        return fold_add(std::move(b), -a.value);
    return Expr::binary(BinaryOp::Sub, std::move(b), a);
}

std::vector<FunctionRef> all_stmts(const TranslationUnit& tu)
{
    std::vector<FunctionRef> out;
    for (std::size_t f = 0; f < tu.functions.size(); ++f) {
        std::vector<int> path;
        std::vector<const Stmt*> chain;
        std::function<void(const Stmt&)> rec = [&](const Stmt& s) {
            out.push_back({static_cast<int>(f), path, &s, chain});
            chain.push_back(&s);
            for (std::size_t i = 0; i < s.body.size(); ++i) {
                path.push_back(static_cast<int>(i));
                rec(s.body[i]);
                path.pop_back();
            }
            chain.pop_back();
        };
        rec(tu.functions[f].body);
    }
    return out;
}

} // namespace detail

using namespace detail;

std::optional<CanonicalLoop> loop_shape(const Stmt& s)
{
    if (s.kind != StmtKind::For || !s.init || !s.expr || !s.step)
        return std::nullopt;
    const Expr& init = *s.init;
    if (init.kind != ExprKind::Assign || init.assign_op != AssignOp::Assign || init.lhs().kind != ExprKind::Var)
        return std::nullopt;
    CanonicalLoop c;
    c.var = init.lhs().name;
    c.init = init.rhs();

    const Expr& step = *s.step;
    int dir = 0;
    if ((step.kind == ExprKind::PostInc || step.kind == ExprKind::PreInc) && step.operand().is_var(c.var))
        dir = 1;
    else if ((step.kind == ExprKind::PostDec || step.kind == ExprKind::PreDec) && step.operand().is_var(c.var))
        dir = -1;
    else if (step.kind == ExprKind::Assign && step.lhs().is_var(c.var) && step.rhs().is_int(1) &&
             (step.assign_op == AssignOp::Add || step.assign_op == AssignOp::Sub))
        dir = step.assign_op == AssignOp::Add ? 1 : -1;
    else if (step.kind == ExprKind::Assign && step.assign_op == AssignOp::Assign && step.lhs().is_var(c.var) &&
             step.rhs().kind == ExprKind::Binary && step.rhs().lhs().is_var(c.var) && step.rhs().rhs().is_int(1) &&
             (step.rhs().binary_op == BinaryOp::Add || step.rhs().binary_op == BinaryOp::Sub))
        dir = step.rhs().binary_op == BinaryOp::Add ? 1 : -1;
    if (dir == 0)
        return std::nullopt;

    const Expr& cond = *s.expr;
    if (cond.kind != ExprKind::Binary || !cond.lhs().is_var(c.var))
        return std::nullopt;
    BinaryOp op = cond.binary_op;
    if (dir > 0 && (op == BinaryOp::Lt || op == BinaryOp::Le)) {
        c.dir = LoopDir::Up;
        c.inclusive = op == BinaryOp::Le;
    } else if (dir < 0 && (op == BinaryOp::Gt || op == BinaryOp::Ge)) {
        c.dir = LoopDir::Down;
        c.inclusive = op == BinaryOp::Ge;
    } else {
        return std::nullopt;
    }
    c.bound = cond.rhs();
    c.step1 = true;

    const Stmt& body = s.loop_body();
    c.var_written_in_body = writes_var(body, c.var) || address_taken(body, c.var);
    bool invariant = !mentions(c.bound, c.var) && side_effect_free(c.bound, {});
    walk_expr(c.bound, [&](const Expr& x) {
        if (x.kind == ExprKind::Var && writes_var(body, x.name))
            invariant = false;
    });
    c.bound_loop_invariant = invariant;
    return c;
}

namespace {

using detail::FunctionRef;

struct Context {
    const TranslationUnit& tu;
    const AnalysisOptions& options;
    std::map<std::string, std::set<std::string>> reach; // user functions reachable by calls
    std::set<std::string> recursive;
    std::vector<FunctionRef> stmts;

    Context(const TranslationUnit& t, const AnalysisOptions& o) : tu(t), options(o)
    {
        std::map<std::string, std::set<std::string>> direct;
        for (const auto& f : tu.functions) {
            auto& d = direct[f.name];
            walk_all_exprs(f.body, [&](const Expr& e) {
                if (e.kind == ExprKind::Call && tu.find_function(e.name))
                    d.insert(e.name);
            });
        }
        for (const auto& f : tu.functions) {
            std::set<std::string> seen;
            std::vector<std::string> work(direct[f.name].begin(), direct[f.name].end());
            while (!work.empty()) {
                std::string n = work.back();
                work.pop_back();
                if (!seen.insert(n).second)
                    continue;
                for (const auto& m : direct[n])
                    work.push_back(m);
            }
            if (seen.count(f.name))
                recursive.insert(f.name);
            reach[f.name] = std::move(seen);
        }
        stmts = all_stmts(tu);
    }

    // Does calling `callee` (or anything it calls) touch `global`?
    bool call_touches(const std::string& callee, const std::string& global) const
    {
        auto check = [&](const std::string& name) {
            const FunctionDef* f = tu.find_function(name);
            return f && mentions(f->body, global);
        };
        if (check(callee))
            return true;
        auto it = reach.find(callee);
        if (it != reach.end())
            for (const auto& n : it->second)
                if (check(n))
                    return true;
        return false;
    }

    bool in_loop(const FunctionRef& r) const
    {
        return std::any_of(r.chain.begin(), r.chain.end(), [](const Stmt* s) { return s->is_loop(); });
    }

    Finding make(RuleId rule, const SourceSpan& span, int fn, Safety safety, std::string rationale) const
    {
        Finding f;
        f.rule = rule;
        f.span = span;
        f.function = fn >= 0 ? tu.functions[static_cast<std::size_t>(fn)].name : "<global>";
        f.safety = safety;
        f.rationale = std::move(rationale);
        f.target.function = fn;
        return f;
    }
};

// Scans `list` from `from` for the first event on `v`.
enum class Scan { Killed, Used, Through };

bool kills(const Stmt& s, const std::string& v)
{
    auto plain_write = [&](const Expr& e) {
        return e.kind == ExprKind::Assign && e.assign_op == AssignOp::Assign && e.lhs().is_var(v) &&
               !mentions(e.rhs(), v);
    };
    if (s.kind == StmtKind::Expr && plain_write(*s.expr))
        return true;
    if (s.kind == StmtKind::For && s.init && plain_write(*s.init))
        return true;
    return s.kind == StmtKind::Return && !(s.expr && mentions(*s.expr, v));
}

Scan scan_list(const std::vector<Stmt>& list, std::size_t from, const std::string& v)
{
    for (std::size_t i = from; i < list.size(); ++i) {
        if (kills(list[i], v))
            return Scan::Killed;
        if (mentions(list[i], v))
            return Scan::Used;
    }
    return Scan::Through;
}

} // namespace

namespace detail {

bool dead_after(const FunctionDef& fn, const std::vector<int>& path, const std::string& v)
{
    for (std::size_t depth = path.size(); depth-- > 0;) {
        std::vector<int> prefix(path.begin(), path.begin() + static_cast<long>(depth));
        const Stmt& parent = stmt_at(fn, prefix);
        const auto idx = static_cast<std::size_t>(path[depth]);
        if (parent.kind == StmtKind::Block) {
            Scan r = scan_list(parent.body, idx + 1, v);
            if (r == Scan::Killed)
                return true;
            if (r == Scan::Used)
                return false;
        } else if (parent.is_loop()) {
            if ((parent.expr && mentions(*parent.expr, v)) || (parent.step && mentions(*parent.step, v)))
                return false;
            if (scan_list(parent.loop_body().body, 0, v) != Scan::Killed)
                return false;
        }
    }
    return true;
}

} // namespace detail

namespace {

// Every value `e` can take, when it depends only on literals and on
// parameters that receive literals at every call site.
struct ValueSpace {
    const Context& ctx;
    const FunctionDef& fn;

    std::optional<std::vector<std::int64_t>> param_values(const std::string& p) const
    {
        std::size_t index = 0;
        bool found = false;
        for (std::size_t i = 0; i < fn.params.size(); ++i)
            if (fn.params[i].name == p) {
                index = i;
                found = true;
            }
        if (!found || writes_var(fn.body, p) || address_taken(fn.body, p))
            return std::nullopt;
        std::vector<std::int64_t> vals;
        bool ok = true;
        for (const auto& caller : ctx.tu.functions)
            walk_all_exprs(caller.body, [&](const Expr& e) {
                if (e.kind != ExprKind::Call || e.name != fn.name)
                    return;
                if (e.args.size() <= index)
                    ok = false;
                else if (e.args[index].kind == ExprKind::IntLit || e.args[index].kind == ExprKind::CharLit)
                    vals.push_back(e.args[index].value);
                else
                    ok = false;
            });
        if (!ok || vals.empty())
            return std::nullopt;
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        return vals;
    }

    static std::optional<std::int64_t> eval(const Expr& e, const std::map<std::string, std::int64_t>& env)
    {
        switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::CharLit: return e.value;
        case ExprKind::Var: {
            auto it = env.find(e.name);
            if (it == env.end())
                return std::nullopt;
            return it->second;
        }
        case ExprKind::Unary:
            if (e.unary_op == UnaryOp::Neg)
                if (auto v = eval(e.operand(), env))
                    return -*v;
            return std::nullopt;
        case ExprKind::Binary: {
            auto l = eval(e.lhs(), env);
            auto r = eval(e.rhs(), env);
            if (!l || !r)
                return std::nullopt;
            switch (e.binary_op) {
            case BinaryOp::Add: return *l + *r;
            case BinaryOp::Sub: return *l - *r;
            case BinaryOp::Mul: return *l * *r;
            case BinaryOp::Div: return *r ? std::optional<std::int64_t>(*l / *r) : std::nullopt;
            default: return std::nullopt;
            }
        }
        default: return std::nullopt;
        }
    }

    // True when `pred` holds for every reachable assignment of the parameters.
    bool for_all(const std::vector<const Expr*>& exprs,
                 const std::function<bool(const std::vector<std::int64_t>&)>& pred) const
    {
        std::vector<std::string> names;
        for (const Expr* e : exprs)
            walk_expr(*e, [&](const Expr& x) {
                if (x.kind == ExprKind::Var && std::find(names.begin(), names.end(), x.name) == names.end())
                    names.push_back(x.name);
            });
        std::vector<std::vector<std::int64_t>> domains;
        std::size_t combos = 1;
        for (const auto& n : names) {
            auto vals = param_values(n);
            if (!vals)
                return false;
            combos *= vals->size();
            if (combos > 4096)
                return false;
            domains.push_back(std::move(*vals));
        }
        std::vector<std::size_t> idx(names.size(), 0);
        for (std::size_t c = 0; c < combos; ++c) {
            std::map<std::string, std::int64_t> env;
            for (std::size_t i = 0; i < names.size(); ++i)
                env[names[i]] = domains[i][idx[i]];
            std::vector<std::int64_t> vals;
            for (const Expr* e : exprs) {
                auto v = eval(*e, env);
                if (!v)
                    return false;
                vals.push_back(*v);
            }
            if (!pred(vals))
                return false;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                if (++idx[i] < domains[i].size())
                    break;
                idx[i] = 0;
            }
        }
        return true;
    }
};

bool any_pointer_write(const Stmt& body, const TranslationUnit& tu, const FunctionDef& fn, const std::string& except)
{
    auto safe_base = [&](const Expr& base) {
        if (base.kind != ExprKind::Var)
            return false;
        if (base.name == except)
            return true;
        bool is_array = false;
        auto t = var_type(tu, fn, base.name, &is_array);
        return (t && is_array) || resolve_array(tu, fn, base.name).has_value();
    };
    bool w = false;
    walk_all_exprs(body, [&](const Expr& x) {
        const Expr* target = nullptr;
        if (x.kind == ExprKind::Assign || x.kind == ExprKind::PreInc || x.kind == ExprKind::PreDec ||
            x.kind == ExprKind::PostInc || x.kind == ExprKind::PostDec)
            target = &x.args[0];
        if (target) {
            if (target->kind == ExprKind::Deref)
                w = true;
            else if (target->kind == ExprKind::Index) {
                const Expr* base = target;
                while (base->kind == ExprKind::Index)
                    base = &base->args[0];
                if (!safe_base(*base))
                    w = true;
            }
        }
        if (x.kind == ExprKind::Call && (x.name == "sprintf" || x.name == "memset") && !x.args.empty() &&
            !safe_base(x.args[0]))
            w = true;
    });
    return w;
}

int count_statements(const Stmt& s)
{
    int n = 0;
    walk_stmts(s, [&](const Stmt& st) {
        if (st.kind == StmtKind::Block)
            return;
        if (st.kind == StmtKind::VarDecl && !st.decl->init)
            return;
        ++n;
    });
    return n;
}

bool only_trailing_return(const FunctionDef& f)
{
    int returns = 0;
    walk_stmts(f.body, [&](const Stmt& s) {
        if (s.kind == StmtKind::Return)
            ++returns;
    });
    if (returns == 0)
        return true;
    return returns == 1 && !f.body.body.empty() && f.body.body.back().kind == StmtKind::Return;
}

bool has_static_local(const FunctionDef& f)
{
    bool st = false;
    walk_stmts(f.body, [&](const Stmt& s) {
        if (s.kind == StmtKind::VarDecl && s.decl->is_static)
            st = true;
    });
    return st;
}

// Globals a function refers to by name, excluding names it declares itself.
std::set<std::string> free_globals(const TranslationUnit& tu, const FunctionDef& f)
{
    std::set<std::string> locals = local_names(f);
    std::set<std::string> out;
    walk_all_exprs(f.body, [&](const Expr& e) {
        if (e.kind == ExprKind::Var && !locals.count(e.name) && tu.find_global(e.name))
            out.insert(e.name);
    });
    return out;
}

bool risky_operand(const Expr& e)
{
    bool risky = false;
    walk_expr(e, [&](const Expr& x) {
        if (x.kind == ExprKind::Index || x.kind == ExprKind::Deref)
            risky = true;
        if (x.kind == ExprKind::Binary && (x.binary_op == BinaryOp::Div || x.binary_op == BinaryOp::Mod))
            risky = true;
    });
    return risky;
}

void detect_countdown(const Context& ctx, std::vector<Finding>& out)
{
    for (const auto& r : ctx.stmts) {
        const Stmt& s = *r.stmt;
        auto c = loop_shape(s);
        if (!c || c->dir != LoopDir::Up || c->var_written_in_body || mentions(c->bound, c->var) ||
            mentions(c->init, c->var))
            continue;
        const FunctionDef& fn = ctx.tu.functions[static_cast<std::size_t>(r.function)];
        if (declares(s.loop_body(), c->var))
            continue;
        bool is_array = false;
        auto vt = var_type(ctx.tu, fn, c->var, &is_array);
        if (!vt || is_array || vt->is_pointer() || (vt->base != BaseType::Int && vt->base != BaseType::UnsignedInt))
            continue;

        std::string why;
        if (!local_names(fn).count(c->var))
            why = "loop variable " + c->var + " is global";
        else if (address_taken(fn.body, c->var))
            why = "address of " + c->var + " is taken";
        if (why.empty() && (!side_effect_free(c->init, ctx.tu) || !side_effect_free(c->bound, ctx.tu)))
            why = "loop bounds have side effects";
        if (why.empty()) {
            walk_expr(c->bound, [&](const Expr& x) {
                if (x.kind != ExprKind::Var || !why.empty())
                    return;
                bool local = local_names(fn).count(x.name) > 0;
                if (writes_var(s.loop_body(), x.name))
                    why = "bound changes inside the loop";
                else if (local && address_taken(fn.body, x.name))
                    why = "bound variable " + x.name + " has its address taken";
                else if (!local && (has_user_call(s.loop_body(), ctx.tu) ||
                                    any_pointer_write(s.loop_body(), ctx.tu, fn, "")))
                    why = "global bound " + x.name + " may change inside the loop";
            });
        }
        if (why.empty() && !dead_after(fn, r.path, c->var))
            why = c->var + " is read after the loop";
        if (why.empty()) {
            ValueSpace vs{ctx, fn};
            bool inclusive = c->inclusive;
            if (!vs.for_all({&c->init, &c->bound}, [&](const std::vector<std::int64_t>& v) {
                    return (inclusive ? v[1] + 1 : v[1]) >= v[0];
                }))
                why = "trip count not provably non-negative";
        }
        Finding f = ctx.make(RuleId::LOOP_COUNTDOWN, s.span, r.function,
                             why.empty() ? Safety::Safe : Safety::UnsafeNeedsOverride,
                             why.empty() ? "count " + c->var + " down to zero" : why);
        f.payload["var"] = c->var;
        f.payload["bound"] = print_expr(c->bound);
        f.target.stmt_path = r.path;
        out.push_back(std::move(f));
    }
}

void detect_inline(const Context& ctx, std::vector<Finding>& out)
{
    for (const auto& r : ctx.stmts) {
        const Stmt& s = *r.stmt;
        if (s.kind != StmtKind::Expr || s.expr->kind != ExprKind::Call || !ctx.in_loop(r))
            continue;
        const Expr& call = *s.expr;
        const FunctionDef* callee = ctx.tu.find_function(call.name);
        const FunctionDef& caller = ctx.tu.functions[static_cast<std::size_t>(r.function)];
        if (!callee || callee->name == caller.name || ctx.recursive.count(callee->name))
            continue;
        if (has_static_local(*callee) || call.args.size() != callee->params.size())
            continue;
        if (static_cast<int>(callee->params.size()) > ctx.options.max_inline_params ||
            count_statements(callee->body) > ctx.options.max_inline_statements || !only_trailing_return(*callee))
            continue;
        bool shadowed_param = false;
        for (const auto& p : callee->params)
            if (declares(callee->body, p.name))
                shadowed_param = true;
        if (shadowed_param)
            continue;
        std::set<std::string> caller_locals = local_names(caller);
        bool captured = false;
        for (const auto& g : free_globals(ctx.tu, *callee))
            if (caller_locals.count(g))
                captured = true;
        if (captured)
            continue;
        Finding f = ctx.make(RuleId::FN_INLINE, s.span, r.function, Safety::Safe,
                             "inline " + callee->name + " into the loop in " + caller.name);
        f.payload["callee"] = callee->name;
        f.target.stmt_path = r.path;
        out.push_back(std::move(f));
    }
}

void detect_global_alias(const Context& ctx, std::vector<Finding>& out)
{
    for (std::size_t fi = 0; fi < ctx.tu.functions.size(); ++fi) {
        const FunctionDef& fn = ctx.tu.functions[fi];
        std::set<std::string> locals = local_names(fn);
        for (const auto& gd : ctx.tu.globals) {
            const std::string& g = gd.decl.name;
            if (locals.count(g) || gd.decl.dims.size() > 1)
                continue;
            int uses = 0;
            bool in_loop = false;
            for (const auto& r : ctx.stmts) {
                if (r.function != static_cast<int>(fi))
                    continue;
                int here = 0;
                for_each_own_expr(*r.stmt, [&](const Expr& e) {
                    walk_expr(e, [&](const Expr& x) {
                        if (x.is_var(g))
                            ++here;
                    });
                });
                uses += here;
                if (here > 0 && (ctx.in_loop(r) || r.stmt->is_loop()))
                    in_loop = true;
            }
            if (uses < 2 || !in_loop)
                continue;
            std::string why;
            walk_all_exprs(fn.body, [&](const Expr& x) {
                if (!why.empty())
                    return;
                if (x.kind == ExprKind::AddrOf && x.operand().is_var(g))
                    why = "address of " + g + " is taken";
                else if (x.kind == ExprKind::Call && ctx.tu.find_function(x.name) && ctx.call_touches(x.name, g))
                    why = "called function " + x.name + " uses " + g;
            });
            if (why.empty() && any_pointer_write(fn.body, ctx.tu, fn, g))
                why = "pointer writes in " + fn.name + " may alias " + g;
            if (why.empty() && !gd.decl.is_array())
                walk_stmts(fn.body, [&](const Stmt& s) {
                    if (s.kind == StmtKind::Return && s.expr && mentions(*s.expr, g))
                        why = "a return value uses " + g;
                });
            Finding f = ctx.make(RuleId::GLOBAL_REG_ALIAS, fn.span, static_cast<int>(fi),
                                 why.empty() ? Safety::Safe : Safety::UnsafeNeedsOverride,
                                 why.empty() ? "keep " + g + " in a register local (" + std::to_string(uses) + " uses)"
                                             : why);
            f.payload["global"] = g;
            out.push_back(std::move(f));
        }
    }
}

void detect_bitwise(const Context& ctx, std::vector<Finding>& out)
{
    for (const auto& r : ctx.stmts) {
        auto visit_slot = [&](const Expr& root, int slot_id) {
            std::vector<int> epath;
            std::function<void(const Expr&)> rec = [&](const Expr& e) {
                if (e.kind == ExprKind::Binary && is_logical(e.binary_op)) {
                    bool pure = side_effect_free(e.lhs(), ctx.tu) && side_effect_free(e.rhs(), ctx.tu);
                    bool risky = risky_operand(e.rhs());
                    std::string why = !pure ? "an operand has side effects"
                                      : risky ? "right operand would run unconditionally and may fault"
                                              : "";
                    Finding f = ctx.make(RuleId::BITWISE_CONV, e.span, r.function,
                                         why.empty() ? Safety::Safe : Safety::UnsafeNeedsOverride,
                                         why.empty() ? std::string("replace ") + std::string(spelling(e.binary_op)) +
                                                           " with " +
                                                           (e.binary_op == BinaryOp::LogAnd ? "&" : "|")
                                                     : why);
                    f.payload["op"] = std::string(spelling(e.binary_op));
                    f.target.stmt_path = r.path;
                    f.target.slot = slot_id;
                    f.target.expr_path = epath;
                    out.push_back(std::move(f));
                }
                for (std::size_t i = 0; i < e.args.size(); ++i) {
                    epath.push_back(static_cast<int>(i));
                    rec(e.args[i]);
                    epath.pop_back();
                }
            };
            rec(root);
        };
        const Stmt& s = *r.stmt;
        if (s.kind == StmtKind::For && s.init)
            visit_slot(*s.init, 0);
        if (s.expr)
            visit_slot(*s.expr, 1);
        if (s.kind == StmtKind::For && s.step)
            visit_slot(*s.step, 2);
        if (s.kind == StmtKind::VarDecl && s.decl->init)
            visit_slot(*s.decl->init, 3);
    }
}

// Nested ifs without else, outermost first: the conditions of the chain.
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

void detect_if_merge(const Context& ctx, std::vector<Finding>& out)
{
    for (const auto& r : ctx.stmts) {
        const Stmt& s = *r.stmt;
        auto chain = if_chain(s);
        if (chain.size() < 2)
            continue;
        // an inner link of a longer chain is covered by the outermost if
        if (r.chain.size() >= 2) {
            const Stmt* block = r.chain.back();
            const Stmt* parent = r.chain[r.chain.size() - 2];
            if (block->body.size() == 1 && parent->kind == StmtKind::If && !parent->else_branch() &&
                &parent->then_branch() == block)
                continue;
        }
        std::string why;
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const Expr& c = *chain[i]->expr;
            if (!side_effect_free(c, ctx.tu))
                why = "a condition has side effects";
            else if (i > 0 && risky_operand(c) && why.empty())
                why = "inner condition would run unconditionally and may fault";
        }
        Finding f = ctx.make(RuleId::NESTED_IF_MERGE, s.span, r.function,
                             why.empty() ? Safety::Safe : Safety::UnsafeNeedsOverride,
                             why.empty() ? "merge " + std::to_string(chain.size()) + " nested ifs" : why);
        f.payload["depth"] = std::to_string(chain.size());
        f.target.stmt_path = r.path;
        out.push_back(std::move(f));
    }
}

} // namespace

namespace detail {

std::optional<ArrayInfo> resolve_array(const TranslationUnit& tu, const FunctionDef& fn, const std::string& name)
{
    auto from_decl = [](const VarDecl& d) -> std::optional<ArrayInfo> {
        if (d.dims.size() != 1 || d.type.is_pointer())
            return std::nullopt;
        return ArrayInfo{d.type, d.dims[0]};
    };
    std::set<std::string> locals = local_names(fn);
    if (!locals.count(name)) {
        const GlobalDecl* g = tu.find_global(name);
        return g ? from_decl(g->decl) : std::nullopt;
    }
    const VarDecl* d = find_local_decl(fn, name);
    if (!d)
        return std::nullopt;
    if (d->is_array())
        return from_decl(*d);
    // a pointer local that only ever holds a global array's address
    if (d->type.pointer_depth == 1 && d->init && d->init->kind == ExprKind::Var && !locals.count(d->init->name) &&
        !writes_var(fn.body, name) && !address_taken(fn.body, name)) {
        const GlobalDecl* g = tu.find_global(d->init->name);
        if (g && g->decl.type.unqualified() == d->type.pointee().unqualified())
            return from_decl(g->decl);
    }
    return std::nullopt;
}

std::optional<MemsetShape> memset_shape(const Stmt& s)
{
    auto c = loop_shape(s);
    if (!c || c->dir != LoopDir::Up)
        return std::nullopt;
    const Stmt& body = s.loop_body();
    if (body.body.size() != 1 || body.body[0].kind != StmtKind::Expr)
        return std::nullopt;
    const Expr& e = *body.body[0].expr;
    if (e.kind != ExprKind::Assign || e.assign_op != AssignOp::Assign || e.lhs().kind != ExprKind::Index)
        return std::nullopt;
    const Expr& idx = e.lhs();
    if (idx.args[0].kind != ExprKind::Var || !idx.args[1].is_var(c->var) || idx.args[0].name == c->var)
        return std::nullopt;
    if (!((e.rhs().kind == ExprKind::IntLit || e.rhs().kind == ExprKind::CharLit) && e.rhs().value == 0))
        return std::nullopt;
    MemsetShape m;
    m.array = idx.args[0].name;
    m.var = c->var;
    m.lo = c->init;
    m.hi = c->inclusive ? fold_add(c->bound, 1) : c->bound;
    return m;
}

} // namespace detail

namespace {

void detect_memset(const Context& ctx, std::vector<Finding>& out)
{
    for (const auto& r : ctx.stmts) {
        auto m = memset_shape(*r.stmt);
        if (!m)
            continue;
        const FunctionDef& fn = ctx.tu.functions[static_cast<std::size_t>(r.function)];
        auto arr = resolve_array(ctx.tu, fn, m->array);
        if (!arr || (arr->elem.base != BaseType::Int && arr->elem.base != BaseType::UnsignedInt &&
                     arr->elem.base != BaseType::Char))
            continue;
        std::string why;
        if (!side_effect_free(m->lo, ctx.tu) || !side_effect_free(m->hi, ctx.tu))
            why = "loop bounds have side effects";
        else if (m->lo.kind != ExprKind::IntLit || m->hi.kind != ExprKind::IntLit)
            why = "fill range is not constant";
        else if (m->lo.value < 0 || m->lo.value > m->hi.value || m->hi.value > arr->extent)
            why = "fill range is outside " + m->array;
        else if (!dead_after(fn, r.path, m->var))
            why = m->var + " is read after the loop";
        Finding f = ctx.make(RuleId::MEMSET_INIT, r.stmt->span, r.function,
                             why.empty() ? Safety::Safe : Safety::UnsafeNeedsOverride,
                             why.empty() ? "zero " + m->array + " with memset" : why);
        f.payload["array"] = m->array;
        f.target.stmt_path = r.path;
        out.push_back(std::move(f));
    }
}

// Conservative non-negativity dataflow for UNSIGNED_PROMOTE.
struct Promote {
    const TranslationUnit& tu;
    const FunctionDef& fn;
    std::set<std::string> qualifying;

    bool nonneg(const Expr& e) const
    {
        switch (e.kind) {
        case ExprKind::IntLit: return e.value >= 0 && e.value <= 2147483647;
        case ExprKind::CharLit:
        case ExprKind::SizeofType: return true;
        case ExprKind::Var: {
            if (qualifying.count(e.name))
                return true;
            auto t = var_type(tu, fn, e.name, nullptr);
            return t && t->base == BaseType::UnsignedInt && !t->is_pointer();
        }
        case ExprKind::Call: return e.name == "rand" || e.name == "strlen";
        case ExprKind::Binary:
            return (e.binary_op == BinaryOp::Add || e.binary_op == BinaryOp::Mul || e.binary_op == BinaryOp::Div ||
                    e.binary_op == BinaryOp::Mod) &&
                   nonneg(e.lhs()) && nonneg(e.rhs());
        default: return false;
        }
    }

    bool writes_ok(const std::string& v) const
    {
        bool ok = true;
        walk_all_exprs(fn.body, [&](const Expr& x) {
            if (!ok)
                return;
            switch (x.kind) {
            case ExprKind::Assign:
                if (x.lhs().is_var(v))
                    ok = x.assign_op != AssignOp::Sub && nonneg(x.rhs());
                break;
            case ExprKind::PreDec:
            case ExprKind::PostDec:
                if (x.operand().is_var(v))
                    ok = false;
                break;
            case ExprKind::AddrOf:
                if (x.operand().is_var(v))
                    ok = false;
                break;
            default: break;
            }
        });
        return ok;
    }

    struct Taint {
        bool tainted = false;
        bool may_wrap = false;
    };

    // Walks `e`, tracking where v's unsignedness flows; sets `why` when a
    // comparison, division or address computation could change meaning.
    Taint flow(const Expr& e, const std::string& v, std::string& why) const
    {
        auto sub = [&](std::size_t i) { return flow(e.args[i], v, why); };
        switch (e.kind) {
        case ExprKind::Var: return {e.name == v, false};
        case ExprKind::PreInc:
        case ExprKind::PostInc:
        case ExprKind::PreDec:
        case ExprKind::PostDec:
            sub(0);
            return {e.operand().is_var(v), false};
        case ExprKind::Unary: {
            Taint t = sub(0);
            if (e.unary_op == UnaryOp::Not)
                return {};
            return {t.tainted, t.tainted};
        }
        case ExprKind::Binary: {
            Taint l = sub(0), r = sub(1);
            bool any = l.tainted || r.tainted;
            bool wrap = l.may_wrap || r.may_wrap;
            BinaryOp op = e.binary_op;
            if (!any)
                return {};
            auto other_ok = [&] {
                const Expr& other = l.tainted ? e.rhs() : e.lhs();
                return (l.tainted && r.tainted) || nonneg(other);
            };
            switch (op) {
            case BinaryOp::Eq:
            case BinaryOp::Ne:
            case BinaryOp::LogAnd:
            case BinaryOp::LogOr: return {};
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
                if (why.empty() && (wrap || !other_ok()))
                    why = "comparison of " + v + " with a possibly negative value";
                return {};
            case BinaryOp::Div:
            case BinaryOp::Mod:
            case BinaryOp::Shr:
                if (why.empty() && (wrap || !other_ok()))
                    why = "division or shift of " + v + " by a possibly negative value";
                return {true, false};
            case BinaryOp::Sub: return {true, true};
            case BinaryOp::Add: {
                const Expr& other = l.tainted ? e.rhs() : e.lhs();
                bool is_array = false;
                auto t = other.kind == ExprKind::Var ? var_type(tu, fn, other.name, &is_array) : std::nullopt;
                if (why.empty() && wrap && t && (t->is_pointer() || is_array))
                    why = "pointer offset derived from " + v + " may wrap";
                return {true, wrap};
            }
            default: return {true, wrap};
            }
        }
        case ExprKind::Index: {
            sub(0);
            Taint i = sub(1);
            if (why.empty() && i.tainted && i.may_wrap)
                why = "index derived from " + v + " may wrap";
            return {};
        }
        case ExprKind::Call:
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                Taint t = sub(i);
                if (why.empty() && t.tainted && t.may_wrap)
                    why = "argument derived from " + v + " may wrap";
            }
            return {};
        case ExprKind::Ternary: {
            sub(0);
            Taint a = sub(1), b = sub(2);
            return {a.tainted || b.tainted, a.may_wrap || b.may_wrap};
        }
        default:
            for (std::size_t i = 0; i < e.args.size(); ++i)
                sub(i);
            return {};
        }
    }
};

void detect_unsigned(const Context& ctx, std::vector<Finding>& out)
{
    for (std::size_t fi = 0; fi < ctx.tu.functions.size(); ++fi) {
        const FunctionDef& fn = ctx.tu.functions[fi];
        std::map<std::string, const FunctionRef*> decl_at;
        for (const auto& r : ctx.stmts) {
            if (r.function != static_cast<int>(fi) || r.stmt->kind != StmtKind::VarDecl)
                continue;
            const VarDecl& d = *r.stmt->decl;
            if (d.is_array() || d.is_static || d.type.pointer_depth != 0 || d.type.base != BaseType::Int ||
                !find_local_decl(fn, d.name))
                continue;
            bool is_param = std::any_of(fn.params.begin(), fn.params.end(),
                                        [&](const Param& p) { return p.name == d.name; });
            if (!is_param)
                decl_at[d.name] = &r;
        }
        Promote p{ctx.tu, fn, {}};
        for (const auto& [name, _] : decl_at)
            p.qualifying.insert(name);
        for (bool changed = true; changed;) {
            changed = false;
            for (auto it = p.qualifying.begin(); it != p.qualifying.end();) {
                const VarDecl& d = *decl_at[*it]->stmt->decl;
                if ((d.init && !p.nonneg(*d.init)) || !p.writes_ok(*it)) {
                    it = p.qualifying.erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
        for (const auto& v : p.qualifying) {
            const FunctionRef& r = *decl_at[v];
            std::string why;
            walk_stmts(fn.body, [&](const Stmt& s) {
                for_each_own_expr(s, [&](const Expr& e) { p.flow(e, v, why); });
            });
            Finding f = ctx.make(RuleId::UNSIGNED_PROMOTE, r.stmt->span, static_cast<int>(fi),
                                 why.empty() ? Safety::Safe : Safety::UnsafeNeedsOverride,
                                 why.empty() ? v + " is never negative" : why);
            f.payload["var"] = v;
            f.target.stmt_path = r.path;
            out.push_back(std::move(f));
        }
    }
}

void detect_advisories(const Context& ctx, const std::set<RuleId>& rules, std::vector<Finding>& out)
{
    const auto& tu = ctx.tu;
    auto want = [&](RuleId r) { return rules.count(r) > 0; };
    for (std::size_t fi = 0; fi < tu.functions.size(); ++fi) {
        const FunctionDef& fn = tu.functions[fi];
        const int id = static_cast<int>(fi);
        if (want(RuleId::ADV_RECURSION) && ctx.recursive.count(fn.name)) {
            Finding f = ctx.make(RuleId::ADV_RECURSION, fn.span, id, Safety::Advisory,
                                 fn.name + " is recursive; an iterative form avoids the calls");
            f.payload["function"] = fn.name;
            out.push_back(std::move(f));
        }
        if (want(RuleId::ADV_STATIC_LINKAGE) && !fn.is_static && fn.name != "main") {
            Finding f = ctx.make(RuleId::ADV_STATIC_LINKAGE, fn.span, id, Safety::Advisory,
                                 "function " + fn.name + " could be static");
            f.payload["name"] = fn.name;
            out.push_back(std::move(f));
        }
        if (want(RuleId::ADV_TINY_FN_MACRO) && fn.name != "main" && !ctx.recursive.count(fn.name) &&
            static_cast<int>(fn.params.size()) <= ctx.options.max_inline_params &&
            count_statements(fn.body) <= ctx.options.max_inline_statements) {
            bool called = false;
            for (const auto& other : tu.functions)
                walk_all_exprs(other.body, [&](const Expr& e) {
                    if (e.kind == ExprKind::Call && e.name == fn.name)
                        called = true;
                });
            if (called) {
                Finding f = ctx.make(RuleId::ADV_TINY_FN_MACRO, fn.span, id, Safety::Advisory,
                                     fn.name + " is small enough to be a macro");
                f.payload["function"] = fn.name;
                out.push_back(std::move(f));
            }
        }
    }
    for (const auto& r : ctx.stmts) {
        if (r.stmt->kind != StmtKind::VarDecl)
            continue;
        const VarDecl& d = *r.stmt->decl;
        if (want(RuleId::ADV_MULTIDIM_ARRAY) && d.dims.size() > 1) {
            Finding f = ctx.make(RuleId::ADV_MULTIDIM_ARRAY, r.stmt->span, r.function, Safety::Advisory,
                                 d.name + " has " + std::to_string(d.dims.size()) + " dimensions; a flat array indexes faster");
            f.payload["name"] = d.name;
            f.target.stmt_path = r.path;
            out.push_back(std::move(f));
        }
        if (want(RuleId::ADV_WORD_SIZE) && !d.is_array() && d.type.pointer_depth == 0 &&
            d.type.base == BaseType::Char) {
            bool arith_in_loop = false;
            for (const auto& other : ctx.stmts) {
                if (other.function != r.function || !(ctx.in_loop(other) || other.stmt->is_loop()))
                    continue;
                for_each_own_expr(*other.stmt, [&](const Expr& e) {
                    walk_expr(e, [&](const Expr& x) {
                        bool arith = (x.kind == ExprKind::Binary && !is_logical(x.binary_op)) ||
                                     x.kind == ExprKind::PreInc || x.kind == ExprKind::PostInc ||
                                     x.kind == ExprKind::PreDec || x.kind == ExprKind::PostDec ||
                                     (x.kind == ExprKind::Assign && x.assign_op != AssignOp::Assign);
                        if (arith && std::any_of(x.args.begin(), x.args.end(),
                                                 [&](const Expr& a) { return a.is_var(d.name); }))
                            arith_in_loop = true;
                    });
                });
            }
            if (arith_in_loop) {
                Finding f = ctx.make(RuleId::ADV_WORD_SIZE, r.stmt->span, r.function, Safety::Advisory,
                                     d.name + " is a char used in loop arithmetic; int is the word size");
                f.payload["name"] = d.name;
                f.target.stmt_path = r.path;
                out.push_back(std::move(f));
            }
        }
    }
    for (const auto& g : tu.globals) {
        if (want(RuleId::ADV_MULTIDIM_ARRAY) && g.decl.dims.size() > 1) {
            Finding f = ctx.make(RuleId::ADV_MULTIDIM_ARRAY, g.span, -1, Safety::Advisory,
                                 g.decl.name + " has " + std::to_string(g.decl.dims.size()) +
                                     " dimensions; a flat array indexes faster");
            f.payload["name"] = g.decl.name;
            out.push_back(std::move(f));
        }
        if (want(RuleId::ADV_STATIC_LINKAGE) && !g.decl.is_static) {
            Finding f = ctx.make(RuleId::ADV_STATIC_LINKAGE, g.span, -1, Safety::Advisory,
                                 "global " + g.decl.name + " could be static");
            f.payload["name"] = g.decl.name;
            out.push_back(std::move(f));
        }
    }
}

} // namespace

std::vector<Finding> detect(const TranslationUnit& tu, const std::set<RuleId>& rules, const AnalysisOptions& options)
{
    Context ctx(tu, options);
    std::vector<Finding> out;
    if (rules.count(RuleId::LOOP_COUNTDOWN))
        detect_countdown(ctx, out);
    if (rules.count(RuleId::FN_INLINE))
        detect_inline(ctx, out);
    if (rules.count(RuleId::GLOBAL_REG_ALIAS))
        detect_global_alias(ctx, out);
    if (rules.count(RuleId::BITWISE_CONV))
        detect_bitwise(ctx, out);
    if (rules.count(RuleId::NESTED_IF_MERGE))
        detect_if_merge(ctx, out);
    if (rules.count(RuleId::MEMSET_INIT))
        detect_memset(ctx, out);
    if (rules.count(RuleId::UNSIGNED_PROMOTE))
        detect_unsigned(ctx, out);
    detect_advisories(ctx, rules, out);
    std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        if (a.span.file != b.span.file)
            return a.span.file < b.span.file;
        if (a.span.line_start != b.span.line_start)
            return a.span.line_start < b.span.line_start;
        if (a.span.col_start != b.span.col_start)
            return a.span.col_start < b.span.col_start;
        return a.rule < b.rule;
    });
    return out;
}

std::vector<GlobalUse> global_hot_uses(const TranslationUnit& tu, const FunctionDef& fn)
{
    Context ctx(tu, {});
    std::set<std::string> locals = local_names(fn);
    std::vector<GlobalUse> out;
    for (const auto& gd : tu.globals) {
        const std::string& g = gd.decl.name;
        if (locals.count(g))
            continue;
        GlobalUse u;
        u.name = g;
        walk_all_exprs(fn.body, [&](const Expr& x) {
            if (x.is_var(g))
                ++u.uses;
            if (x.kind == ExprKind::Call && tu.find_function(x.name) && ctx.call_touches(x.name, g))
                u.calls_in_region = true;
        });
        if (u.uses > 0)
            out.push_back(u);
    }
    return out;
}

std::string render_findings(const std::vector<Finding>& findings, bool tsv)
{
    std::vector<std::array<std::string, 5>> rows;
    for (const auto& f : findings) {
        std::string rationale = f.rationale;
        std::replace(rationale.begin(), rationale.end(), '\t', ' ');
        rows.push_back({std::string(to_string(f.rule)), f.span.file + ":" + std::to_string(f.span.line_start),
                        f.function, std::string(to_string(f.safety)), rationale});
    }
    std::string out;
    if (tsv) {
        for (const auto& r : rows)
            out += r[0] + "\t" + r[1] + "\t" + r[2] + "\t" + r[3] + "\t" + r[4] + "\n";
        return out;
    }
    std::array<std::size_t, 5> width{};
    for (const auto& r : rows)
        for (std::size_t i = 0; i < 4; ++i)
            width[i] = std::max(width[i], r[i].size());
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < 4; ++i)
            line += r[i] + std::string(width[i] - r[i].size() + 2, ' ');
        out += line + r[4] + "\n";
    }
    return out;
}

} // namespace hcopt
