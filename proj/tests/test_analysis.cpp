#include "doctest.h"

#include <algorithm>

#include "hcopt/analysis.hpp"
#include "hcopt/interp.hpp"
#include "hcopt/parser.hpp"
#include "hcopt/printer.hpp"
#include "support/random_ast.hpp"

using namespace hcopt;

namespace {

std::string fixture(const std::string& name) { return std::string(HCOPT_FIXTURE_DIR) + "/" + name; }

TranslationUnit heap() { return load_file(fixture("heap.c"), {{"SMALL", "1"}, {"DEBUG", "1"}}); }
TranslationUnit fact() { return load_file(fixture("fact.c"), {{"SMALL", "1"}, {"DEBUG", "1"}}); }

std::vector<Finding> of_rule(const TranslationUnit& tu, RuleId r) { return detect(tu, {r}); }

std::set<RuleId> every_rule() { return {all_rules().begin(), all_rules().end()}; }

const Expr& finding_expr(const TranslationUnit& tu, const Finding& f)
{
    const Stmt& s = stmt_at(tu.functions[static_cast<std::size_t>(f.target.function)], f.target.stmt_path);
    const Expr* e = f.target.slot == 0 ? &*s.init : f.target.slot == 1 ? &*s.expr : f.target.slot == 2 ? &*s.step : &*s.decl->init;
    for (int i : f.target.expr_path)
        e = &e->args[static_cast<std::size_t>(i)];
    return *e;
}

bool risky(const Expr& e)
{
    bool r = false;
    walk_expr(e, [&](const Expr& x) {
        if (x.kind == ExprKind::Index || x.kind == ExprKind::Deref ||
            (x.kind == ExprKind::Binary && (x.binary_op == BinaryOp::Div || x.binary_op == BinaryOp::Mod)))
            r = true;
    });
    return r;
}

} // namespace

TEST_CASE("rule names round trip")
{
    CHECK(all_rules().size() == 12);
    CHECK(rewritable_rules().size() == 7);
    for (RuleId r : all_rules())
        CHECK(rule_from_string(to_string(r)) == r);
    CHECK(is_advisory(RuleId::ADV_WORD_SIZE));
    CHECK_FALSE(is_advisory(RuleId::UNSIGNED_PROMOTE));
    CHECK_FALSE(rule_from_string("LOOP"));
}

TEST_CASE("swap call is the one inline candidate")
{
    auto tu = heap();
    auto f = of_rule(tu, RuleId::FN_INLINE);
    REQUIRE(f.size() == 1);
    CHECK(f[0].function == "hsort");
    CHECK(f[0].safety == Safety::Safe);
    CHECK(f[0].payload.at("callee") == "swap");
    CHECK(f[0].span.line_start == 47);
    CHECK(print_stmt(stmt_at(tu.functions[static_cast<std::size_t>(f[0].target.function)], f[0].target.stmt_path)) ==
          "swap(&a[1], &a[i + 1]);\n");
}

TEST_CASE("init_fa loop is a memset candidate")
{
    auto f = of_rule(fact(), RuleId::MEMSET_INIT);
    REQUIRE(f.size() == 1);
    CHECK(f[0].function == "init_fa");
    CHECK(f[0].safety == Safety::Safe);
    CHECK(f[0].payload.at("array") == "fa");
}

TEST_CASE("empty unit has no findings")
{
    auto tu = load_file(fixture("empty.c"));
    CHECK(detect(tu, every_rule()).empty());
    CHECK(detect(TranslationUnit{}, every_rule()).empty());
}

TEST_CASE("detection is deterministic and ordered")
{
    for (const auto& tu : {heap(), fact()}) {
        auto a = detect(tu, every_rule());
        auto b = detect(tu, every_rule());
        CHECK(a == b);
        CHECK(std::is_sorted(a.begin(), a.end(), [](const Finding& x, const Finding& y) {
            return x.span.line_start < y.span.line_start;
        }));
        for (const auto& f : a)
            CHECK((f.safety == Safety::Advisory) == is_advisory(f.rule));
    }
}

TEST_CASE("side effect free")
{
    TranslationUnit tu;
    CHECK(side_effect_free(parse_expression("a[j] < a[j+1]"), tu));
    CHECK(side_effect_free(parse_expression("*p + q[2] / 3"), tu));
    CHECK_FALSE(side_effect_free(parse_expression("j = j+1"), tu));
    CHECK_FALSE(side_effect_free(parse_expression("f(x) + 1"), tu));
    CHECK_FALSE(side_effect_free(parse_expression("x && y++"), tu));
    CHECK_FALSE(side_effect_free(parse_expression("rand()"), tu));
}

TEST_CASE("boolean valued")
{
    CHECK(is_boolean_valued(parse_expression("j < n")));
    CHECK(is_boolean_valued(parse_expression("!done")));
    CHECK(is_boolean_valued(parse_expression("a || b")));
    CHECK_FALSE(is_boolean_valued(parse_expression("carry")));
    CHECK_FALSE(is_boolean_valued(parse_expression("a & b")));
    CHECK_FALSE(is_boolean_valued(parse_expression("-x")));
}

TEST_CASE("global uses")
{
    auto tu = fact();
    auto mult = global_hot_uses(tu, *tu.find_function("mult_fa"));
    // fa is written and read once each in the loop body
    CHECK(mult == std::vector<GlobalUse>{{"fa", 2, false}, {"fa_modulo", 2, false}, {"count", 2, false}});
    auto print = global_hot_uses(tu, *tu.find_function("print_fa"));
    auto count = std::find_if(print.begin(), print.end(), [](const GlobalUse& u) { return u.name == "count"; });
    REQUIRE(count != print.end());
    CHECK(count->uses >= 4);
    CHECK_FALSE(count->calls_in_region);
    auto f = global_hot_uses(tu, *tu.find_function("fact"));
    auto mod = std::find_if(f.begin(), f.end(), [](const GlobalUse& u) { return u.name == "fa_modulo"; });
    REQUIRE(mod != f.end());
    CHECK(mod->calls_in_region);
    CHECK(global_hot_uses(tu, *tu.find_function("main")).empty());
}

TEST_CASE("loop shapes")
{
    auto up = loop_shape(parse_statement("for (i=1; i<=n; i++) x = i;"));
    REQUIRE(up);
    CHECK(up->var == "i");
    CHECK(up->init.is_int(1));
    CHECK(up->bound.is_var("n"));
    CHECK(up->dir == LoopDir::Up);
    CHECK(up->step1);
    CHECK(up->inclusive);
    CHECK_FALSE(up->var_written_in_body);
    CHECK(up->bound_loop_invariant);

    auto down = loop_shape(parse_statement("for (i=n/2; i>=1; i--) adjust(a, i, n);"));
    REQUIRE(down);
    CHECK(down->dir == LoopDir::Down);
    CHECK_FALSE(loop_shape(parse_statement("for (i=0; i<n; i+=2) x = i;")));
    CHECK_FALSE(loop_shape(parse_statement("while (i < n) i++;")));
    CHECK_FALSE(loop_shape(parse_statement("for (i=0; i<n; i--) x = i;")));

    auto lt = loop_shape(parse_statement("for (i=0; i<n; ++i) { n = n - 1; i = i + 1; }"));
    REQUIRE(lt);
    CHECK_FALSE(lt->inclusive);
    CHECK(lt->var_written_in_body);
    CHECK_FALSE(lt->bound_loop_invariant);
}

TEST_CASE("and/or agree with bitwise on 0 and 1")
{
    int checks = 0;
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            std::string src = "int main() { int a; int b; a = " + std::to_string(a) + "; b = " + std::to_string(b) +
                              "; printf(\"%d %d %d %d\", a && b, a & b, a || b, a | b); return 0; }";
            auto out = run(parse_source(src), "main").stdout_bytes;
            int land, band, lor, bor;
            REQUIRE(std::sscanf(out.c_str(), "%d %d %d %d", &land, &band, &lor, &bor) == 4);
            CHECK(land == band);
            CHECK(lor == bor);
            checks += 2;
        }
    CHECK(checks == 8);
}

TEST_CASE("bitwise conversion with side effects is never safe")
{
    const char* bodies[] = {
        "if (x && f(y)) g = 1;", "if (f(x) && y) g = 1;", "if (x || (y = 2)) g = 1;", "if (x++ && y) g = 1;",
        "while (x && g--) x = x;", "g = x || f(1);",
    };
    for (const char* body : bodies) {
        CAPTURE(body);
        std::string src = std::string("int g; int f(int v) { return v; } int main() { int x; int y; x = 1; y = 0; ") +
                          body + " return 0; }";
        auto found = of_rule(parse_source(src), RuleId::BITWISE_CONV);
        REQUIRE_FALSE(found.empty());
        for (const auto& f : found)
            CHECK(f.safety == Safety::UnsafeNeedsOverride);
    }
    auto safe = of_rule(parse_source("int main() { int x; int y; x = 1; y = 0; if (x && y) x = 2; return 0; }"),
                        RuleId::BITWISE_CONV);
    REQUIRE(safe.size() == 1);
    CHECK(safe[0].safety == Safety::Safe);
    auto indexed = of_rule(
        parse_source("int a[4]; int main() { int j; j = 5; if (j < 4 && a[j] > 0) j = 0; return 0; }"),
        RuleId::BITWISE_CONV);
    REQUIRE(indexed.size() == 1);
    CHECK(indexed[0].safety == Safety::UnsafeNeedsOverride);
}

TEST_CASE("safe bitwise findings satisfy the gates on random units")
{
    int safe = 0;
    for (unsigned seed = 1; seed <= 400; ++seed) {
        hcopt::testing::RandomAst gen(seed);
        TranslationUnit tu = gen.unit(4);
        for (const auto& f : of_rule(tu, RuleId::BITWISE_CONV)) {
            const Expr& e = finding_expr(tu, f);
            REQUIRE(e.kind == ExprKind::Binary);
            REQUIRE(is_logical(e.binary_op));
            bool gates = side_effect_free(e.lhs(), tu) && side_effect_free(e.rhs(), tu) && !risky(e.rhs());
            CHECK(gates == (f.safety == Safety::Safe));
            safe += f.safety == Safety::Safe;
        }
    }
    CHECK(safe > 0);
}

TEST_CASE("register alias is never safe when a callee touches the global")
{
    const char* callees[] = {
        "void h() { g = g + 1; }",
        "void h() { int t; t = g; }",
        "void k() { g = 0; } void h() { k(); }",
        "void k() { g = 0; } void j() { k(); } void h() { j(); }",
    };
    for (const char* callee : callees) {
        CAPTURE(callee);
        std::string src = std::string("int g; ") + callee +
                          " int main() { int i; for (i = 0; i < 3; i++) { g = g + i; h(); } return g; }";
        auto tu = parse_source(src);
        auto found = of_rule(tu, RuleId::GLOBAL_REG_ALIAS);
        auto in_main = std::find_if(found.begin(), found.end(), [](const Finding& f) { return f.function == "main"; });
        REQUIRE(in_main != found.end());
        CHECK(in_main->safety == Safety::UnsafeNeedsOverride);
    }
    auto ok = parse_source("int g; int other; void h() { other = 1; } "
                           "int main() { int i; for (i = 0; i < 3; i++) { g = g + i; h(); } printf(\"%d\", g); return 0; }");
    auto found = of_rule(ok, RuleId::GLOBAL_REG_ALIAS);
    REQUIRE(found.size() == 1);
    CHECK(found[0].payload.at("global") == "g");
    CHECK(found[0].safety == Safety::Safe);

    for (unsigned seed = 1; seed <= 300; ++seed) {
        hcopt::testing::RandomAst gen(seed);
        TranslationUnit tu = gen.unit(4);
        for (const auto& f : of_rule(tu, RuleId::GLOBAL_REG_ALIAS)) {
            if (f.safety != Safety::Safe)
                continue;
            const FunctionDef& fn = tu.functions[static_cast<std::size_t>(f.target.function)];
            for (const auto& u : global_hot_uses(tu, fn))
                if (u.name == f.payload.at("global"))
                    CHECK_FALSE(u.calls_in_region);
        }
    }
}

TEST_CASE("register alias rejects address taken and pointer writes")
{
    auto addr = parse_source("int g; int main() { int *p; int i; p = &g; for (i = 0; i < 3; i++) g = g + i; return 0; }");
    CHECK(of_rule(addr, RuleId::GLOBAL_REG_ALIAS).at(0).safety == Safety::UnsafeNeedsOverride);
    auto ptr = parse_source(
        "int g; int main() { int *p; int i; p = malloc(4); for (i = 0; i < 3; i++) { g = g + i; *p = i; } return 0; }");
    CHECK(of_rule(ptr, RuleId::GLOBAL_REG_ALIAS).at(0).safety == Safety::UnsafeNeedsOverride);
    auto once = parse_source("int g; int main() { int i; for (i = 0; i < 3; i++) g = 1; return 0; }");
    CHECK(of_rule(once, RuleId::GLOBAL_REG_ALIAS).empty());
    auto no_loop = parse_source("int g; int main() { g = 1; g = g + 1; return 0; }");
    CHECK(of_rule(no_loop, RuleId::GLOBAL_REG_ALIAS).empty());
}

TEST_CASE("countdown candidates")
{
    auto heap_loops = of_rule(heap(), RuleId::LOOP_COUNTDOWN);
    CHECK(heap_loops.size() == 3);
    for (const auto& f : heap_loops)
        CHECK(f.safety == Safety::Safe);

    auto live = parse_source("int main() { int i; for (i = 1; i <= 5; i++) printf(\"%d\", i); return i; }");
    CHECK(of_rule(live, RuleId::LOOP_COUNTDOWN).at(0).safety == Safety::UnsafeNeedsOverride);

    auto unknown = parse_source(
        "void f(int n) { int i; for (i = 1; i <= n; i++) printf(\"%d\", i); } int main() { int k; k = rand(); f(k); return 0; }");
    CHECK(of_rule(unknown, RuleId::LOOP_COUNTDOWN).at(0).safety == Safety::UnsafeNeedsOverride);

    auto negative = parse_source(
        "void f(int n) { int i; for (i = 1; i <= n; i++) printf(\"%d\", i); } int main() { f(3); f(-4); return 0; }");
    CHECK(of_rule(negative, RuleId::LOOP_COUNTDOWN).at(0).safety == Safety::UnsafeNeedsOverride);

    auto literal = parse_source(
        "void f(int n) { int i; for (i = 1; i <= n; i++) printf(\"%d\", i); } int main() { f(3); f(0); return 0; }");
    CHECK(of_rule(literal, RuleId::LOOP_COUNTDOWN).at(0).safety == Safety::Safe);

    auto written = parse_source("int main() { int i; for (i = 1; i <= 5; i++) i = i + 1; return 0; }");
    CHECK(of_rule(written, RuleId::LOOP_COUNTDOWN).empty());

    auto in_outer = parse_source(
        "int main() { int i; int j; for (j = 0; j < 3; j++) { for (i = 0; i < 4; i++) printf(\"%d\", i); "
        "printf(\"%d\", i); } return 0; }");
    auto inner = of_rule(in_outer, RuleId::LOOP_COUNTDOWN);
    auto inner_i = std::find_if(inner.begin(), inner.end(), [](const Finding& f) { return f.payload.at("var") == "i"; });
    REQUIRE(inner_i != inner.end());
    CHECK(inner_i->safety == Safety::UnsafeNeedsOverride);
}

TEST_CASE("memset candidates")
{
    auto five = parse_source("int a[8]; int main() { int i; for (i = 0; i < 8; i++) a[i] = 5; return 0; }");
    CHECK(of_rule(five, RuleId::MEMSET_INIT).empty());
    auto chars = parse_source("int main() { char c[8]; int i; for (i = 0; i < 8; i++) c[i] = 0; return c[3]; }");
    auto f = of_rule(chars, RuleId::MEMSET_INIT);
    REQUIRE(f.size() == 1);
    CHECK(f[0].safety == Safety::Safe);
    auto over = parse_source("int a[8]; int main() { int i; for (i = 0; i <= 8; i++) a[i] = 0; return 0; }");
    CHECK(of_rule(over, RuleId::MEMSET_INIT).at(0).safety == Safety::UnsafeNeedsOverride);
    auto ptr = parse_source("int main() { int *p; int i; p = malloc(32); for (i = 0; i < 8; i++) p[i] = 0; return 0; }");
    CHECK(of_rule(ptr, RuleId::MEMSET_INIT).empty());
}

TEST_CASE("unsigned promotion")
{
    auto up = parse_source("int main() { int i; for (i = 0; i < 10; i++) printf(\"%d\", i); return 0; }");
    auto f = of_rule(up, RuleId::UNSIGNED_PROMOTE);
    REQUIRE(f.size() == 1);
    CHECK(f[0].payload.at("var") == "i");
    CHECK(f[0].safety == Safety::Safe);
    auto neg = parse_source("int main() { int i; i = 3; i = -1; return i; }");
    CHECK(of_rule(neg, RuleId::UNSIGNED_PROMOTE).empty());
    auto dec = parse_source("int main() { int i; for (i = 9; i > 0; i--) printf(\"%d\", i); return 0; }");
    CHECK(of_rule(dec, RuleId::UNSIGNED_PROMOTE).empty());
    auto cmp = parse_source("int main(int argc, char **argv) { int i; i = 2; if (i > argc - 5) i = 3; return i; }");
    CHECK(of_rule(cmp, RuleId::UNSIGNED_PROMOTE).at(0).safety == Safety::UnsafeNeedsOverride);
    auto wraps = parse_source("int main() { int i; int a[4]; i = 0; a[i - 1] = 2; return 0; }");
    auto w = of_rule(wraps, RuleId::UNSIGNED_PROMOTE);
    REQUIRE(w.size() == 1);
    CHECK(w[0].safety == Safety::UnsafeNeedsOverride);
}

TEST_CASE("inline needs a loop and a small non recursive callee")
{
    auto outside = parse_source("int g; void s(int v) { g = v; } int main() { s(1); return 0; }");
    CHECK(of_rule(outside, RuleId::FN_INLINE).empty());
    auto rec = parse_source(
        "int r(int n) { if (n > 0) r(n - 1); return 0; } int main() { int i; for (i = 0; i < 3; i++) r(i); return 0; }");
    CHECK(of_rule(rec, RuleId::FN_INLINE).empty());
    auto adv = of_rule(rec, RuleId::ADV_RECURSION);
    REQUIRE(adv.size() == 1);
    CHECK(adv[0].function == "r");
    CHECK(adv[0].safety == Safety::Advisory);
    auto big = parse_source("int g; void s(int v) { g = v; g = g + 1; g = g * 2; g = g - 1; } "
                            "int main() { int i; for (i = 0; i < 3; i++) s(i); return 0; }");
    CHECK(of_rule(big, RuleId::FN_INLINE).empty());
    auto early = parse_source("int g; void s(int v) { if (v) return; g = v; } "
                              "int main() { int i; for (i = 0; i < 3; i++) s(i); return 0; }");
    CHECK(of_rule(early, RuleId::FN_INLINE).empty());
}

TEST_CASE("advisories")
{
    auto tu = parse_source("int grid[3][4]; static int hidden; int main() { char c; int i; c = 0; "
                           "for (i = 0; i < 3; i++) c = c + 1; return c; }");
    auto multi = of_rule(tu, RuleId::ADV_MULTIDIM_ARRAY);
    REQUIRE(multi.size() == 1);
    CHECK(multi[0].payload.at("name") == "grid");
    auto link = of_rule(tu, RuleId::ADV_STATIC_LINKAGE);
    REQUIRE(link.size() == 1);
    CHECK(link[0].payload.at("name") == "grid");
    auto word = of_rule(tu, RuleId::ADV_WORD_SIZE);
    REQUIRE(word.size() == 1);
    CHECK(word[0].payload.at("name") == "c");
    auto tiny = of_rule(heap(), RuleId::ADV_TINY_FN_MACRO);
    REQUIRE(tiny.size() == 1);
    CHECK(tiny[0].function == "swap");
}

TEST_CASE("findings render")
{
    auto f = of_rule(heap(), RuleId::FN_INLINE);
    CHECK(render_findings(f, true) == "FN_INLINE\theap.c:47\thsort\tSAFE\tinline swap into the loop in hsort\n");
    std::string text = render_findings(f, false);
    CHECK(text.find("FN_INLINE  heap.c:47  hsort  SAFE  inline") == 0);
    CHECK(render_findings({}, false).empty());
    Finding tab = f[0];
    tab.rationale = "a\tb";
    CHECK(render_findings({tab}, true).find("a b\n") != std::string::npos);
}
