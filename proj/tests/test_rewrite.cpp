#include "doctest.h"

#include <algorithm>

#include "hcopt/interp.hpp"
#include "hcopt/parser.hpp"
#include "hcopt/printer.hpp"
#include "hcopt/rewrite.hpp"

using namespace hcopt;

namespace {

std::string fixture(const std::string& name) { return std::string(HCOPT_FIXTURE_DIR) + "/" + name; }

const Predefined small_debug{{"SMALL", "1"}, {"DEBUG", "1"}};

TranslationUnit heap() { return load_file(fixture("heap.c"), small_debug); }
TranslationUnit fact() { return load_file(fixture("fact.c"), small_debug); }

std::set<RuleId> rewritable() { return {rewritable_rules().begin(), rewritable_rules().end()}; }

struct Outcome {
    std::string out;
    int exit_code = 0;
    std::string error;
    bool operator==(const Outcome&) const = default;
};

Outcome outcome(const TranslationUnit& tu, long seed)
{
    RunConfig c;
    c.seed = seed;
    try {
        auto r = run(tu, "main", c);
        return {r.stdout_bytes, r.exit_code, ""};
    } catch (const Error& e) {
        return {"", 0, std::string(to_string(e.kind()))};
    }
}

std::uint64_t cost(const TranslationUnit& tu, long seed = 1)
{
    RunConfig c;
    c.seed = seed;
    return run(tu, "main", c).cost.total;
}

std::string rewrite_one(const std::string& src, RuleId r, bool unsafe = false)
{
    return pretty_print(auto_plan(parse_source(src, {}, "t.c"), {r}, unsafe).tu);
}

std::vector<std::string> names(const std::vector<AppliedChange>& v)
{
    std::vector<std::string> out;
    for (const auto& a : v)
        out.emplace_back(to_string(a.finding.rule));
    return out;
}

} // namespace

TEST_CASE("empty plan is the identity")
{
    for (const auto& tu : {heap(), fact()}) {
        auto r = apply_plan(tu, {}, false);
        CHECK(structurally_equal(r.tu, tu));
        CHECK(r.report.applied.empty());
        CHECK(r.report.skipped.empty());
        CHECK(r.report.functions_touched.empty());
        CHECK(render_change_report(r.report, tu, r.tu) == "applied 0, skipped 0\nno changes applied\n");
    }
}

TEST_CASE("heap with all safe rules")
{
    auto tu = heap();
    auto r = auto_plan(tu, rewritable(), false);
    auto applied = names(r.report.applied);
    CHECK(std::count(applied.begin(), applied.end(), "FN_INLINE") == 1);
    CHECK(std::count(applied.begin(), applied.end(), "LOOP_COUNTDOWN") == 3);
    CHECK(std::count(applied.begin(), applied.end(), "BITWISE_CONV") >= 1);
    for (const auto& s : r.report.skipped)
        CHECK(s.reason == "NEEDS_OVERRIDE");
    CHECK(r.report.functions_touched.count("hsort"));
    std::string text = pretty_print(r.tu);
    CHECK(text.find("swap(") == text.rfind("swap(")); // only the definition is left
    for (long seed : {1L, 42L, 20071L})
        CHECK(outcome(tu, seed) == outcome(r.tu, seed));
    CHECK(cost(r.tu) < cost(tu));
}

TEST_CASE("unsafe finding needs override")
{
    auto tu = parse_source("int main() { int i; for (i = 1; i <= 5; i++) printf(\"%d\", i); return i; }");
    auto f = detect(tu, {RuleId::LOOP_COUNTDOWN});
    REQUIRE(f.size() == 1);
    REQUIRE(f[0].safety == Safety::UnsafeNeedsOverride);
    auto r = apply_plan(tu, f, false);
    REQUIRE(r.report.skipped.size() == 1);
    CHECK(r.report.skipped[0].reason == "NEEDS_OVERRIDE");
    CHECK(structurally_equal(r.tu, tu));
    auto forced = apply_plan(tu, f, true);
    CHECK(forced.report.applied.size() == 1);
}

TEST_CASE("advisories are not rewritable")
{
    auto tu = heap();
    auto f = detect(tu, {RuleId::ADV_TINY_FN_MACRO});
    REQUIRE(f.size() == 1);
    auto r = apply_plan(tu, f, true);
    REQUIRE(r.report.skipped.size() == 1);
    CHECK(r.report.skipped[0].reason == "NOT_REWRITABLE");
}

TEST_CASE("span that is not in the unit")
{
    auto tu = heap();
    auto f = detect(tu, {RuleId::FN_INLINE});
    REQUIRE(f.size() == 1);
    f[0].span.line_start = 999;
    f[0].span.line_end = 999;
    CHECK_THROWS_AS(apply_plan(tu, f, false), Error);
    try {
        apply_plan(tu, f, false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SpanMismatch);
    }
}

TEST_CASE("applying the same finding twice is stale")
{
    auto tu = heap();
    auto f = detect(tu, {RuleId::FN_INLINE});
    REQUIRE(f.size() == 1);
    auto r = apply_plan(tu, {f[0], f[0]}, false);
    CHECK(r.report.applied.size() == 1);
    REQUIRE(r.report.skipped.size() == 1);
    CHECK(r.report.skipped[0].reason == "STALE_SPAN");
    auto again = apply_plan(tu, f, false);
    auto twice = apply_plan(again.tu, f, false);
    REQUIRE(twice.report.skipped.size() == 1);
    CHECK(twice.report.skipped[0].reason == "STALE_SPAN");
}

TEST_CASE("countdown form")
{
    std::string src = "int main() { int i; int s; s = 0; for (i = 1; i <= 5; i++) s = s + i; printf(\"%d\", s); return 0; }";
    std::string out = rewrite_one(src, RuleId::LOOP_COUNTDOWN);
    CHECK(out.find("for (i = 5; i != 0; i--) {\n        s = s + (6 - i);\n    }") != std::string::npos);
    CHECK(outcome(parse_source(src), 1) == outcome(parse_source(out), 1));

    std::string half = "int main() { int i; int s; s = 0; for (i = 2; i < 7; i++) s = s + i * i; printf(\"%d\", s); return 0; }";
    std::string h = rewrite_one(half, RuleId::LOOP_COUNTDOWN);
    CHECK(h.find("for (i = 5; i != 0; i--)") != std::string::npos);
    CHECK(outcome(parse_source(half), 1).out == "90");
    CHECK(outcome(parse_source(h), 1).out == "90");

    std::string sym = "void f(int n) { int i; for (i = 1; i <= n; i++) printf(\"%d\", i); } int main() { f(4); f(0); return 0; }";
    std::string s = rewrite_one(sym, RuleId::LOOP_COUNTDOWN);
    CHECK(s.find("for (i = n; i != 0; i--)") != std::string::npos);
    CHECK(outcome(parse_source(s), 1).out == "1234");
}

TEST_CASE("inline forms")
{
    auto tu = heap();
    auto r = auto_plan(tu, {RuleId::FN_INLINE}, false);
    REQUIRE(r.report.applied.size() == 1);
    CHECK(r.report.applied[0].before == "swap(&a[1], &a[i + 1]);\n");
    CHECK(r.report.applied[0].after.find("int *__t0 = &a[1];") != std::string::npos);
    CHECK(r.report.applied[0].after.find("int *__t1 = &a[i + 1];") != std::string::npos);
    CHECK(r.report.functions_touched == std::set<std::string>{"hsort"});

    std::string src = "int g; void f(int v) { g = g + v; } int main() { int i; for (i = 0; i < 3; i++) f(3); return g; }";
    std::string out = rewrite_one(src, RuleId::FN_INLINE);
    CHECK(out.find("        {\n            int __t0 = 3;\n            g = g + __t0;\n        }\n") != std::string::npos);
    CHECK(outcome(parse_source(src), 1) == outcome(parse_source(out), 1));

    std::string taken = "int __t0; int g; void f(int v) { g = g + v; } int main() { int i; for (i = 0; i < 3; i++) f(i); return g; }";
    std::string t = rewrite_one(taken, RuleId::FN_INLINE);
    CHECK(t.find("int __t1 = i;") != std::string::npos);

    auto with_early = parse_source("int g; void f(int v) { if (v) return; g = v; } int main() { f(1); return 0; }");
    CHECK_THROWS_AS(rewrite_inline(with_early, with_early.functions[1].body.body[0], with_early.functions[0]), Error);
}

TEST_CASE("register alias forms")
{
    std::string write = "int g; int main() { int i; for (i = 0; i < 3; i++) g = g + i; if (g > 2) return 1; return 0; }";
    std::string w = rewrite_one(write, RuleId::GLOBAL_REG_ALIAS);
    CHECK(w.find("register int __local_g = g;") != std::string::npos);
    CHECK(w.find("        g = __local_g;\n        return 1;") != std::string::npos);
    CHECK(w.find("    g = __local_g;\n    return 0;") != std::string::npos);
    CHECK(outcome(parse_source(write), 1) == outcome(parse_source(w), 1));

    std::string read = "int g; int main() { int i; int s; s = 0; for (i = 0; i < 3; i++) s = s + g * g; printf(\"%d\", s); return 0; }";
    std::string r = rewrite_one(read, RuleId::GLOBAL_REG_ALIAS);
    CHECK(r.find("register int __local_g = g;") != std::string::npos);
    CHECK(r.find("g = __local_g;") == std::string::npos);

    std::string tail = "int g; void main2() { int i; for (i = 0; i < 3; i++) g = g + i; } int main() { main2(); return g; }";
    std::string t = rewrite_one(tail, RuleId::GLOBAL_REG_ALIAS);
    CHECK(t.find("    g = __local_g;\n}") != std::string::npos);
    CHECK(outcome(parse_source(tail), 1) == outcome(parse_source(t), 1));

    std::string arr = "int a[4]; int main() { int i; for (i = 0; i < 4; i++) a[i] = a[i] + i; printf(\"%d\", a[3]); return 0; }";
    std::string ar = rewrite_one(arr, RuleId::GLOBAL_REG_ALIAS);
    CHECK(ar.find("register int *__local_a = a;") != std::string::npos);
    CHECK(outcome(parse_source(arr), 1) == outcome(parse_source(ar), 1));
}

TEST_CASE("bitwise forms")
{
    std::string src = "int main() { int a; int b; a = 1; b = 2; if (a && b) a = 3; if (a || b < 1) a = 4; return a; }";
    std::string out = rewrite_one(src, RuleId::BITWISE_CONV);
    CHECK(out.find("if ((a != 0) & (b != 0))") != std::string::npos);
    CHECK(out.find("if ((a != 0) | (b < 1))") != std::string::npos);
    CHECK(print_expr(rewrite_bitwise(parse_expression("x < 1 && y > 2"))) == "(x < 1) & (y > 2)");

    for (int a = -1; a <= 2; ++a)
        for (int b = -1; b <= 2; ++b) {
            std::string p = "int main() { int a; int b; a = " + std::to_string(a) + "; b = " + std::to_string(b) +
                            "; printf(\"%d %d %d\", a && b, a || b, (a > 0 && b) || a == b); return 0; }";
            CAPTURE(p);
            std::string q = rewrite_one(p, RuleId::BITWISE_CONV);
            CHECK(q.find("&&") == std::string::npos);
            CHECK(q.find("||") == std::string::npos);
            CHECK(outcome(parse_source(p), 1) == outcome(parse_source(q), 1));
        }
}

TEST_CASE("nested if merge form")
{
    std::string src = "int main() { int a; int b; a = 1; b = 2; if (a > 0) { if (b > 1) { a = 5; } } return a; }";
    std::string out = rewrite_one(src, RuleId::NESTED_IF_MERGE);
    CHECK(out.find("if ((a > 0) & (b > 1)) {\n        a = 5;\n    }") != std::string::npos);
    CHECK(outcome(parse_source(src), 1) == outcome(parse_source(out), 1));

    std::string three = "int main() { int a; a = 1; if (a) if (a < 3) if (a != 2) a = 7; return a; }";
    std::string t = rewrite_one(three, RuleId::NESTED_IF_MERGE);
    CHECK(t.find("if (((a != 0) & (a < 3)) & (a != 2))") != std::string::npos);
    CHECK(outcome(parse_source(t), 1).exit_code == 7);

    std::string with_else = "int main() { int a; a = 1; if (a) { if (a < 3) a = 2; } else a = 3; return a; }";
    CHECK(detect(parse_source(with_else), {RuleId::NESTED_IF_MERGE}).empty());
}

TEST_CASE("memset forms")
{
    std::string src = "int fa[10]; int main() { int i; fa[3] = 9; for (i = 0; i < 10; i++) fa[i] = 0; printf(\"%d\", fa[3]); return 0; }";
    std::string out = rewrite_one(src, RuleId::MEMSET_INIT);
    CHECK(out.find("memset(fa, 0, 10 * sizeof(int));") != std::string::npos);
    CHECK(out.find("for") == std::string::npos);
    CHECK(outcome(parse_source(src), 1) == outcome(parse_source(out), 1));

    std::string chars = "int main() { char c[8]; int i; c[3] = 1; for (i = 0; i < 8; i++) c[i] = 0; return c[3]; }";
    std::string c = rewrite_one(chars, RuleId::MEMSET_INIT);
    CHECK(c.find("memset(c, 0, 8 * sizeof(char));") != std::string::npos);
    CHECK(outcome(parse_source(c), 1).exit_code == 0);

    std::string part = "int fa[10]; int main() { int i; for (i = 2; i <= 5; i++) fa[i] = 0; return 0; }";
    CHECK(rewrite_one(part, RuleId::MEMSET_INIT).find("memset(fa + 2, 0, 4 * sizeof(int));") != std::string::npos);
}

TEST_CASE("unsigned form")
{
    std::string src = "int main() { int i; for (i = 0; i < 10; i++) printf(\"%d\", i); return 0; }";
    std::string out = rewrite_one(src, RuleId::UNSIGNED_PROMOTE);
    CHECK(out.find("    unsigned int i;\n") != std::string::npos);
    CHECK(outcome(parse_source(src), 1) == outcome(parse_source(out), 1));
    auto fn = parse_source(src).functions[0];
    CHECK_THROWS_AS(rewrite_unsigned(fn, "k"), Error);
}

TEST_CASE("each rule alone preserves fixture output")
{
    for (const auto& tu : {heap(), fact()}) {
        for (RuleId r : rewritable_rules()) {
            CAPTURE(to_string(r));
            auto res = auto_plan(tu, {r}, false);
            for (long seed : {1L, 42L, 20071L})
                CHECK(outcome(tu, seed) == outcome(res.tu, seed));
        }
    }
}

TEST_CASE("cost does not increase")
{
    for (const auto& tu : {heap(), fact()}) {
        for (RuleId r : {RuleId::LOOP_COUNTDOWN, RuleId::FN_INLINE, RuleId::GLOBAL_REG_ALIAS, RuleId::MEMSET_INIT}) {
            CAPTURE(to_string(r));
            auto res = auto_plan(tu, {r}, false);
            if (res.report.applied.empty())
                CHECK(cost(res.tu) == cost(tu));
            else
                CHECK(cost(res.tu) < cost(tu));
        }
    }
    auto f = fact();
    auto all = auto_plan(f, rewritable(), false);
    CHECK(cost(all.tu) * 10 < cost(f));
}

TEST_CASE("printed output reparses to the same unit")
{
    for (const auto& tu : {heap(), fact()}) {
        auto res = auto_plan(tu, rewritable(), false);
        auto back = parse_source(pretty_print(res.tu), {}, tu.file);
        CHECK(structurally_equal(back, res.tu));
        auto second = auto_plan(res.tu, rewritable(), false);
        CHECK(pretty_print(auto_plan(second.tu, rewritable(), false).tu) ==
              pretty_print(auto_plan(back, rewritable(), false).tu) );
    }
}

TEST_CASE("unified diff")
{
    CHECK(unified_diff("a\nb\n", "a\nb\n", "x", "y").empty());
    CHECK(unified_diff("a\nb\nc\n", "a\nB\nc\n", "a/t.c", "b/t.c") ==
          "--- a/t.c\n+++ b/t.c\n@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n");
    std::string before, after;
    for (int i = 1; i <= 20; ++i) {
        before += std::to_string(i) + "\n";
        after += (i == 2 || i == 18 ? "x" : std::to_string(i)) + "\n";
    }
    std::string d = unified_diff(before, after, "a", "b");
    CHECK(d.find("@@ -1,5 +1,5 @@") != std::string::npos);
    CHECK(d.find("@@ -15,6 +15,6 @@") != std::string::npos);
    CHECK(unified_diff("", "a\n", "a", "b") == "--- a\n+++ b\n@@ -0,0 +1,1 @@\n+a\n");
}

TEST_CASE("change report text")
{
    auto tu = heap();
    auto r = auto_plan(tu, {RuleId::FN_INLINE}, false);
    std::string text = render_change_report(r.report, tu, r.tu);
    CHECK(text.rfind("applied 1, skipped 0\n", 0) == 0);
    CHECK(text.find("APPLIED FN_INLINE heap.c:47") != std::string::npos);
    CHECK(text.find("--- a/heap.c\n+++ b/heap.c\n") != std::string::npos);
    CHECK(text.find("-        swap(&a[1], &a[i + 1]);\n+        {\n") != std::string::npos);
}
