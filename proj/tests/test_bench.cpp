#include "doctest.h"

#include "hcopt/bench.hpp"
#include "hcopt/parser.hpp"
#include "hcopt/rewrite.hpp"

using namespace hcopt;

namespace {

std::string fixture(const std::string& name) { return std::string(HCOPT_FIXTURE_DIR) + "/" + name; }

const Predefined small_debug{{"SMALL", "1"}, {"DEBUG", "1"}};

std::set<RuleId> rewritable() { return {rewritable_rules().begin(), rewritable_rules().end()}; }

} // namespace

TEST_CASE("self comparison")
{
    auto tu = load_file(fixture("heap.c"), small_debug);
    auto b = bench_outcome(tu, tu);
    CHECK(b.equivalent);
    CHECK(b.cost_before == b.cost_after);
    CHECK(b.cost_before > 0);
    CHECK(b.reduction_percent == 0.0);
    CHECK_FALSE(b.divergence);
    CHECK(render_bench(b, false).find("reduction_percent: 0.00\n") != std::string::npos);
}

TEST_CASE("safe auto plan is equivalent and cheaper")
{
    for (const char* name : {"heap.c", "fact.c"}) {
        CAPTURE(name);
        auto tu = load_file(fixture(name), small_debug);
        auto opt = auto_plan(tu, rewritable(), false).tu;
        auto b = bench_outcome(tu, opt);
        CHECK(b.equivalent);
        CHECK(b.reduction_percent > 0);
        CHECK(b.cost_after < b.cost_before);
    }
}

TEST_CASE("divergence reports the first differing byte")
{
    auto a = parse_source("int main() { printf(\"abcdef\"); return 0; }");
    auto b = parse_source("int main() { printf(\"abcXef\"); return 0; }");
    auto o = bench_outcome(a, b);
    CHECK_FALSE(o.equivalent);
    REQUIRE(o.divergence);
    CHECK(o.divergence->seed == 1);
    CHECK(o.divergence->offset == 3);
    CHECK(o.divergence->before == "byte 0x64");
    CHECK(o.divergence->after == "byte 0x58");

    auto exit_only = bench_outcome(a, parse_source("int main() { printf(\"abcdef\"); return 1; }"));
    REQUIRE(exit_only.divergence);
    CHECK(exit_only.divergence->offset == 6);
    CHECK(exit_only.divergence->after == "end of output, exit 1");

    auto seeded = parse_source("int main() { srand(time(0)); if (rand() % 2) printf(\"x\"); return 0; }");
    auto flipped = parse_source("int main() { srand(time(0)); if (rand() % 2 == 0) printf(\"x\"); return 0; }");
    auto s = bench_outcome(seeded, flipped);
    CHECK_FALSE(s.equivalent);
}

TEST_CASE("runtime errors are part of the outcome")
{
    auto ok = parse_source("int main() { int a[2]; a[1] = 0; return 0; }");
    auto bad = parse_source("int main() { int a[2]; a[5] = 0; return 0; }");
    auto o = bench_outcome(ok, bad);
    CHECK_FALSE(o.equivalent);
    REQUIRE(o.divergence);
    CHECK(o.divergence->after.find(':') != std::string::npos);
    CHECK(bench_outcome(bad, bad).equivalent);
}

TEST_CASE("parallel and serial agree")
{
    BenchConfig config;
    config.seeds = {1, 2, 3, 42, 99, 20071};
    for (const char* name : {"heap.c", "fact.c"}) {
        auto tu = load_file(fixture(name), small_debug);
        auto opt = auto_plan(tu, rewritable(), false).tu;
        CHECK(bench_outcome(tu, opt, config) == bench_outcome_serial(tu, opt, config));
        auto unsafe = auto_plan(tu, rewritable(), true).tu;
        CHECK(bench_outcome(tu, unsafe, config) == bench_outcome_serial(tu, unsafe, config));
    }
}

TEST_CASE("rule breakdown")
{
    auto tu = load_file(fixture("fact.c"), small_debug);
    auto d = rule_breakdown(tu, rewritable());
    CHECK(d.size() == 7);
    CHECK(d.at(RuleId::LOOP_COUNTDOWN) > 0);
    CHECK(d.at(RuleId::GLOBAL_REG_ALIAS) > 0);
    CHECK(d.at(RuleId::MEMSET_INIT) > 0);
    CHECK(d.at(RuleId::NESTED_IF_MERGE) == 0);
    CHECK(rule_breakdown(tu, {RuleId::ADV_RECURSION}).empty());
}
