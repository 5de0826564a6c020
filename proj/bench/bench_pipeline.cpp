#include <benchmark/benchmark.h>

#include "hcopt/bench.hpp"
#include "hcopt/parser.hpp"
#include "hcopt/printer.hpp"
#include "hcopt/rewrite.hpp"

using namespace hcopt;

namespace {

TranslationUnit fixture(const char* name)
{
    return load_file(std::string(HCOPT_FIXTURE_DIR) + "/" + name, {{"SMALL", "1"}, {"DEBUG", "1"}});
}

std::set<RuleId> rewritable() { return {rewritable_rules().begin(), rewritable_rules().end()}; }

void BM_Parse(benchmark::State& state)
{
    std::string src = pretty_print(fixture("heap.c"));
    for (auto _ : state)
        benchmark::DoNotOptimize(parse_source(src, {}, "heap.c"));
}
BENCHMARK(BM_Parse);

void BM_Detect(benchmark::State& state)
{
    auto tu = fixture("fact.c");
    std::set<RuleId> all(all_rules().begin(), all_rules().end());
    for (auto _ : state)
        benchmark::DoNotOptimize(detect(tu, all));
}
BENCHMARK(BM_Detect);

void BM_AutoPlan(benchmark::State& state)
{
    auto tu = fixture("heap.c");
    for (auto _ : state)
        benchmark::DoNotOptimize(auto_plan(tu, rewritable(), false));
}
BENCHMARK(BM_AutoPlan);

void BM_Run(benchmark::State& state)
{
    auto tu = fixture("heap.c");
    for (auto _ : state)
        benchmark::DoNotOptimize(run(tu));
}
BENCHMARK(BM_Run);

void BM_BenchOutcome(benchmark::State& state)
{
    auto tu = fixture("heap.c");
    auto opt = auto_plan(tu, rewritable(), false).tu;
    for (auto _ : state)
        benchmark::DoNotOptimize(state.range(0) ? bench_outcome(tu, opt) : bench_outcome_serial(tu, opt));
}
BENCHMARK(BM_BenchOutcome)->Arg(0)->Arg(1);

} // namespace

BENCHMARK_MAIN();
