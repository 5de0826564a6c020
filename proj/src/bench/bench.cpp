#include "hcopt/bench.hpp"

#include <algorithm>
#include <cstdio>

#include "hcopt/rewrite.hpp"

namespace hcopt {

namespace {

struct RunOutcome {
    std::string out;
    int exit_code = 0;
    std::string error; // empty when the run finished
    std::uint64_t cost = 0;
};

RunOutcome run_once(const TranslationUnit& tu, std::int64_t seed, const BenchConfig& config)
{
    RunConfig rc;
    rc.seed = seed;
    rc.argv = config.argv;
    rc.step_limit = config.step_limit;
    rc.cost_model = config.cost_model;
    try {
        ExecResult r = run(tu, config.entry, rc);
        return {std::move(r.stdout_bytes), r.exit_code, "", r.cost.total};
    } catch (const Error& e) {
        return {"", 0, std::string(to_string(e.kind())) + ": " + e.what(), 0};
    }
}

std::string describe(const RunOutcome& r, std::size_t offset)
{
    if (!r.error.empty())
        return r.error;
    if (offset < r.out.size()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "byte 0x%02x", static_cast<unsigned char>(r.out[offset]));
        return buf;
    }
    return "end of output, exit " + std::to_string(r.exit_code);
}

std::optional<Divergence> compare(std::int64_t seed, const RunOutcome& a, const RunOutcome& b)
{
    if (a.out == b.out && a.exit_code == b.exit_code && a.error == b.error)
        return std::nullopt;
    auto offset = static_cast<std::size_t>(
        std::mismatch(a.out.begin(), a.out.end(), b.out.begin(), b.out.end()).first - a.out.begin());
    return Divergence{seed, offset, describe(a, offset), describe(b, offset)};
}

BenchOutcome summarize(const std::vector<RunOutcome>& runs, const BenchConfig& config)
{
    BenchOutcome out;
    for (std::size_t s = 0; s < config.seeds.size(); ++s) {
        const RunOutcome& a = runs[2 * s];
        const RunOutcome& b = runs[2 * s + 1];
        out.cost_before += a.cost;
        out.cost_after += b.cost;
        if (auto d = compare(config.seeds[s], a, b); d && out.equivalent) {
            out.equivalent = false;
            out.divergence = d;
        }
    }
    if (out.cost_before > 0)
        out.reduction_percent = 100.0 * (static_cast<double>(out.cost_before) - static_cast<double>(out.cost_after)) /
                                static_cast<double>(out.cost_before);
    return out;
}

} // namespace

BenchOutcome bench_outcome(const TranslationUnit& before, const TranslationUnit& after, const BenchConfig& config)
{
    const int n = static_cast<int>(config.seeds.size()) * 2;
    std::vector<RunOutcome> runs(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        runs[static_cast<std::size_t>(i)] =
            run_once(i % 2 == 0 ? before : after, config.seeds[static_cast<std::size_t>(i / 2)], config);
    return summarize(runs, config);
}

BenchOutcome bench_outcome_serial(const TranslationUnit& before, const TranslationUnit& after,
                                  const BenchConfig& config)
{
    std::vector<RunOutcome> runs;
    for (std::int64_t seed : config.seeds) {
        runs.push_back(run_once(before, seed, config));
        runs.push_back(run_once(after, seed, config));
    }
    return summarize(runs, config);
}

std::map<RuleId, std::int64_t> rule_breakdown(const TranslationUnit& tu, const std::set<RuleId>& rules,
                                              const BenchConfig& config)
{
    std::map<RuleId, std::int64_t> out;
    for (RuleId r : rules) {
        if (is_advisory(r))
            continue;
        RewriteResult res = auto_plan(tu, {r}, false);
        BenchOutcome b = bench_outcome(tu, res.tu, config);
        out[r] = static_cast<std::int64_t>(b.cost_before) - static_cast<std::int64_t>(b.cost_after);
    }
    return out;
}

std::string render_bench(const BenchOutcome& o, bool tsv)
{
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.2f", o.reduction_percent);
    std::string out;
    auto row = [&](const std::string& k, const std::string& v) { out += k + (tsv ? "\t" : ": ") + v + "\n"; };
    row("equivalent", o.equivalent ? "true" : "false");
    row("cost_before", std::to_string(o.cost_before));
    row("cost_after", std::to_string(o.cost_after));
    row("reduction_percent", pct);
    for (const auto& [rule, delta] : o.per_rule_breakdown)
        row(std::string(to_string(rule)), std::to_string(delta));
    if (o.divergence) {
        const Divergence& d = *o.divergence;
        row("divergence", "seed " + std::to_string(d.seed) + " offset " + std::to_string(d.offset));
        row("before", d.before);
        row("after", d.after);
    }
    return out;
}

} // namespace hcopt
