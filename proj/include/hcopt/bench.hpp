#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hcopt/analysis.hpp"
#include "hcopt/ast.hpp"
#include "hcopt/interp.hpp"

namespace hcopt {

struct BenchConfig {
    std::string entry = "main";
    std::vector<std::int64_t> seeds{1, 42, 20071};
    CostModel cost_model = CostModel::defaults();
    std::vector<std::string> argv;
    std::uint64_t step_limit = 50'000'000;
};

struct Divergence {
    std::int64_t seed = 0;
    std::size_t offset = 0; // first differing stdout byte
    std::string before;     // short description of each side at the divergence
    std::string after;

    bool operator==(const Divergence&) const = default;
};

struct BenchOutcome {
    bool equivalent = true;
    std::uint64_t cost_before = 0; // summed over seeds
    std::uint64_t cost_after = 0;
    double reduction_percent = 0;
    std::map<RuleId, std::int64_t> per_rule_breakdown; // cost saved by each rule applied alone
    std::optional<Divergence> divergence;              // lowest diverging seed in config order

    bool operator==(const BenchOutcome&) const = default;
};

/// Runs both units under every seed. Runs execute concurrently.
BenchOutcome bench_outcome(const TranslationUnit& before, const TranslationUnit& after, const BenchConfig& config = {});

/// Same result as bench_outcome, one run at a time.
BenchOutcome bench_outcome_serial(const TranslationUnit& before, const TranslationUnit& after,
                                  const BenchConfig& config = {});

/// Cost saved over the seed set when each rule is auto-planned alone with SAFE findings.
std::map<RuleId, std::int64_t> rule_breakdown(const TranslationUnit& tu, const std::set<RuleId>& rules,
                                              const BenchConfig& config = {});

std::string render_bench(const BenchOutcome& outcome, bool tsv);

} // namespace hcopt
