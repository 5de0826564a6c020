#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcopt/ast.hpp"
#include "hcopt/group_by.hpp"

namespace hcopt {

enum class CostCategory {
    Arith,
    Compare,
    Bitwise,
    LogicalBranching,
    Load,
    Store,
    Branch,
    DivMod,
    CallOverhead,
    BuiltinCall,
    LoopBackEdge,
};
inline constexpr std::size_t kCostCategories = 11;

std::string_view to_string(CostCategory c);
std::optional<CostCategory> cost_category_from_string(std::string_view s);

struct CostModel {
    static constexpr int kVersion = 1;
    std::array<std::uint64_t, kCostCategories> weights{};

    std::uint64_t weight(CostCategory c) const { return weights[static_cast<std::size_t>(c)]; }
    static CostModel defaults();
    /// {"version": 1, "weights": {"arith": 1, ...}}; unlisted categories keep defaults.
    static CostModel from_json(std::string_view text);
};

struct CostReport {
    std::array<std::uint64_t, kCostCategories> counts{};
    std::map<std::string, std::uint64_t> per_function;
    std::map<std::string, std::uint64_t> per_location; // "file:line"
    std::uint64_t total = 0;

    std::uint64_t count(CostCategory c) const { return counts[static_cast<std::size_t>(c)]; }
    std::uint64_t recount(const CostModel& model) const;
};

struct RunConfig {
    std::int64_t seed = 1;
    std::optional<std::int64_t> time_value; // defaults to seed
    std::vector<std::string> argv;          // argv[1..]; argv[0] is the unit's file name
    std::uint64_t step_limit = 50'000'000;
    int max_call_depth = 1000;
    CostModel cost_model = CostModel::defaults();
    bool trace = false;
};

struct ExecResult {
    std::string stdout_bytes;
    int exit_code = 0;
    CostReport cost;
    std::uint64_t steps = 0;
    std::string trace; // TSV, filled when RunConfig::trace is set
};

ExecResult run(const TranslationUnit& tu, std::string_view entry = "main", const RunConfig& config = {});

struct CostRow {
    std::string scope;
    std::uint64_t cost = 0;
    double share = 0; // percent, unrounded
};

/// Rows by descending cost, ties by scope name.
std::vector<CostRow> cost_attribution(const ExecResult& result, GroupBy group_by);

std::string render_cost_rows(const std::vector<CostRow>& rows, bool tsv);

/// rand() as seeded by srand(seed).
class Lcg {
public:
    explicit Lcg(std::uint32_t seed = 1) : state_(seed) {}
    void seed(std::uint32_t s) { state_ = s; }
    int next()
    {
        state_ = state_ * 1103515245u + 12345u;
        return static_cast<int>((state_ / 65536u) % 32768u);
    }

private:
    std::uint32_t state_;
};

} // namespace hcopt
