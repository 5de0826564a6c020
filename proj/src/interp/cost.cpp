#include <algorithm>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "hcopt/interp.hpp"

namespace hcopt {

namespace {

constexpr std::array<std::string_view, kCostCategories> kCategoryNames = {
    "arith", "compare", "bitwise", "logical_branching", "load", "store",
    "branch", "div_mod", "call_overhead", "builtin_call", "loop_back_edge",
};

} // namespace

std::string_view to_string(CostCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<CostCategory> cost_category_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kCostCategories; ++i)
        if (kCategoryNames[i] == s)
            return static_cast<CostCategory>(i);
    return std::nullopt;
}

CostModel CostModel::defaults()
{
    CostModel m;
    auto set = [&](CostCategory c, std::uint64_t w) { m.weights[static_cast<std::size_t>(c)] = w; };
    set(CostCategory::Arith, 1);
    set(CostCategory::Compare, 1);
    set(CostCategory::Bitwise, 1);
    set(CostCategory::LogicalBranching, 2);
    set(CostCategory::Load, 1);
    set(CostCategory::Store, 1);
    set(CostCategory::Branch, 1);
    set(CostCategory::DivMod, 4);
    set(CostCategory::CallOverhead, 8);
    set(CostCategory::BuiltinCall, 2);
    set(CostCategory::LoopBackEdge, 1);
    return m;
}

CostModel CostModel::from_json(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("cost model is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw Error(ErrorKind::InvalidArgument, "cost model must be a JSON object");
    if (doc.contains("version") && doc["version"] != kVersion)
        throw Error(ErrorKind::InvalidArgument, "unsupported cost model version " + doc["version"].dump());
    CostModel m = defaults();
    if (!doc.contains("weights"))
        return m;
    const auto& w = doc["weights"];
    if (!w.is_object())
        throw Error(ErrorKind::InvalidArgument, "\"weights\" must be an object");
    for (const auto& [key, value] : w.items()) {
        auto cat = cost_category_from_string(key);
        if (!cat)
            throw Error(ErrorKind::InvalidArgument, "unknown cost category '" + key + "'");
        if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
            throw Error(ErrorKind::InvalidArgument, "weight for '" + key + "' must be a non-negative integer");
        m.weights[static_cast<std::size_t>(*cat)] = value.get<std::uint64_t>();
    }
    return m;
}

std::uint64_t CostReport::recount(const CostModel& model) const
{
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < kCostCategories; ++i)
        sum += counts[i] * model.weights[i];
    return sum;
}

std::vector<CostRow> cost_attribution(const ExecResult& result, GroupBy group_by)
{
    const auto& source = group_by == GroupBy::Function ? result.cost.per_function : result.cost.per_location;
    std::vector<CostRow> rows;
    for (const auto& [scope, cost] : source) {
        double share = result.cost.total ? 100.0 * static_cast<double>(cost) / static_cast<double>(result.cost.total)
                                         : 0.0;
        rows.push_back(CostRow{scope, cost, share});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CostRow& a, const CostRow& b) {
        if (a.cost != b.cost)
            return a.cost > b.cost;
        return a.scope < b.scope;
    });
    return rows;
}

std::string render_cost_rows(const std::vector<CostRow>& rows, bool tsv)
{
    auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    std::string out;
    if (tsv) {
        out = "scope\tcost\tshare\n";
        for (const auto& r : rows)
            out += r.scope + "\t" + std::to_string(r.cost) + "\t" + pct(r.share) + "\n";
        return out;
    }
    std::size_t w0 = 5, w1 = 4;
    for (const auto& r : rows) {
        w0 = std::max(w0, r.scope.size());
        w1 = std::max(w1, std::to_string(r.cost).size());
    }
    auto line = [&](const std::string& a, const std::string& b, const std::string& c) {
        std::string s = a + std::string(w0 - a.size() + 2, ' ');
        s += std::string(w1 - b.size(), ' ') + b + "  ";
        s += std::string(c.size() < 7 ? 7 - c.size() : 0, ' ') + c + "\n";
        return s;
    };
    out += line("scope", "cost", "share%");
    for (const auto& r : rows)
        out += line(r.scope, std::to_string(r.cost), pct(r.share));
    return out;
}

} // namespace hcopt
