#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hcopt/ast.hpp"

namespace hcopt {

enum class RuleId {
    LOOP_COUNTDOWN,
    FN_INLINE,
    GLOBAL_REG_ALIAS,
    BITWISE_CONV,
    NESTED_IF_MERGE,
    MEMSET_INIT,
    UNSIGNED_PROMOTE,
    ADV_RECURSION,
    ADV_MULTIDIM_ARRAY,
    ADV_STATIC_LINKAGE,
    ADV_TINY_FN_MACRO,
    ADV_WORD_SIZE,
};

std::string_view to_string(RuleId r);
std::optional<RuleId> rule_from_string(std::string_view s);
bool is_advisory(RuleId r);
const std::vector<RuleId>& all_rules();
const std::vector<RuleId>& rewritable_rules();

enum class Safety { Safe, UnsafeNeedsOverride, Advisory };

std::string_view to_string(Safety s);

/// Where a finding lives in the unit it was detected on. Statement paths index
/// into Stmt::body from the function body; expression paths index into args.
struct FindingTarget {
    int function = -1;
    std::vector<int> stmt_path;
    int slot = -1; // 0 for-init, 1 expr/condition, 2 for-step, 3 declaration initializer
    std::vector<int> expr_path;

    bool operator==(const FindingTarget&) const = default;
};

struct Finding {
    RuleId rule = RuleId::LOOP_COUNTDOWN;
    SourceSpan span;
    std::string function; // "<global>" outside functions
    Safety safety = Safety::Safe;
    std::string rationale;
    std::map<std::string, std::string> payload;
    FindingTarget target;

    bool operator==(const Finding&) const = default;
};

struct AnalysisOptions {
    int max_inline_statements = 3;
    int max_inline_params = 2;
};

/// Findings for the requested rules, ordered by position then rule.
std::vector<Finding> detect(const TranslationUnit& tu, const std::set<RuleId>& rules,
                            const AnalysisOptions& options = {});

/// No assignment, increment, decrement or call anywhere in `e`.
bool side_effect_free(const Expr& e, const TranslationUnit& tu);

/// Root is a comparison, && / || or !.
bool is_boolean_valued(const Expr& e);

struct GlobalUse {
    std::string name;
    int uses = 0;
    bool calls_in_region = false;

    bool operator==(const GlobalUse&) const = default;
};

/// Globals referenced by `fn`, in declaration order.
std::vector<GlobalUse> global_hot_uses(const TranslationUnit& tu, const FunctionDef& fn);

enum class LoopDir { Up, Down };

struct CanonicalLoop {
    std::string var;
    Expr init;
    Expr bound;
    LoopDir dir = LoopDir::Up;
    bool step1 = true;
    bool inclusive = true; // <= or >=
    bool var_written_in_body = false;
    bool bound_loop_invariant = false;
};

std::optional<CanonicalLoop> loop_shape(const Stmt& s);

/// Columns: rule, file:line, function, safety, rationale.
std::string render_findings(const std::vector<Finding>& findings, bool tsv);

// Shared helpers for the rewrite module.
bool mentions(const Expr& e, std::string_view name);
bool mentions(const Stmt& s, std::string_view name);
std::set<std::string> identifiers(const TranslationUnit& tu);
const Stmt& stmt_at(const FunctionDef& fn, const std::vector<int>& path);
Stmt& stmt_at(FunctionDef& fn, const std::vector<int>& path);

} // namespace hcopt
