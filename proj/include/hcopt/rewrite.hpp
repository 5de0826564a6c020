#pragma once

#include <set>
#include <string>
#include <vector>

#include "hcopt/analysis.hpp"
#include "hcopt/ast.hpp"

namespace hcopt {

struct AppliedChange {
    Finding finding;
    std::string before;
    std::string after;
};

struct SkippedChange {
    Finding finding;
    std::string reason; // STALE_SPAN, NEEDS_OVERRIDE, NOT_REWRITABLE
};

struct ChangeReport {
    std::vector<AppliedChange> applied;
    std::vector<SkippedChange> skipped;
    std::set<std::string> functions_touched;
};

struct RewriteResult {
    TranslationUnit tu;
    ChangeReport report;
};

/// Applies findings in order. Each one is re-detected on the current unit and
/// matched by rule, span and payload; a finding that no longer matches is
/// skipped as STALE_SPAN.
RewriteResult apply_plan(const TranslationUnit& tu, const std::vector<Finding>& findings, bool allow_unsafe,
                         const AnalysisOptions& options = {});

/// GLOBAL_REG_ALIAS, FN_INLINE, NESTED_IF_MERGE, BITWISE_CONV, MEMSET_INIT,
/// LOOP_COUNTDOWN, UNSIGNED_PROMOTE.
const std::vector<RuleId>& auto_plan_order();

/// Detects and applies one rule at a time in auto_plan_order().
RewriteResult auto_plan(const TranslationUnit& tu, const std::set<RuleId>& rules, bool allow_unsafe,
                        const AnalysisOptions& options = {});

Stmt rewrite_countdown(const Stmt& loop, const CanonicalLoop& canonical);
Stmt rewrite_inline(const TranslationUnit& tu, const Stmt& call_stmt, const FunctionDef& callee);
FunctionDef rewrite_global_alias(const TranslationUnit& tu, const FunctionDef& fn, const std::string& global);
Expr rewrite_bitwise(const Expr& e);
Stmt rewrite_nested_if_merge(const Stmt& s);
Stmt rewrite_memset(const Stmt& loop, const CType& elem);
FunctionDef rewrite_unsigned(const FunctionDef& fn, const std::string& var);

/// Line diff with `context` lines around each hunk. Empty when equal.
std::string unified_diff(const std::string& before, const std::string& after, const std::string& before_name,
                         const std::string& after_name, int context = 3);

std::string render_change_report(const ChangeReport& report, const TranslationUnit& before,
                                 const TranslationUnit& after);

} // namespace hcopt
