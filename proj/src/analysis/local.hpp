#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hcopt/analysis.hpp"

namespace hcopt::detail {

struct FunctionRef {
    int function = -1;
    std::vector<int> path;
    const Stmt* stmt = nullptr;
    std::vector<const Stmt*> chain; // ancestors, outermost first
};

struct ArrayInfo {
    CType elem;
    std::int64_t extent = 0;
};

struct MemsetShape {
    std::string array;
    std::string var;
    Expr lo;
    Expr hi; // exclusive
};

bool writes_var(const Expr& e, std::string_view v);
bool writes_var(const Stmt& s, std::string_view v);
bool address_taken(const Stmt& s, std::string_view v);
bool declares(const Stmt& s, std::string_view v);
bool has_user_call(const Stmt& s, const TranslationUnit& tu);
std::set<std::string> local_names(const FunctionDef& fn);
const VarDecl* find_local_decl(const FunctionDef& fn, std::string_view name);
std::optional<CType> var_type(const TranslationUnit& tu, const FunctionDef& fn, std::string_view name, bool* is_array);

Expr fold_add(Expr e, std::int64_t k);
Expr fold_sub(Expr b, const Expr& a);

std::vector<FunctionRef> all_stmts(const TranslationUnit& tu);
bool dead_after(const FunctionDef& fn, const std::vector<int>& path, const std::string& v);
std::optional<ArrayInfo> resolve_array(const TranslationUnit& tu, const FunctionDef& fn, const std::string& name);
std::optional<MemsetShape> memset_shape(const Stmt& s);

} // namespace hcopt::detail
