#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hcopt/lexer.hpp"

namespace hcopt {

struct MacroDef {
    std::string name;
    std::optional<std::vector<std::string>> params; // absent for object-like macros
    std::vector<Token> replacement;
    std::string replacement_text;
    SourceSpan span;

    bool function_like() const { return params.has_value(); }
};

struct PreprocessResult {
    std::string text;
    std::vector<MacroDef> macros;
    LineMap lines; // output line -> source line
};

/// Names defined on the command line. A name maps to its replacement text;
/// "1" when given without a value.
using Predefined = std::map<std::string, std::string>;

constexpr int kMaxMacroDepth = 16;

/// Handles #include (dropped), #define, #undef, #ifdef, #ifndef, #else and
/// #endif. Directive lines and disabled regions are removed from the output.
PreprocessResult preprocess(std::string_view source, const Predefined& predefined = {},
                            const std::string& file = {});

PreprocessResult preprocess(std::string_view source, const std::set<std::string>& predefined,
                            const std::string& file = {});

} // namespace hcopt
