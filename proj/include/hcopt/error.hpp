#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hcopt {

/// 1-based source position range. `file` names the translation unit.
struct SourceSpan {
    std::string file;
    int line_start = 0;
    int col_start = 0;
    int line_end = 0;
    int col_end = 0;

    bool valid() const
    {
        if (line_start < 1 || line_end < line_start)
            return false;
        return line_start != line_end || col_start <= col_end;
    }

    bool operator==(const SourceSpan&) const = default;
    auto operator<=>(const SourceSpan&) const = default;
};

std::string to_string(const SourceSpan& span);

enum class ErrorKind {
    // lexer / preprocessor
    UnterminatedString,
    UnterminatedComment,
    IllegalCharacter,
    UnbalancedConditional,
    RecursiveMacro,
    // parser
    SyntaxError,
    UnresolvedIdentifier,
    UnsupportedConstruct,
    // rewrite
    PreconditionViolated,
    SpanMismatch,
    EarlyReturnUnsupported,
    NameCollision,
    // interpreter
    OutOfBounds,
    DivisionByZero,
    StepLimitExceeded,
    NullDeref,
    UnknownEntry,
    UseAfterFree,
    InvalidFree,
    TypeMismatch,
    BadFormat,
    CallDepthExceeded,
    // profile metrics
    MalformedLine,
    UnknownEvent,
    MissingMeta,
    ZeroTotal,
    ZeroInstructions,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. Carries a kind for programmatic
/// dispatch and, where one exists, the offending source position.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::optional<SourceSpan> span = std::nullopt);

    ErrorKind kind() const { return kind_; }
    const std::optional<SourceSpan>& span() const { return span_; }
    const std::string& detail() const { return detail_; }

private:
    ErrorKind kind_;
    std::optional<SourceSpan> span_;
    std::string detail_;
};

bool is_frontend_error(ErrorKind kind);

} // namespace hcopt
