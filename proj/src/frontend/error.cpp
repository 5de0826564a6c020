#include "hcopt/error.hpp"

namespace hcopt {

std::string to_string(const SourceSpan& span)
{
    std::string out = span.file.empty() ? std::string("<input>") : span.file;
    out += ':';
    out += std::to_string(span.line_start);
    out += ':';
    out += std::to_string(span.col_start);
    return out;
}

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::UnterminatedString: return "UnterminatedString";
    case ErrorKind::UnterminatedComment: return "UnterminatedComment";
    case ErrorKind::IllegalCharacter: return "IllegalCharacter";
    case ErrorKind::UnbalancedConditional: return "UnbalancedConditional";
    case ErrorKind::RecursiveMacro: return "RecursiveMacro";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnresolvedIdentifier: return "UnresolvedIdentifier";
    case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::SpanMismatch: return "SpanMismatch";
    case ErrorKind::EarlyReturnUnsupported: return "EarlyReturnUnsupported";
    case ErrorKind::NameCollision: return "NameCollision";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::NullDeref: return "NullDeref";
    case ErrorKind::UnknownEntry: return "UnknownEntry";
    case ErrorKind::UseAfterFree: return "UseAfterFree";
    case ErrorKind::InvalidFree: return "InvalidFree";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::BadFormat: return "BadFormat";
    case ErrorKind::CallDepthExceeded: return "CallDepthExceeded";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::UnknownEvent: return "UnknownEvent";
    case ErrorKind::MissingMeta: return "MissingMeta";
    case ErrorKind::ZeroTotal: return "ZeroTotal";
    case ErrorKind::ZeroInstructions: return "ZeroInstructions";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

static std::string compose(ErrorKind kind, const std::string& message, const std::optional<SourceSpan>& span)
{
    std::string out;
    if (span)
        out += to_string(*span) + ": ";
    out += std::string(to_string(kind));
    if (!message.empty())
        out += ": " + message;
    return out;
}

Error::Error(ErrorKind kind, std::string message, std::optional<SourceSpan> span)
    : std::runtime_error(compose(kind, message, span)), kind_(kind), span_(std::move(span)),
      detail_(std::move(message))
{
}

bool is_frontend_error(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::UnterminatedString:
    case ErrorKind::UnterminatedComment:
    case ErrorKind::IllegalCharacter:
    case ErrorKind::UnbalancedConditional:
    case ErrorKind::RecursiveMacro:
    case ErrorKind::SyntaxError:
    case ErrorKind::UnresolvedIdentifier:
    case ErrorKind::UnsupportedConstruct:
        return true;
    default:
        return false;
    }
}

} // namespace hcopt
