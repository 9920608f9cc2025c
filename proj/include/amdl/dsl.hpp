#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amdl/model.hpp"

namespace amdl {

struct SourceSpan {
    std::string file;
    int line = 1;    // 1-based
    int column = 1;  // 1-based
};

struct ParseDiagnostic {
    enum class Severity { error, warning };

    SourceSpan span;
    Severity severity = Severity::error;
    std::string message;
};

/// Renders a diagnostic as "file:line:col: severity: message".
std::string to_string(const ParseDiagnostic& diagnostic);

struct ParseResult {
    std::optional<AbstractModel> model;  // set iff no error diagnostics
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return model.has_value(); }
};

/// Parses model source text.  Total: any byte sequence yields either a
/// validated model or diagnostics, never an exception.  Member order follows
/// source order.
ParseResult parse_model(std::string_view source, std::string file = "<input>");

/// Canonical pretty-printer; parse_model(format_model(m)) reproduces m.
std::string format_model(const AbstractModel& model);

}  // namespace amdl
