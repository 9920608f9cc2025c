#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amdl/model.hpp"

namespace amdl {

/// SQL:1999 DDL, one CREATE TABLE per table with inline PRIMARY KEY and
/// FOREIGN KEY clauses.  Tables are reordered topologically so constraint
/// targets precede their sources; constraints that cannot be satisfied that
/// way (cyclic references) are emitted as trailing ALTER TABLE statements.
std::string emit_sql(const RelationalSchema& schema);

/// One H(root) line per entity table: multivalued children in parentheses,
/// entity references in square brackets, key members wrapped in asterisks.
struct HierarchyDoc {
    std::vector<std::string> lines;

    std::string text() const;
};

HierarchyDoc emit_hierarchy(const AbstractModel& model);

/// DOT description of the reference graph: entity tables as boxes,
/// multivalued tables as ellipses, solid entity-reference arcs and dashed
/// multivalued-reference arcs labeled by reference name.
std::string emit_graph(const AbstractModel& model);

/// Canonical JSON interchange form of a relational schema.
std::string emit_json(const RelationalSchema& schema);

struct LoadResult {
    std::optional<RelationalSchema> schema;  // set iff errors is empty
    std::vector<std::string> errors;
    bool malformed = false;  // true when the text is not well-formed JSON

    bool ok() const { return schema.has_value(); }
};

/// Parses and validates the canonical JSON form; load_json(emit_json(s))
/// reproduces s exactly.
LoadResult load_json(std::string_view text);

}  // namespace amdl
