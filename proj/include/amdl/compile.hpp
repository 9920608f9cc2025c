#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "amdl/model.hpp"

namespace amdl {

struct KeyClosureEntry {
    std::vector<Column> columns;  // the fully resolved primary key, in order
    std::size_t inherited = 0;    // leading columns inherited from the parent

    friend bool operator==(const KeyClosureEntry&, const KeyClosureEntry&) = default;
};

/// Fully resolved primary keys, one entry per table name.
using KeyClosure = std::map<std::string, KeyClosureEntry>;

/// Resolves every table's primary key by expanding inherited parent keys and
/// key entity references, evaluated topologically over the parent and key
/// reference arcs.  Throws on a key dependency cycle.
KeyClosure resolve_key_closure(const AbstractModel& model);

struct TableSynthesis {
    std::vector<Column> columns;                              // final column order
    std::vector<Identifier> primary_key;
    std::map<std::string, std::vector<Column>> ref_columns;   // per entity reference
};

/// Concrete columns for one abstract table: inherited key columns first, then
/// declared members in order.  Foreign key columns take the target's key
/// names unless explicit names are given; a colliding default is prefixed
/// with the reference name.  Key references are named before non-key
/// references so primary keys never depend on non-key synthesis.
TableSynthesis synthesize_table(const AbstractTable& table, const std::vector<Column>& inherited,
                                const KeyClosure& closure);

/// The concrete columns carrying one entity reference.
std::vector<Column> synthesize_fk_columns(const AbstractTable& table, const EntityReference& ref,
                                          const KeyClosure& closure);

/// Expands a valid abstract model into a relational schema: one table per
/// abstract table in depth-first order, one simple foreign key constraint per
/// reference member.
RelationalSchema compile_model(const AbstractModel& model);

}  // namespace amdl
