#pragma once

#include <string>
#include <utility>
#include <vector>

#include "amdl/model.hpp"

namespace amdl {

struct LiftReport {
    AbstractModel model;
    std::vector<std::string> warnings;
    /// Tables that cannot be represented abstractly, with the reason; every
    /// schema table appears either in the model or here.
    std::vector<std::pair<Identifier, std::string>> excluded_tables;
};

/// Reconstructs an abstract model from a relational schema: classifies every
/// table, nests each multivalued table under exactly one chosen parent,
/// suppresses the redundant entity reference of that attachment, and strips
/// foreign key columns from the attribute lists.  Parent choice prefers the
/// candidate whose key columns form the longest prefix of the child's primary
/// key, then the smallest parent name; rejected candidates are reported as
/// warnings.
LiftReport lift_schema(const RelationalSchema& schema);

}  // namespace amdl
