#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "amdl/compile.hpp"
#include "amdl/dsl.hpp"
#include "amdl/emit.hpp"
#include "amdl/lift.hpp"
#include "amdl/model.hpp"

namespace support {

// --- builders ---------------------------------------------------------------

amdl::Identifier id(const std::string& text);
std::vector<amdl::Identifier> ids(const std::vector<std::string>& names);

amdl::RelationalTable make_table(const std::string& name,
                                 const std::vector<std::pair<std::string, std::string>>& columns,
                                 const std::vector<std::string>& primary_key);

amdl::ForeignKeyConstraint make_fk(const std::string& name, const std::string& source,
                                   const std::vector<std::string>& source_columns,
                                   const std::string& target,
                                   const std::vector<std::string>& target_columns);

// --- corpus -----------------------------------------------------------------

std::string models_dir();
std::string read_file(const std::string& path);
std::string corpus_path(const std::string& name);
/// Parses models/<name>; throws on any diagnostic.
amdl::AbstractModel parse_corpus(const std::string& name);
std::vector<std::string> corpus_names();

// --- comparisons ------------------------------------------------------------

/// Order-insensitive model equivalence: tables matched positionally at the
/// top level, members matched by name (member sets are equal and each pair is
/// structurally equal; children compare recursively).
bool equivalent_models(const amdl::AbstractModel& a, const amdl::AbstractModel& b);

/// Schema equality up to constraint names and column order: tables compared
/// as (name, column set, primary key set), constraints as (source, source
/// column set, target, target column set).
bool same_structure(const amdl::RelationalSchema& a, const amdl::RelationalSchema& b);

// --- random generation ------------------------------------------------------

struct ModelGenOptions {
    int max_entities = 6;
    int max_depth = 3;       // nesting depth of multivalued children
    int max_members = 5;     // members per table
};

/// A random valid abstract model (asserted against validate_model).
amdl::AbstractModel random_model(std::mt19937& rng, const ModelGenOptions& options = {});

/// A random internally-consistent relational schema of at most four tables,
/// spanning entity, multivalued and neither-class shapes.
amdl::RelationalSchema random_schema(std::mt19937& rng);

// --- independent verifiers --------------------------------------------------

/// Direct transcription of the table-class definitions: 'E', 'M' or 'N'.
char independent_class(const amdl::RelationalSchema& schema, const amdl::Identifier& table);

/// Checks a lifted model against the abstract-table conditions by brute
/// force; returns human-readable violations (empty means consistent).
std::vector<std::string> verify_lift_conditions(const amdl::RelationalSchema& schema,
                                                const amdl::LiftReport& report);

/// Enumerates every parent assignment consistent with the definitions and
/// confirms the lifter's choice is a member.
bool lift_choice_in_valid_assignments(const amdl::RelationalSchema& schema,
                                      const amdl::LiftReport& report);

/// The mu arcs form a forest whose roots are entity tables.
bool mu_forest_with_entity_roots(const amdl::AbstractModel& model);

// --- hierarchy reparse oracle -----------------------------------------------

struct HMember {
    std::string name;
    bool key = false;
    bool is_ref = false;               // name[Target]
    std::string target;                // is_ref only
    bool is_group = false;             // name(children...)
    std::vector<HMember> children;     // is_group only
};

/// Parses one H(...) line; returns root name + members, or nullopt on a
/// malformed line.
std::optional<std::pair<std::string, std::vector<HMember>>> parse_h_line(const std::string& line);

/// Compares a reparsed H line against the abstract table it renders.
bool h_members_match(const std::vector<HMember>& members, const amdl::AbstractTable& table);

// --- embedded SQL engine ----------------------------------------------------

/// Runs DDL against an in-memory SQLite database with foreign keys enabled;
/// returns the first error message, or nullopt on success.
std::optional<std::string> run_sql(const std::string& ddl);

}  // namespace support
