#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace amdl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A case-sensitive name matching [A-Za-z_][A-Za-z0-9_]*.
class Identifier {
public:
    explicit Identifier(std::string text);

    static bool is_valid(std::string_view text) noexcept;

    const std::string& str() const noexcept { return text_; }

    friend bool operator==(const Identifier&, const Identifier&) = default;
    friend auto operator<=>(const Identifier&, const Identifier&) = default;

private:
    std::string text_;
};

std::ostream& operator<<(std::ostream& os, const Identifier& id);

// ---------------------------------------------------------------------------
// Relational side
// ---------------------------------------------------------------------------

struct Column {
    Identifier name;
    Identifier domain;

    friend bool operator==(const Column&, const Column&) = default;
};

/// A concrete table design: named columns plus a designated primary key.
/// Column order is significant only for deterministic output.
struct RelationalTable {
    Identifier name;
    std::vector<Column> columns;
    std::vector<Identifier> primary_key;  // names of existing columns

    const Column* find_column(const Identifier& column_name) const;
    bool in_primary_key(const Identifier& column_name) const;

    friend bool operator==(const RelationalTable&, const RelationalTable&) = default;
};

/// A referential constraint from source_columns (in source_table) to
/// target_columns (in target_table), paired positionally.
struct ForeignKeyConstraint {
    Identifier name;
    Identifier source_table;
    std::vector<Identifier> source_columns;
    Identifier target_table;
    std::vector<Identifier> target_columns;

    friend bool operator==(const ForeignKeyConstraint&, const ForeignKeyConstraint&) = default;
};

struct RelationalSchema {
    std::vector<RelationalTable> tables;
    std::vector<ForeignKeyConstraint> constraints;

    const RelationalTable* find_table(const Identifier& name) const;
    const ForeignKeyConstraint* find_constraint(const Identifier& name) const;
    const RelationalTable& require_table(const Identifier& name) const;

    friend bool operator==(const RelationalSchema&, const RelationalSchema&) = default;
};

/// Structural invariant check; empty result means the schema is internally
/// consistent (unique names, nonempty resolvable primary keys, constraints
/// with matching arities that resolve to real tables and columns).
std::vector<std::string> check_schema(const RelationalSchema& schema);

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

/// Entity: the table has no foreign key whose source columns all lie inside
/// its primary key.  Multivalued: some simple foreign key constraint covers a
/// proper subset of the primary key (the witness).  Neither: anything else.
struct TableClass {
    enum class Kind { entity, multivalued, neither };

    Kind kind = Kind::entity;
    std::optional<Identifier> witness;  // multivalued: the witnessing constraint
    std::string diagnostic;             // neither: why

    static TableClass make_entity() { return {Kind::entity, std::nullopt, {}}; }
    static TableClass make_multivalued(Identifier w) {
        return {Kind::multivalued, std::move(w), {}};
    }
    static TableClass make_neither(std::string why) {
        return {Kind::neither, std::nullopt, std::move(why)};
    }

    bool entity() const { return kind == Kind::entity; }
    bool multivalued() const { return kind == Kind::multivalued; }
    bool neither() const { return kind == Kind::neither; }
};

enum class Repeating { single, multiple };
enum class Defining { nonentity, entity };

struct AttributeClassification {
    Repeating repeating;
    Defining defining;
};

/// Number of additional database tables an attribute of this class requires.
int tables_required(AttributeClassification c) noexcept;

bool is_simple_fk(const RelationalSchema& schema, const ForeignKeyConstraint& constraint);

TableClass classify_table(const RelationalSchema& schema, const Identifier& table);

/// Simple constraints from `table` on a proper subset of its primary key,
/// ranked: longest primary-key prefix first, then smallest target table name,
/// then declaration order.  The first entry is the classification witness.
std::vector<const ForeignKeyConstraint*> multivalued_witnesses(const RelationalSchema& schema,
                                                               const Identifier& table);

struct TableReference {
    Identifier constraint;
    Identifier table;  // entity reference: the target; multivalued: the child

    friend bool operator==(const TableReference&, const TableReference&) = default;
};

/// Entity references from a simple table: simple constraints on a proper
/// subset of the table's columns whose target is an entity table, in
/// declaration order.
std::vector<TableReference> entity_references_of(const RelationalSchema& schema,
                                                 const Identifier& table);

/// Multivalued references from a simple table: one per multivalued table
/// whose witnessing constraint targets it, in table declaration order.
std::vector<TableReference> multivalued_references_of(const RelationalSchema& schema,
                                                      const Identifier& table);

/// True iff `eps` arises from the same constraint by which its source table
/// is attached to its chosen parent.  `chosen_parent` maps each multivalued
/// table to the parent it is nested under.
bool is_redundant_entity_reference(const RelationalSchema& schema,
                                   const TableReference& eps,
                                   const std::map<Identifier, Identifier>& chosen_parent);

// ---------------------------------------------------------------------------
// Abstract side
// ---------------------------------------------------------------------------

struct AbstractTable;

/// A single-valued attribute over a plain domain.
struct PlainAttribute {
    Identifier name;
    Identifier domain;
    bool in_key = false;

    friend bool operator==(const PlainAttribute&, const PlainAttribute&) = default;
};

/// A single-valued reference to an entity table.  column_names, when
/// nonempty, fixes the synthesized foreign key column names.
struct EntityReference {
    Identifier name;
    Identifier target;
    bool in_key = false;
    std::vector<Identifier> column_names;

    friend bool operator==(const EntityReference&, const EntityReference&) = default;
};

/// A repeating attribute group, held as a nested multivalued table.
struct MultivaluedChild {
    Identifier name;
    std::shared_ptr<const AbstractTable> child;  // never null

    const AbstractTable& table() const;
};

using Member = std::variant<PlainAttribute, EntityReference, MultivaluedChild>;

const Identifier& member_name(const Member& member);

struct AbstractTable {
    enum class Kind { entity, multivalued };

    Identifier name;
    Kind kind = Kind::entity;
    std::vector<Member> members;
};

inline const AbstractTable& MultivaluedChild::table() const { return *child; }

struct AbstractModel {
    std::vector<AbstractTable> tables;  // top-level entity tables

    /// Looks up a table anywhere in the model, including nested children.
    const AbstractTable* find_table(const Identifier& name) const;
};

/// Deep equality including member order and explicit column names.
bool structurally_equal(const AbstractModel& a, const AbstractModel& b);
bool structurally_equal(const AbstractTable& a, const AbstractTable& b);
bool structurally_equal(const Member& a, const Member& b);

/// Depth-first pre-order walk over every table in the model.
void for_each_table(const AbstractModel& model,
                    const std::function<void(const AbstractTable&)>& fn);

struct ValidationIssue {
    std::string table;   // offending table ("" for model-level issues)
    std::string member;  // offending member ("" for table-level issues)
    std::string message;
};

/// Well-formedness of an abstract model: global name uniqueness, entity
/// reference targets exist and are entity tables, key-closure termination,
/// and every entity table carries a key member.
std::vector<ValidationIssue> validate_model(const AbstractModel& model);

// ---------------------------------------------------------------------------
// Reference graph
// ---------------------------------------------------------------------------

enum class ArcKind { epsilon, mu };

struct ReferenceArc {
    Identifier from;
    Identifier to;
    ArcKind kind;
    Identifier constraint;

    friend bool operator==(const ReferenceArc&, const ReferenceArc&) = default;
};

/// Directed graph of entity and multivalued references.  The mu arcs of a
/// valid model form a forest rooted at entity tables; epsilon arcs may form
/// directed cycles.
struct ReferenceGraph {
    std::vector<Identifier> vertices;  // depth-first pre-order
    std::vector<ReferenceArc> arcs;
};

ReferenceGraph build_reference_graph(const AbstractModel& model);

}  // namespace amdl
