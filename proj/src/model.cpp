#include "amdl/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace amdl {

namespace {

std::set<std::string> name_set(const std::vector<Identifier>& names) {
    std::set<std::string> out;
    for (const auto& n : names) out.insert(n.str());
    return out;
}

bool subset_of(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// Identifier
// ---------------------------------------------------------------------------

bool Identifier::is_valid(std::string_view text) noexcept {
    if (text.empty()) return false;
    auto head = [](char c) { return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(text.front())) return false;
    return std::all_of(text.begin() + 1, text.end(), tail);
}

Identifier::Identifier(std::string text) : text_(std::move(text)) {
    if (!is_valid(text_)) throw Error("invalid identifier '" + text_ + "'");
}

std::ostream& operator<<(std::ostream& os, const Identifier& id) { return os << id.str(); }

// ---------------------------------------------------------------------------
// Relational lookups
// ---------------------------------------------------------------------------

const Column* RelationalTable::find_column(const Identifier& column_name) const {
    for (const auto& c : columns)
        if (c.name == column_name) return &c;
    return nullptr;
}

bool RelationalTable::in_primary_key(const Identifier& column_name) const {
    return std::find(primary_key.begin(), primary_key.end(), column_name) != primary_key.end();
}

const RelationalTable* RelationalSchema::find_table(const Identifier& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

const ForeignKeyConstraint* RelationalSchema::find_constraint(const Identifier& name) const {
    for (const auto& c : constraints)
        if (c.name == name) return &c;
    return nullptr;
}

const RelationalTable& RelationalSchema::require_table(const Identifier& name) const {
    const RelationalTable* t = find_table(name);
    if (!t) throw Error("unknown table " + name.str());
    return *t;
}

std::vector<std::string> check_schema(const RelationalSchema& schema) {
    std::vector<std::string> errors;
    std::set<std::string> table_names;
    for (const auto& t : schema.tables) {
        if (!table_names.insert(t.name.str()).second)
            errors.push_back("duplicate table name " + t.name.str());
        std::set<std::string> cols;
        for (const auto& c : t.columns)
            if (!cols.insert(c.name.str()).second)
                errors.push_back("table " + t.name.str() + ": duplicate column name " + c.name.str());
        if (t.primary_key.empty())
            errors.push_back("table " + t.name.str() + ": empty primary key");
        std::set<std::string> pk_seen;
        for (const auto& k : t.primary_key) {
            if (!t.find_column(k))
                errors.push_back("table " + t.name.str() + ": primary key column " + k.str() +
                                 " does not exist");
            else if (!pk_seen.insert(k.str()).second)
                errors.push_back("table " + t.name.str() + ": primary key repeats column " +
                                 k.str());
        }
    }
    std::set<std::string> constraint_names;
    for (const auto& f : schema.constraints) {
        if (!constraint_names.insert(f.name.str()).second) {
            errors.push_back("duplicate constraint name " + f.name.str());
            continue;
        }
        const RelationalTable* src = schema.find_table(f.source_table);
        if (!src) {
            errors.push_back("constraint " + f.name.str() + ": unknown source table " +
                             f.source_table.str());
            continue;
        }
        const RelationalTable* dst = schema.find_table(f.target_table);
        if (!dst) {
            errors.push_back("constraint " + f.name.str() + ": unknown target table " +
                             f.target_table.str());
            continue;
        }
        if (f.source_columns.empty() || f.source_columns.size() != f.target_columns.size()) {
            errors.push_back("constraint " + f.name.str() +
                             ": source and target column counts differ or are empty");
            continue;
        }
        if (name_set(f.source_columns).size() != f.source_columns.size()) {
            errors.push_back("constraint " + f.name.str() + ": duplicate source column");
            continue;
        }
        if (name_set(f.target_columns).size() != f.target_columns.size()) {
            errors.push_back("constraint " + f.name.str() + ": duplicate target column");
            continue;
        }
        for (const auto& c : f.source_columns)
            if (!src->find_column(c))
                errors.push_back("constraint " + f.name.str() + ": source column " + c.str() +
                                 " not in table " + src->name.str());
        for (const auto& c : f.target_columns)
            if (!dst->find_column(c))
                errors.push_back("constraint " + f.name.str() + ": target column " + c.str() +
                                 " not in table " + dst->name.str());
    }
    return errors;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

int tables_required(AttributeClassification c) noexcept {
    int n = 0;
    if (c.repeating == Repeating::multiple) n += 1;  // the multivalued table
    if (c.defining == Defining::entity) n += 1;      // the defining entity table
    return n;
}

bool is_simple_fk(const RelationalSchema& schema, const ForeignKeyConstraint& constraint) {
    const RelationalTable& target = schema.require_table(constraint.target_table);
    return name_set(constraint.target_columns) == name_set(target.primary_key);
}

namespace {

std::size_t pk_prefix_length(const std::vector<Identifier>& source_columns,
                             const std::vector<Identifier>& primary_key) {
    std::set<std::string> src = name_set(source_columns);
    std::size_t n = 0;
    for (const auto& k : primary_key) {
        if (!src.count(k.str())) break;
        ++n;
    }
    return n;
}

}  // namespace

std::vector<const ForeignKeyConstraint*> multivalued_witnesses(const RelationalSchema& schema,
                                                               const Identifier& table) {
    const RelationalTable& t = schema.require_table(table);
    std::set<std::string> pk = name_set(t.primary_key);
    std::vector<const ForeignKeyConstraint*> out;
    for (const auto& f : schema.constraints) {
        if (f.source_table != table) continue;
        std::set<std::string> src = name_set(f.source_columns);
        // A witness may cover the whole primary key: that is the compiled
        // shape of a child with no key members of its own (one row per
        // parent).
        if (!subset_of(src, pk)) continue;
        if (!is_simple_fk(schema, f)) continue;
        out.push_back(&f);
    }
    std::stable_sort(out.begin(), out.end(),
                     [&](const ForeignKeyConstraint* a, const ForeignKeyConstraint* b) {
                         std::size_t pa = pk_prefix_length(a->source_columns, t.primary_key);
                         std::size_t pb = pk_prefix_length(b->source_columns, t.primary_key);
                         if (pa != pb) return pa > pb;
                         return a->target_table < b->target_table;
                     });
    return out;
}

TableClass classify_table(const RelationalSchema& schema, const Identifier& table) {
    const RelationalTable& t = schema.require_table(table);
    std::set<std::string> pk = name_set(t.primary_key);

    std::vector<const ForeignKeyConstraint*> witnesses = multivalued_witnesses(schema, table);
    if (!witnesses.empty()) return TableClass::make_multivalued(witnesses.front()->name);

    for (const auto& f : schema.constraints) {
        if (f.source_table != table) continue;
        if (subset_of(name_set(f.source_columns), pk)) {
            return TableClass::make_neither(
                "constraint " + f.name.str() +
                " places foreign key columns inside the primary key, but no simple foreign key "
                "constraint on a proper subset of the primary key exists");
        }
    }
    return TableClass::make_entity();
}

std::vector<TableReference> entity_references_of(const RelationalSchema& schema,
                                                 const Identifier& table) {
    const RelationalTable& t = schema.require_table(table);
    TableClass cls = classify_table(schema, table);
    if (cls.neither())
        throw Error("table " + table.str() + " is not a simple table: " + cls.diagnostic);

    std::set<std::string> all_columns;
    for (const auto& c : t.columns) all_columns.insert(c.name.str());

    std::vector<TableReference> out;
    for (const auto& f : schema.constraints) {
        if (f.source_table != table) continue;
        std::set<std::string> src = name_set(f.source_columns);
        if (!subset_of(src, all_columns) || src.size() == all_columns.size()) continue;
        if (!is_simple_fk(schema, f)) continue;
        if (!classify_table(schema, f.target_table).entity()) continue;
        out.push_back({f.name, f.target_table});
    }
    return out;
}

std::vector<TableReference> multivalued_references_of(const RelationalSchema& schema,
                                                      const Identifier& table) {
    TableClass cls = classify_table(schema, table);
    if (cls.neither())
        throw Error("table " + table.str() + " is not a simple table: " + cls.diagnostic);

    std::vector<TableReference> out;
    for (const auto& u : schema.tables) {
        if (u.name == table) continue;
        TableClass ucls = classify_table(schema, u.name);
        if (!ucls.multivalued()) continue;
        const ForeignKeyConstraint* witness = schema.find_constraint(*ucls.witness);
        if (witness && witness->target_table == table) out.push_back({witness->name, u.name});
    }
    return out;
}

bool is_redundant_entity_reference(const RelationalSchema& schema,
                                   const TableReference& eps,
                                   const std::map<Identifier, Identifier>& chosen_parent) {
    const ForeignKeyConstraint* f = schema.find_constraint(eps.constraint);
    if (!f) throw Error("unknown constraint " + eps.constraint.str());
    if (!classify_table(schema, f->source_table).multivalued()) return false;

    auto it = chosen_parent.find(f->source_table);
    if (it == chosen_parent.end()) return false;
    if (f->target_table != it->second) return false;

    // The attachment constraint is the best-ranked witness targeting the
    // chosen parent.
    for (const ForeignKeyConstraint* w : multivalued_witnesses(schema, f->source_table)) {
        if (w->target_table == it->second) return w->name == f->name;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Abstract model
// ---------------------------------------------------------------------------

const Identifier& member_name(const Member& member) {
    return std::visit([](const auto& m) -> const Identifier& { return m.name; }, member);
}

namespace {

const AbstractTable* find_in_table(const AbstractTable& table, const Identifier& name) {
    if (table.name == name) return &table;
    for (const auto& m : table.members) {
        if (const auto* mv = std::get_if<MultivaluedChild>(&m)) {
            if (const AbstractTable* hit = find_in_table(mv->table(), name)) return hit;
        }
    }
    return nullptr;
}

void walk_table(const AbstractTable& table, const std::function<void(const AbstractTable&)>& fn) {
    fn(table);
    for (const auto& m : table.members)
        if (const auto* mv = std::get_if<MultivaluedChild>(&m)) walk_table(mv->table(), fn);
}

}  // namespace

const AbstractTable* AbstractModel::find_table(const Identifier& name) const {
    for (const auto& t : tables)
        if (const AbstractTable* hit = find_in_table(t, name)) return hit;
    return nullptr;
}

void for_each_table(const AbstractModel& model,
                    const std::function<void(const AbstractTable&)>& fn) {
    for (const auto& t : model.tables) walk_table(t, fn);
}

bool structurally_equal(const Member& a, const Member& b) {
    if (a.index() != b.index()) return false;
    if (const auto* pa = std::get_if<PlainAttribute>(&a)) return *pa == std::get<PlainAttribute>(b);
    if (const auto* ea = std::get_if<EntityReference>(&a)) return *ea == std::get<EntityReference>(b);
    const auto& ma = std::get<MultivaluedChild>(a);
    const auto& mb = std::get<MultivaluedChild>(b);
    return ma.name == mb.name && structurally_equal(ma.table(), mb.table());
}

bool structurally_equal(const AbstractTable& a, const AbstractTable& b) {
    if (a.name != b.name || a.kind != b.kind || a.members.size() != b.members.size()) return false;
    for (std::size_t i = 0; i < a.members.size(); ++i)
        if (!structurally_equal(a.members[i], b.members[i])) return false;
    return true;
}

bool structurally_equal(const AbstractModel& a, const AbstractModel& b) {
    if (a.tables.size() != b.tables.size()) return false;
    for (std::size_t i = 0; i < a.tables.size(); ++i)
        if (!structurally_equal(a.tables[i], b.tables[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct Validator {
    const AbstractModel& model;
    std::vector<ValidationIssue> issues;
    std::map<std::string, const AbstractTable*> by_name;
    std::map<std::string, std::string> reference_names;  // reference -> owning table

    void collect_names(const AbstractTable& table) {
        auto [it, fresh] = by_name.emplace(table.name.str(), &table);
        if (!fresh) issues.push_back({table.name.str(), "", "duplicate table name " + table.name.str()});
        for (const auto& m : table.members)
            if (const auto* mv = std::get_if<MultivaluedChild>(&m)) collect_names(mv->table());
    }

    void check_table(const AbstractTable& table, bool top_level) {
        if (top_level && table.kind != AbstractTable::Kind::entity)
            issues.push_back({table.name.str(), "", "top-level table " + table.name.str() +
                                                        " must be an entity table"});
        std::set<std::string> member_names;
        bool has_key = false;
        for (const auto& m : table.members) {
            const std::string mname = member_name(m).str();
            bool fresh_member = member_names.insert(mname).second;
            if (!fresh_member)
                issues.push_back({table.name.str(), mname, "duplicate member name " + mname});
            // Reference names become constraint names, a global namespace.
            if (fresh_member && !std::holds_alternative<PlainAttribute>(m)) {
                auto [it, fresh] = reference_names.emplace(mname, table.name.str());
                if (!fresh)
                    issues.push_back({table.name.str(), mname,
                                      "duplicate reference name " + mname + " (also used in table " +
                                          it->second + ")"});
            }
            if (const auto* p = std::get_if<PlainAttribute>(&m)) {
                has_key = has_key || p->in_key;
            } else if (const auto* e = std::get_if<EntityReference>(&m)) {
                has_key = has_key || e->in_key;
                auto it = by_name.find(e->target.str());
                if (it == by_name.end()) {
                    issues.push_back({table.name.str(), mname,
                                      "unknown entity table " + e->target.str()});
                } else if (it->second->kind != AbstractTable::Kind::entity) {
                    issues.push_back({table.name.str(), mname,
                                      "entity reference target " + e->target.str() +
                                          " is not an entity table"});
                }
            } else {
                const auto& mv = std::get<MultivaluedChild>(m);
                if (!mv.child) {
                    issues.push_back({table.name.str(), mname, "multivalued member has no table"});
                    continue;
                }
                if (mv.table().kind != AbstractTable::Kind::multivalued)
                    issues.push_back({table.name.str(), mname,
                                      "entity table " + mv.table().name.str() +
                                          " nested as a multivalued child"});
                check_table(mv.table(), false);
            }
        }
        if (top_level && !has_key)
            issues.push_back({table.name.str(), "",
                              "entity table " + table.name.str() + " has no key member"});
    }

    // Key resolution terminates iff the graph of "key of X needs key of Y"
    // arcs (multivalued child -> parent, table -> in_key reference target)
    // is acyclic.
    void check_key_cycles() {
        std::map<std::string, std::vector<std::string>> deps;
        std::map<std::string, std::string> parent_of;
        for_each_table(model, [&](const AbstractTable& t) {
            auto& d = deps[t.name.str()];
            for (const auto& m : t.members) {
                if (const auto* e = std::get_if<EntityReference>(&m)) {
                    if (e->in_key && by_name.count(e->target.str()))
                        d.push_back(e->target.str());
                } else if (const auto* mv = std::get_if<MultivaluedChild>(&m)) {
                    if (mv->child) parent_of[mv->table().name.str()] = t.name.str();
                }
            }
        });
        for (const auto& [child, parent] : parent_of) deps[child].push_back(parent);

        std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
        std::vector<std::string> stack;
        bool reported = false;

        std::function<void(const std::string&)> visit = [&](const std::string& node) {
            if (reported) return;
            state[node] = 1;
            stack.push_back(node);
            for (const auto& next : deps[node]) {
                int s = state.count(next) ? state[next] : 0;
                if (s == 1) {
                    std::ostringstream path;
                    auto begin = std::find(stack.begin(), stack.end(), next);
                    path << "key-closure cycle ";
                    for (auto it = begin; it != stack.end(); ++it) path << *it << " -> ";
                    path << next;
                    issues.push_back({node, "", path.str()});
                    reported = true;
                    return;
                }
                if (s == 0) visit(next);
                if (reported) return;
            }
            stack.pop_back();
            state[node] = 2;
        };
        for (const auto& [name, table] : by_name) {
            (void)table;
            if ((state.count(name) ? state[name] : 0) == 0 && !reported) visit(name);
        }
    }
};

}  // namespace

std::vector<ValidationIssue> validate_model(const AbstractModel& model) {
    Validator v{model, {}, {}, {}};
    for (const auto& t : model.tables) v.collect_names(t);
    for (const auto& t : model.tables) v.check_table(t, true);
    if (v.issues.empty()) v.check_key_cycles();
    return std::move(v.issues);
}

// ---------------------------------------------------------------------------
// Reference graph
// ---------------------------------------------------------------------------

ReferenceGraph build_reference_graph(const AbstractModel& model) {
    ReferenceGraph g;
    for_each_table(model, [&](const AbstractTable& t) {
        g.vertices.push_back(t.name);
        for (const auto& m : t.members) {
            if (const auto* e = std::get_if<EntityReference>(&m)) {
                g.arcs.push_back({t.name, e->target, ArcKind::epsilon, e->name});
            } else if (const auto* mv = std::get_if<MultivaluedChild>(&m)) {
                g.arcs.push_back({t.name, mv->table().name, ArcKind::mu, mv->name});
            }
        }
    });
    return g;
}

}  // namespace amdl
