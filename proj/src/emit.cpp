#include "amdl/emit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace amdl {

// ---------------------------------------------------------------------------
// SQL
// ---------------------------------------------------------------------------

namespace {

std::string column_list(const std::vector<Identifier>& names) {
    std::ostringstream os;
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? ", " : "") << names[i];
    return os.str();
}

std::string fk_clause(const ForeignKeyConstraint& f) {
    std::ostringstream os;
    os << "CONSTRAINT " << f.name << " FOREIGN KEY (" << column_list(f.source_columns)
       << ") REFERENCES " << f.target_table << " (" << column_list(f.target_columns) << ")";
    return os.str();
}

/// Table emission order: targets before sources where possible, declaration
/// order breaking ties; tables on reference cycles keep declaration order.
std::vector<std::size_t> ddl_order(const RelationalSchema& schema) {
    const std::size_t n = schema.tables.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[schema.tables[i].name.str()] = i;

    std::vector<std::set<std::size_t>> successors(n);
    std::vector<std::size_t> blockers(n, 0);
    for (const auto& f : schema.constraints) {
        if (f.source_table == f.target_table) continue;  // self-references inline fine
        std::size_t src = index.at(f.source_table.str());
        std::size_t dst = index.at(f.target_table.str());
        if (successors[dst].insert(src).second) ++blockers[src];
    }

    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (blockers[i] == 0) ready.insert(i);

    std::vector<std::size_t> order;
    std::vector<bool> placed(n, false);
    while (!ready.empty()) {
        std::size_t next = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(next);
        placed[next] = true;
        for (std::size_t s : successors[next])
            if (--blockers[s] == 0) ready.insert(s);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!placed[i]) order.push_back(i);
    return order;
}

}  // namespace

std::string emit_sql(const RelationalSchema& schema) {
    std::vector<std::size_t> order = ddl_order(schema);
    std::map<std::string, std::size_t> rank;
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        rank[schema.tables[order[pos]].name.str()] = pos;

    std::vector<std::string> statements;
    std::vector<const ForeignKeyConstraint*> deferred;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const RelationalTable& t = schema.tables[order[pos]];
        std::ostringstream os;
        os << "CREATE TABLE " << t.name << " (\n";
        for (const auto& c : t.columns) os << "  " << c.name << " " << c.domain << " NOT NULL,\n";
        os << "  PRIMARY KEY (" << column_list(t.primary_key) << ")";
        for (const auto& f : schema.constraints) {
            if (f.source_table != t.name) continue;
            if (rank.at(f.target_table.str()) <= pos) {
                os << ",\n  " << fk_clause(f);
            } else {
                deferred.push_back(&f);
            }
        }
        os << "\n)";
        statements.push_back(os.str());
    }
    // Deferred constraints in declaration order.
    std::stable_sort(deferred.begin(), deferred.end(),
                     [&](const ForeignKeyConstraint* a, const ForeignKeyConstraint* b) {
                         return a - schema.constraints.data() < b - schema.constraints.data();
                     });
    for (const ForeignKeyConstraint* f : deferred)
        statements.push_back("ALTER TABLE " + f->source_table.str() + " ADD " + fk_clause(*f));

    std::ostringstream out;
    for (std::size_t i = 0; i < statements.size(); ++i) {
        out << statements[i] << ";\n";
        if (i + 1 < statements.size()) out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Hierarchical form
// ---------------------------------------------------------------------------

namespace {

void render_members(const AbstractTable& table, std::ostream& os) {
    bool first = true;
    for (const auto& m : table.members) {
        if (!first) os << ", ";
        first = false;
        if (const auto* p = std::get_if<PlainAttribute>(&m)) {
            os << (p->in_key ? "*" : "") << p->name << (p->in_key ? "*" : "");
        } else if (const auto* e = std::get_if<EntityReference>(&m)) {
            os << (e->in_key ? "*" : "") << e->name << "[" << e->target << "]"
               << (e->in_key ? "*" : "");
        } else {
            const auto& mv = std::get<MultivaluedChild>(m);
            os << mv.name << "(";
            render_members(mv.table(), os);
            os << ")";
        }
    }
}

}  // namespace

std::string HierarchyDoc::text() const {
    std::ostringstream os;
    for (const auto& line : lines) os << line << "\n";
    return os.str();
}

HierarchyDoc emit_hierarchy(const AbstractModel& model) {
    HierarchyDoc doc;
    for (const auto& t : model.tables) {
        std::ostringstream os;
        os << "H(" << t.name << "):";
        if (!t.members.empty()) {
            os << " ";
            render_members(t, os);
        }
        doc.lines.push_back(os.str());
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Reference graph
// ---------------------------------------------------------------------------

std::string emit_graph(const AbstractModel& model) {
    ReferenceGraph g = build_reference_graph(model);
    std::ostringstream os;
    os << "digraph model {\n";
    for (const auto& v : g.vertices) {
        const AbstractTable* t = model.find_table(v);
        bool entity = t && t->kind == AbstractTable::Kind::entity;
        os << "  " << v << " [shape=" << (entity ? "box" : "ellipse") << "];\n";
    }
    for (const auto& a : g.arcs) {
        os << "  " << a.from << " -> " << a.to << " [style="
           << (a.kind == ArcKind::epsilon ? "solid" : "dashed") << ", label=\"" << a.constraint
           << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// JSON interchange
// ---------------------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json names_to_json(const std::vector<Identifier>& names) {
    ordered_json arr = ordered_json::array();
    for (const auto& n : names) arr.push_back(n.str());
    return arr;
}

struct Loader {
    std::vector<std::string> errors;

    std::optional<Identifier> identifier(const ordered_json& value, const std::string& where) {
        if (!value.is_string()) {
            errors.push_back(where + " must be a string");
            return std::nullopt;
        }
        std::string text = value.get<std::string>();
        if (!Identifier::is_valid(text)) {
            errors.push_back(where + " '" + text + "' is not a valid identifier");
            return std::nullopt;
        }
        return Identifier(std::move(text));
    }

    std::optional<std::vector<Identifier>> identifier_list(const ordered_json& value,
                                                           const std::string& where) {
        if (!value.is_array()) {
            errors.push_back(where + " must be an array");
            return std::nullopt;
        }
        std::vector<Identifier> out;
        for (std::size_t i = 0; i < value.size(); ++i) {
            auto id = identifier(value[i], where + "[" + std::to_string(i) + "]");
            if (!id) return std::nullopt;
            out.push_back(std::move(*id));
        }
        return out;
    }

    const ordered_json* field(const ordered_json& obj, const char* key, const std::string& where) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            errors.push_back(where + ": missing field '" + key + "'");
            return nullptr;
        }
        return &*it;
    }
};

}  // namespace

std::string emit_json(const RelationalSchema& schema) {
    ordered_json doc;
    doc["tables"] = ordered_json::array();
    for (const auto& t : schema.tables) {
        ordered_json table;
        table["name"] = t.name.str();
        table["columns"] = ordered_json::array();
        for (const auto& c : t.columns) {
            ordered_json col;
            col["name"] = c.name.str();
            col["domain"] = c.domain.str();
            table["columns"].push_back(std::move(col));
        }
        table["primary_key"] = names_to_json(t.primary_key);
        doc["tables"].push_back(std::move(table));
    }
    doc["constraints"] = ordered_json::array();
    for (const auto& f : schema.constraints) {
        ordered_json c;
        c["name"] = f.name.str();
        c["source_table"] = f.source_table.str();
        c["source_columns"] = names_to_json(f.source_columns);
        c["target_table"] = f.target_table.str();
        c["target_columns"] = names_to_json(f.target_columns);
        doc["constraints"].push_back(std::move(c));
    }
    return doc.dump(2) + "\n";
}

LoadResult load_json(std::string_view text) {
    LoadResult result;
    ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        result.malformed = true;
        result.errors.push_back("malformed JSON document");
        return result;
    }

    Loader loader;
    if (!doc.is_object()) {
        result.errors.push_back("document must be a JSON object");
        return result;
    }

    RelationalSchema schema;
    const ordered_json* tables = loader.field(doc, "tables", "document");
    if (tables && !tables->is_array()) loader.errors.push_back("'tables' must be an array");
    if (tables && tables->is_array()) {
        for (std::size_t i = 0; i < tables->size(); ++i) {
            const ordered_json& jt = (*tables)[i];
            std::string where = "tables[" + std::to_string(i) + "]";
            if (!jt.is_object()) {
                loader.errors.push_back(where + " must be an object");
                continue;
            }
            RelationalTable table{Identifier("t"), {}, {}};
            const ordered_json* jname = loader.field(jt, "name", where);
            if (!jname) continue;
            auto name = loader.identifier(*jname, where + ".name");
            if (!name) continue;
            table.name = *name;

            const ordered_json* jcols = loader.field(jt, "columns", where);
            if (!jcols) continue;
            if (!jcols->is_array()) {
                loader.errors.push_back(where + ".columns must be an array");
                continue;
            }
            bool bad = false;
            for (std::size_t k = 0; k < jcols->size(); ++k) {
                const ordered_json& jc = (*jcols)[k];
                std::string cwhere = where + ".columns[" + std::to_string(k) + "]";
                if (!jc.is_object()) {
                    loader.errors.push_back(cwhere + " must be an object");
                    bad = true;
                    break;
                }
                const ordered_json* cn = loader.field(jc, "name", cwhere);
                const ordered_json* cd = loader.field(jc, "domain", cwhere);
                if (!cn || !cd) {
                    bad = true;
                    break;
                }
                auto col_name = loader.identifier(*cn, cwhere + ".name");
                auto col_domain = loader.identifier(*cd, cwhere + ".domain");
                if (!col_name || !col_domain) {
                    bad = true;
                    break;
                }
                table.columns.push_back({*col_name, *col_domain});
            }
            if (bad) continue;

            const ordered_json* jpk = loader.field(jt, "primary_key", where);
            if (!jpk) continue;
            auto pk = loader.identifier_list(*jpk, where + ".primary_key");
            if (!pk) continue;
            table.primary_key = std::move(*pk);
            schema.tables.push_back(std::move(table));
        }
    }

    const ordered_json* constraints = loader.field(doc, "constraints", "document");
    if (constraints && !constraints->is_array())
        loader.errors.push_back("'constraints' must be an array");
    if (constraints && constraints->is_array()) {
        for (std::size_t i = 0; i < constraints->size(); ++i) {
            const ordered_json& jf = (*constraints)[i];
            std::string where = "constraints[" + std::to_string(i) + "]";
            if (!jf.is_object()) {
                loader.errors.push_back(where + " must be an object");
                continue;
            }
            const ordered_json* jn = loader.field(jf, "name", where);
            const ordered_json* jst = loader.field(jf, "source_table", where);
            const ordered_json* jsc = loader.field(jf, "source_columns", where);
            const ordered_json* jtt = loader.field(jf, "target_table", where);
            const ordered_json* jtc = loader.field(jf, "target_columns", where);
            if (!jn || !jst || !jsc || !jtt || !jtc) continue;
            auto name = loader.identifier(*jn, where + ".name");
            if (!name) continue;
            auto source_table = loader.identifier(*jst, where + ".source_table");
            if (!source_table) continue;
            auto source_columns = loader.identifier_list(*jsc, where + ".source_columns");
            if (!source_columns) continue;
            auto target_table = loader.identifier(*jtt, where + ".target_table");
            if (!target_table) continue;
            auto target_columns = loader.identifier_list(*jtc, where + ".target_columns");
            if (!target_columns) continue;
            schema.constraints.push_back({std::move(*name), std::move(*source_table),
                                          std::move(*source_columns), std::move(*target_table),
                                          std::move(*target_columns)});
        }
    }

    result.errors = std::move(loader.errors);
    if (result.errors.empty()) {
        for (auto& e : check_schema(schema)) result.errors.push_back(std::move(e));
    }
    if (result.errors.empty()) result.schema = std::move(schema);
    return result;
}

}  // namespace amdl
