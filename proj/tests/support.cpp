#include "support.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <sqlite3.h>

namespace support {

using namespace amdl;

// --- builders ---------------------------------------------------------------

Identifier id(const std::string& text) { return Identifier(text); }

std::vector<Identifier> ids(const std::vector<std::string>& names) {
    std::vector<Identifier> out;
    for (const auto& n : names) out.push_back(Identifier(n));
    return out;
}

RelationalTable make_table(const std::string& name,
                           const std::vector<std::pair<std::string, std::string>>& columns,
                           const std::vector<std::string>& primary_key) {
    RelationalTable t{Identifier(name), {}, ids(primary_key)};
    for (const auto& [col, domain] : columns) t.columns.push_back({Identifier(col), Identifier(domain)});
    return t;
}

ForeignKeyConstraint make_fk(const std::string& name, const std::string& source,
                             const std::vector<std::string>& source_columns,
                             const std::string& target,
                             const std::vector<std::string>& target_columns) {
    return {Identifier(name), Identifier(source), ids(source_columns), Identifier(target),
            ids(target_columns)};
}

// --- corpus -----------------------------------------------------------------

std::string models_dir() { return AMDL_MODELS_DIR; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string corpus_path(const std::string& name) { return models_dir() + "/" + name; }

AbstractModel parse_corpus(const std::string& name) {
    ParseResult result = parse_model(read_file(corpus_path(name)), name);
    if (!result.ok()) {
        std::string msg = "corpus model " + name + " failed to parse";
        for (const auto& d : result.diagnostics) msg += "\n  " + to_string(d);
        throw std::runtime_error(msg);
    }
    return *result.model;
}

std::vector<std::string> corpus_names() {
    return {"biology.amdl",  "biology_variant.amdl", "employee.amdl",
            "managers.amdl", "managers_multi.amdl",  "empty.amdl"};
}

// --- comparisons ------------------------------------------------------------

namespace {

bool equivalent_tables(const AbstractTable& a, const AbstractTable& b) {
    if (a.name != b.name || a.kind != b.kind || a.members.size() != b.members.size()) return false;
    for (const auto& ma : a.members) {
        const Member* mb = nullptr;
        for (const auto& candidate : b.members) {
            if (member_name(candidate) == member_name(ma)) {
                mb = &candidate;
                break;
            }
        }
        if (!mb || mb->index() != ma.index()) return false;
        if (const auto* pa = std::get_if<PlainAttribute>(&ma)) {
            if (!(*pa == std::get<PlainAttribute>(*mb))) return false;
        } else if (const auto* ea = std::get_if<EntityReference>(&ma)) {
            if (!(*ea == std::get<EntityReference>(*mb))) return false;
        } else {
            const auto& ca = std::get<MultivaluedChild>(ma);
            const auto& cb = std::get<MultivaluedChild>(*mb);
            if (!equivalent_tables(ca.table(), cb.table())) return false;
        }
    }
    return true;
}

}  // namespace

bool equivalent_models(const AbstractModel& a, const AbstractModel& b) {
    if (a.tables.size() != b.tables.size()) return false;
    for (std::size_t i = 0; i < a.tables.size(); ++i)
        if (!equivalent_tables(a.tables[i], b.tables[i])) return false;
    return true;
}

namespace {

std::string sorted_join(std::vector<std::string> parts) {
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& p : parts) out += p + ";";
    return out;
}

std::multiset<std::string> table_shapes(const RelationalSchema& s) {
    std::multiset<std::string> out;
    for (const auto& t : s.tables) {
        std::vector<std::string> cols, pk;
        for (const auto& c : t.columns) cols.push_back(c.name.str() + ":" + c.domain.str());
        for (const auto& k : t.primary_key) pk.push_back(k.str());
        out.insert(t.name.str() + "|" + sorted_join(cols) + "|" + sorted_join(pk));
    }
    return out;
}

std::multiset<std::string> constraint_shapes(const RelationalSchema& s) {
    std::multiset<std::string> out;
    for (const auto& f : s.constraints) {
        std::vector<std::string> src, dst;
        for (const auto& c : f.source_columns) src.push_back(c.str());
        for (const auto& c : f.target_columns) dst.push_back(c.str());
        out.insert(f.source_table.str() + "|" + sorted_join(src) + "|" + f.target_table.str() +
                   "|" + sorted_join(dst));
    }
    return out;
}

}  // namespace

bool same_structure(const RelationalSchema& a, const RelationalSchema& b) {
    return table_shapes(a) == table_shapes(b) && constraint_shapes(a) == constraint_shapes(b);
}

// --- random model generation --------------------------------------------------

namespace {

struct ModelGen {
    std::mt19937& rng;
    ModelGenOptions options;
    int table_counter = 0;
    int explicit_counter = 0;
    int attr_counter = 0;  // global so child attributes never hit inherited names
    int ref_counter = 0;   // global: reference names become constraint names
    std::vector<std::string> entities;          // creation order
    std::map<std::string, int> key_width;       // resolved key width per table

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool chance(int percent) { return pick(1, 100) <= percent; }

    std::string fresh_table() { return "T" + std::to_string(++table_counter); }

    std::string domain() {
        static const char* domains[] = {"text", "num", "stamp"};
        return domains[pick(0, 2)];
    }

    AbstractTable build(const std::string& name, AbstractTable::Kind kind, int depth,
                        int inherited_width, int earlier_entities) {
        AbstractTable table{Identifier(name), kind, {}};
        int own_width = 0;
        const bool need_key = kind == AbstractTable::Kind::entity;
        int members = pick(need_key ? 1 : 0, options.max_members);

        for (int i = 0; i < members; ++i) {
            int roll = pick(1, 100);
            if (roll <= 50) {
                bool in_key = chance(40);
                table.members.push_back(PlainAttribute{
                    Identifier("a" + std::to_string(++attr_counter)), Identifier(domain()), in_key});
                if (in_key) own_width += 1;
            } else if (roll <= 85 || depth >= options.max_depth) {
                // Key references extend inherited keys, so they only appear
                // on multivalued children: on an entity table a key reference
                // would put foreign key columns inside the primary key and
                // the compiled table would no longer be an entity table.
                // They aim at already-built tables so key widths stay acyclic;
                // non-key references may aim anywhere.
                bool in_key = kind == AbstractTable::Kind::multivalued && earlier_entities > 0 &&
                              chance(35);
                int target_index = in_key ? pick(0, earlier_entities - 1)
                                          : pick(0, static_cast<int>(entities.size()) - 1);
                const std::string& target = entities[target_index];
                EntityReference e{Identifier("r" + std::to_string(++ref_counter)), Identifier(target),
                                  in_key, {}};
                if (in_key) own_width += key_width.at(target);
                if (target_index < earlier_entities && chance(25)) {
                    for (int k = 0; k < key_width.at(target); ++k)
                        e.column_names.push_back(Identifier("e" + std::to_string(++explicit_counter)));
                }
                table.members.push_back(std::move(e));
            } else {
                std::string child_name = fresh_table();
                AbstractTable child = build(child_name, AbstractTable::Kind::multivalued, depth + 1,
                                            inherited_width + own_width, earlier_entities);
                table.members.push_back(MultivaluedChild{
                    Identifier("m" + std::to_string(++ref_counter)),
                    std::make_shared<AbstractTable>(std::move(child))});
            }
        }
        if (need_key && own_width == 0) {
            table.members.push_back(
                PlainAttribute{Identifier("a" + std::to_string(++attr_counter)), Identifier(domain()), true});
            own_width = 1;
        }
        key_width[name] = inherited_width + own_width;
        return table;
    }
};

}  // namespace

AbstractModel random_model(std::mt19937& rng, const ModelGenOptions& options) {
    ModelGen gen{rng, options, 0, 0, 0, 0, {}, {}};
    int n = gen.pick(1, options.max_entities);
    for (int i = 0; i < n; ++i) gen.entities.push_back(gen.fresh_table());

    AbstractModel model;
    for (int i = 0; i < n; ++i)
        model.tables.push_back(gen.build(gen.entities[i], AbstractTable::Kind::entity, 0, 0, i));
    auto issues = validate_model(model);
    if (!issues.empty())
        throw std::runtime_error("random_model produced an invalid model: " + issues.front().message);
    return model;
}

// --- random schema generation -------------------------------------------------

RelationalSchema random_schema(std::mt19937& rng) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    RelationalSchema schema;
    int n = pick(1, 4);
    for (int i = 0; i < n; ++i) {
        RelationalTable t{Identifier("S" + std::to_string(i + 1)), {}, {}};
        int cols = pick(1, 4);
        for (int c = 0; c < cols; ++c)
            t.columns.push_back({Identifier("c" + std::to_string(c + 1)),
                                 Identifier(pick(0, 1) ? "text" : "num")});
        std::vector<int> order(cols);
        for (int c = 0; c < cols; ++c) order[c] = c;
        std::shuffle(order.begin(), order.end(), rng);
        int pk_size = pick(1, cols);
        for (int c = 0; c < pk_size; ++c) t.primary_key.push_back(t.columns[order[c]].name);
        schema.tables.push_back(std::move(t));
    }

    int fk_count = pick(0, 4);
    int made = 0;
    for (int attempt = 0; attempt < 40 && made < fk_count; ++attempt) {
        const RelationalTable& src = schema.tables[pick(0, n - 1)];
        const RelationalTable& dst = schema.tables[pick(0, n - 1)];

        // Target columns: usually the target's primary key (a simple
        // constraint), sometimes an arbitrary column subset.
        std::vector<Identifier> target_cols;
        if (pick(1, 100) <= 75) {
            target_cols = dst.primary_key;
            std::shuffle(target_cols.begin(), target_cols.end(), rng);
        } else {
            std::vector<Identifier> pool;
            for (const auto& c : dst.columns) pool.push_back(c.name);
            std::shuffle(pool.begin(), pool.end(), rng);
            target_cols.assign(pool.begin(), pool.begin() + pick(1, static_cast<int>(pool.size())));
        }

        // Source columns: usually drawn from the primary key so multivalued
        // and association shapes appear.
        std::vector<Identifier> pool;
        if (pick(1, 100) <= 60) {
            pool = src.primary_key;
        } else {
            for (const auto& c : src.columns) pool.push_back(c.name);
        }
        if (pool.size() < target_cols.size()) continue;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<Identifier> source_cols(pool.begin(), pool.begin() + target_cols.size());

        schema.constraints.push_back({Identifier("f" + std::to_string(++made)), src.name,
                                      std::move(source_cols), dst.name, std::move(target_cols)});
    }
    auto errors = check_schema(schema);
    if (!errors.empty())
        throw std::runtime_error("random_schema produced an inconsistent schema: " + errors.front());
    return schema;
}

// --- independent verifiers ----------------------------------------------------

namespace {

std::set<std::string> as_set(const std::vector<Identifier>& names) {
    std::set<std::string> out;
    for (const auto& n : names) out.insert(n.str());
    return out;
}

bool simple_by_definition(const RelationalSchema& schema, const ForeignKeyConstraint& f) {
    const RelationalTable* target = schema.find_table(f.target_table);
    return target && as_set(f.target_columns) == as_set(target->primary_key);
}

}  // namespace

char independent_class(const RelationalSchema& schema, const Identifier& table) {
    const RelationalTable* t = schema.find_table(table);
    if (!t) throw std::runtime_error("independent_class: unknown table " + table.str());
    std::set<std::string> pk = as_set(t->primary_key);

    bool multivalued = false;
    bool disqualified = false;
    for (const auto& f : schema.constraints) {
        if (f.source_table != table) continue;
        std::set<std::string> src = as_set(f.source_columns);
        bool inside = std::includes(pk.begin(), pk.end(), src.begin(), src.end());
        if (inside) disqualified = true;
        if (inside && simple_by_definition(schema, f)) multivalued = true;
    }
    if (multivalued) return 'M';
    if (disqualified) return 'N';
    return 'E';
}

namespace {

struct FlatTable {
    const AbstractTable* table;
    const AbstractTable* parent;      // null for roots
    std::string witness;              // attachment constraint (member name), "" for roots
};

std::map<std::string, FlatTable> flatten(const AbstractModel& model) {
    std::map<std::string, FlatTable> out;
    std::function<void(const AbstractTable&, const AbstractTable*, const std::string&)> walk =
        [&](const AbstractTable& t, const AbstractTable* parent, const std::string& witness) {
            out[t.name.str()] = {&t, parent, witness};
            for (const auto& m : t.members)
                if (const auto* mv = std::get_if<MultivaluedChild>(&m))
                    walk(mv->table(), &t, mv->name.str());
        };
    for (const auto& t : model.tables) walk(t, nullptr, "");
    return out;
}

}  // namespace

std::vector<std::string> verify_lift_conditions(const RelationalSchema& schema,
                                                const LiftReport& report) {
    std::vector<std::string> violations;
    auto fail = [&](const std::string& msg) { violations.push_back(msg); };

    std::map<std::string, FlatTable> flat = flatten(report.model);

    // Partition of the schema's tables.
    std::set<std::string> seen;
    for (const auto& [name, entry] : flat) {
        (void)entry;
        if (!schema.find_table(Identifier(name))) fail("model table " + name + " not in schema");
        seen.insert(name);
    }
    for (const auto& [name, why] : report.excluded_tables) {
        (void)why;
        if (!seen.insert(name.str()).second)
            fail("table " + name.str() + " both lifted and excluded");
    }
    for (const auto& t : schema.tables)
        if (!seen.count(t.name.str())) fail("table " + t.name.str() + " unaccounted for");

    for (const auto& [name, entry] : flat) {
        const AbstractTable& at = *entry.table;
        const RelationalTable* rt = schema.find_table(Identifier(name));
        if (!rt) continue;
        char cls = independent_class(schema, rt->name);

        // Kind agreement with the definitions.
        if (at.kind == AbstractTable::Kind::entity && cls != 'E')
            fail("table " + name + " lifted as entity but classifies as " + std::string(1, cls));
        if (at.kind == AbstractTable::Kind::multivalued && cls != 'M')
            fail("table " + name + " lifted as multivalued but classifies as " + std::string(1, cls));

        std::set<std::string> pk = as_set(rt->primary_key);

        // Foreign key columns covered by the table's own references.
        std::set<std::string> fk_cols;
        if (entry.parent) {
            const ForeignKeyConstraint* w = schema.find_constraint(Identifier(entry.witness));
            if (!w) {
                fail("attachment constraint " + entry.witness + " of " + name + " not in schema");
            } else {
                if (w->source_table.str() != name || w->target_table != entry.parent->name)
                    fail("attachment constraint " + entry.witness + " does not link " + name +
                         " to " + entry.parent->name.str());
                if (!simple_by_definition(schema, *w))
                    fail("attachment constraint " + entry.witness + " is not simple");
                std::set<std::string> src = as_set(w->source_columns);
                if (!std::includes(pk.begin(), pk.end(), src.begin(), src.end()))
                    fail("attachment constraint " + entry.witness +
                         " is not on a subset of the primary key of " + name);
                for (const auto& c : w->source_columns) fk_cols.insert(c.str());
            }
        }

        for (const auto& m : at.members) {
            if (const auto* e = std::get_if<EntityReference>(&m)) {
                const ForeignKeyConstraint* f = schema.find_constraint(e->name);
                if (!f) {
                    fail("reference " + e->name.str() + " of " + name + " not in schema");
                    continue;
                }
                if (f->source_table.str() != name)
                    fail("reference " + e->name.str() + " does not originate from " + name);
                if (f->target_table != e->target)
                    fail("reference " + e->name.str() + " targets " + f->target_table.str() +
                         ", member says " + e->target.str());
                if (!simple_by_definition(schema, *f))
                    fail("reference " + e->name.str() + " is not a simple constraint");
                if (independent_class(schema, f->target_table) != 'E')
                    fail("reference " + e->name.str() + " targets a non-entity table");

                // Condition 3: not the redundant reference of the attachment.
                if (entry.parent && e->name.str() == entry.witness)
                    fail("redundant entity reference " + e->name.str() + " kept in " + name);

                // Footnote-1 underlining: in_key iff all columns in the key.
                bool all_in = true, any_in = false;
                for (const auto& c : f->source_columns) {
                    bool in = pk.count(c.str()) > 0;
                    all_in = all_in && in;
                    any_in = any_in || in;
                }
                if (e->in_key != all_in || (any_in && !all_in))
                    fail("reference " + e->name.str() + " of " + name + " has wrong key marking");
                for (const auto& c : f->source_columns) fk_cols.insert(c.str());
            }
        }

        // Condition 1: no foreign key attribute survives as a plain attribute.
        for (const auto& m : at.members) {
            if (const auto* p = std::get_if<PlainAttribute>(&m)) {
                if (fk_cols.count(p->name.str()))
                    fail("foreign key column " + p->name.str() + " kept as attribute of " + name);
                const Column* col = rt->find_column(p->name);
                if (!col)
                    fail("attribute " + p->name.str() + " of " + name + " is not a column");
                else if (p->in_key != (pk.count(p->name.str()) > 0))
                    fail("attribute " + p->name.str() + " of " + name + " has wrong key marking");
            }
        }
    }

    // Condition 2: every multivalued table nested exactly once.
    std::map<std::string, int> nested_count;
    for (const auto& [name, entry] : flat)
        if (entry.parent) ++nested_count[name];
    for (const auto& [name, entry] : flat) {
        if (entry.table->kind == AbstractTable::Kind::multivalued && nested_count[name] != 1)
            fail("multivalued table " + name + " nested " + std::to_string(nested_count[name]) +
                 " times");
        if (entry.table->kind == AbstractTable::Kind::entity && nested_count[name] != 0)
            fail("entity table " + name + " is nested");
    }
    return violations;
}

bool lift_choice_in_valid_assignments(const RelationalSchema& schema, const LiftReport& report) {
    std::map<std::string, FlatTable> flat = flatten(report.model);

    // Children present in the lifted model, with the lifter's chosen witness.
    std::vector<std::pair<std::string, std::string>> chosen;  // (child, witness)
    for (const auto& [name, entry] : flat)
        if (entry.parent) chosen.emplace_back(name, entry.witness);
    if (chosen.empty()) return true;

    // Independent candidates per child: simple constraints on a proper key
    // subset to a simple table other than the child itself, with the parent
    // present in the model.
    std::map<std::string, std::vector<std::string>> candidates;
    for (const auto& [child, witness] : chosen) {
        (void)witness;
        const RelationalTable* t = schema.find_table(Identifier(child));
        std::set<std::string> pk = as_set(t->primary_key);
        for (const auto& f : schema.constraints) {
            if (f.source_table.str() != child) continue;
            if (f.target_table.str() == child) continue;
            std::set<std::string> src = as_set(f.source_columns);
            if (!std::includes(pk.begin(), pk.end(), src.begin(), src.end())) continue;
            if (!simple_by_definition(schema, f)) continue;
            char target_class = independent_class(schema, f.target_table);
            if (target_class != 'E' && target_class != 'M') continue;
            if (!flat.count(f.target_table.str())) continue;
            candidates[child].push_back(f.name.str());
        }
    }

    // Enumerate the full assignment space and collect the valid ones.
    std::vector<std::map<std::string, std::string>> valid;
    std::map<std::string, std::string> current;
    std::function<void(std::size_t)> enumerate = [&](std::size_t i) {
        if (i == chosen.size()) {
            valid.push_back(current);
            return;
        }
        const std::string& child = chosen[i].first;
        for (const auto& witness : candidates[child]) {
            current[child] = witness;
            enumerate(i + 1);
        }
        current.erase(child);
    };
    enumerate(0);

    std::map<std::string, std::string> lifted;
    for (const auto& [child, witness] : chosen) lifted[child] = witness;
    return std::find(valid.begin(), valid.end(), lifted) != valid.end();
}

bool mu_forest_with_entity_roots(const AbstractModel& model) {
    ReferenceGraph g = build_reference_graph(model);
    std::map<std::string, std::string> parent;
    for (const auto& a : g.arcs) {
        if (a.kind != ArcKind::mu) continue;
        if (parent.count(a.to.str())) return false;  // two parents
        parent[a.to.str()] = a.from.str();
    }
    for (const auto& v : g.vertices) {
        // Follow parents; must terminate (no cycle) at an entity table.
        std::set<std::string> visited;
        std::string cur = v.str();
        while (parent.count(cur)) {
            if (!visited.insert(cur).second) return false;
            cur = parent.at(cur);
        }
        const AbstractTable* root = model.find_table(Identifier(cur));
        if (!root || root->kind != AbstractTable::Kind::entity) return false;
    }
    for (const auto& [child, p] : parent) {
        (void)p;
        const AbstractTable* t = model.find_table(Identifier(child));
        if (!t || t->kind != AbstractTable::Kind::multivalued) return false;
    }
    return true;
}

// --- hierarchy reparse oracle -------------------------------------------------

namespace {

struct HParser {
    const std::string& text;
    std::size_t pos = 0;

    bool eat(char c) {
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool eat(const std::string& s) {
        if (text.compare(pos, s.size(), s) == 0) {
            pos += s.size();
            return true;
        }
        return false;
    }

    std::optional<std::string> ident() {
        std::size_t start = pos;
        while (pos < text.size() &&
               (text[pos] == '_' || std::isalnum(static_cast<unsigned char>(text[pos]))))
            ++pos;
        if (pos == start) return std::nullopt;
        return text.substr(start, pos - start);
    }

    std::optional<std::vector<HMember>> members(char terminator) {
        std::vector<HMember> out;
        while (true) {
            auto m = member();
            if (!m) return std::nullopt;
            out.push_back(std::move(*m));
            if (eat(", ")) continue;
            if (terminator == '\0' ? pos == text.size() : eat(terminator)) return out;
            return std::nullopt;
        }
    }

    std::optional<HMember> member() {
        HMember m;
        m.key = eat('*');
        auto name = ident();
        if (!name) return std::nullopt;
        m.name = *name;
        if (eat('[')) {
            m.is_ref = true;
            auto target = ident();
            if (!target || !eat(']')) return std::nullopt;
            m.target = *target;
        } else if (eat('(')) {
            m.is_group = true;
            if (!eat(')')) {  // a child may have no members at all
                auto kids = members(')');
                if (!kids) return std::nullopt;
                m.children = std::move(*kids);
            }
        }
        if (m.key && !eat('*')) return std::nullopt;
        return m;
    }
};

}  // namespace

std::optional<std::pair<std::string, std::vector<HMember>>> parse_h_line(const std::string& line) {
    HParser p{line};
    if (!p.eat("H(")) return std::nullopt;
    auto root = p.ident();
    if (!root || !p.eat("):")) return std::nullopt;
    if (p.pos == line.size()) return std::make_pair(*root, std::vector<HMember>{});
    if (!p.eat(' ')) return std::nullopt;
    auto members = p.members('\0');
    if (!members) return std::nullopt;
    return std::make_pair(*root, std::move(*members));
}

bool h_members_match(const std::vector<HMember>& members, const AbstractTable& table) {
    if (members.size() != table.members.size()) return false;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const HMember& h = members[i];
        const Member& m = table.members[i];
        if (h.name != member_name(m).str()) return false;
        if (const auto* p = std::get_if<PlainAttribute>(&m)) {
            if (h.is_ref || h.is_group || h.key != p->in_key) return false;
        } else if (const auto* e = std::get_if<EntityReference>(&m)) {
            if (!h.is_ref || h.is_group || h.key != e->in_key || h.target != e->target.str())
                return false;
        } else {
            const auto& mv = std::get<MultivaluedChild>(m);
            if (!h.is_group || h.is_ref || h.key) return false;
            if (!h_members_match(h.children, mv.table())) return false;
        }
    }
    return true;
}

// --- embedded SQL engine ------------------------------------------------------

std::optional<std::string> run_sql(const std::string& ddl) {
    sqlite3* db = nullptr;
    if (sqlite3_open(":memory:", &db) != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "cannot open database";
        sqlite3_close(db);
        return msg;
    }
    std::optional<std::string> error;
    char* errmsg = nullptr;
    if (sqlite3_exec(db, "PRAGMA foreign_keys = ON;", nullptr, nullptr, &errmsg) != SQLITE_OK) {
        error = errmsg ? errmsg : "pragma failed";
        sqlite3_free(errmsg);
    } else if (sqlite3_exec(db, ddl.c_str(), nullptr, nullptr, &errmsg) != SQLITE_OK) {
        error = errmsg ? errmsg : "exec failed";
        sqlite3_free(errmsg);
    }
    sqlite3_close(db);
    return error;
}

}  // namespace support
