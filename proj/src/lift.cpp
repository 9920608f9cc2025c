#include "amdl/lift.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace amdl {

namespace {

std::set<std::string> to_set(const std::vector<Identifier>& names) {
    std::set<std::string> out;
    for (const auto& n : names) out.insert(n.str());
    return out;
}

struct Lifter {
    const RelationalSchema& schema;
    std::map<std::string, TableClass> cls;
    std::map<std::string, std::string> excluded;
    std::map<std::string, const ForeignKeyConstraint*> attachment;  // child -> witness
    std::map<std::string, std::vector<const ForeignKeyConstraint*>> children;  // parent -> witnesses
    std::map<std::string, std::size_t> constraint_rank;
    std::vector<std::string> warnings;

    explicit Lifter(const RelationalSchema& s) : schema(s) {
        for (std::size_t i = 0; i < schema.constraints.size(); ++i)
            constraint_rank[schema.constraints[i].name.str()] = i;
    }

    bool kept(const Identifier& table) const { return !excluded.count(table.str()); }

    void classify_all() {
        for (const auto& t : schema.tables) {
            TableClass c = classify_table(schema, t.name);
            if (c.neither()) excluded.emplace(t.name.str(), c.diagnostic);
            cls.emplace(t.name.str(), std::move(c));
        }
    }

    // The underlining rule has no reading for an entity reference whose
    // columns straddle the primary key boundary; such tables are excluded.
    void exclude_mixed_key_references() {
        for (const auto& t : schema.tables) {
            if (!kept(t.name)) continue;
            std::set<std::string> pk = to_set(t.primary_key);
            for (const auto& f : schema.constraints) {
                if (f.source_table != t.name) continue;
                if (!looks_like_entity_reference(t, f)) continue;
                std::size_t inside = 0;
                for (const auto& c : f.source_columns)
                    if (pk.count(c.str())) ++inside;
                if (inside != 0 && inside != f.source_columns.size()) {
                    excluded.emplace(t.name.str(),
                                     "entity reference " + f.name.str() +
                                         " has foreign key columns partly inside the primary key");
                    break;
                }
            }
        }
    }

    // Shape test only: simple, on a proper subset of the columns, to an
    // entity-classified table.  Exclusion status of the target is checked
    // separately when members are built.
    bool looks_like_entity_reference(const RelationalTable& t, const ForeignKeyConstraint& f) const {
        if (!is_simple_fk(schema, f)) return false;
        if (f.source_columns.size() >= t.columns.size()) return false;
        auto it = cls.find(f.target_table.str());
        return it != cls.end() && it->second.entity();
    }

    void attach_multivalued() {
        // Pick each table's parent by the tie-break first; exclusions then
        // propagate along the chosen chains, and chains that never reach an
        // entity table (attachment cycles) drop out together.
        std::map<std::string, const ForeignKeyConstraint*> chosen;
        for (const auto& t : schema.tables) {
            if (!cls.at(t.name.str()).multivalued() || !kept(t.name)) continue;
            std::vector<const ForeignKeyConstraint*> ranked = multivalued_witnesses(schema, t.name);
            std::vector<const ForeignKeyConstraint*> candidates;
            for (const ForeignKeyConstraint* w : ranked)
                if (w->target_table != t.name) candidates.push_back(w);
            if (candidates.empty()) {
                excluded.emplace(t.name.str(), "multivalued table " + t.name.str() +
                                                   " references no table other than itself");
                continue;
            }
            chosen[t.name.str()] = candidates.front();
            if (ranked.size() > 1) {
                std::ostringstream os;
                os << "table " << t.name << ": attached to " << candidates.front()->target_table
                   << " via " << candidates.front()->name << "; rejected candidates:";
                for (const ForeignKeyConstraint* w : ranked) {
                    if (w == candidates.front()) continue;
                    os << " " << w->name << " (" << w->target_table << ")";
                }
                warnings.push_back(os.str());
            }
        }

        std::set<std::string> settled;  // kept tables whose chain reaches an entity root
        for (const auto& t : schema.tables)
            if (kept(t.name) && cls.at(t.name.str()).entity()) settled.insert(t.name.str());

        bool progress = true;
        while (progress) {
            progress = false;
            for (const auto& t : schema.tables) {
                const std::string name = t.name.str();
                if (!chosen.count(name) || !kept(t.name)) continue;
                const ForeignKeyConstraint* w = chosen.at(name);
                const std::string parent = w->target_table.str();
                if (!kept(w->target_table)) {
                    excluded.emplace(name,
                                     "parent " + parent + " is excluded: " + excluded.at(parent));
                    progress = true;
                } else if (settled.count(parent)) {
                    settled.insert(name);
                    attachment[name] = w;
                    children[parent].push_back(w);
                    chosen.erase(name);
                    progress = true;
                }
            }
        }
        for (const auto& [name, w] : chosen) {
            (void)w;
            if (kept(Identifier(name)))
                excluded.emplace(name, "multivalued table " + name +
                                           " is attached in a cycle and never reaches an entity table");
        }

        for (auto& [parent, list] : children) {
            (void)parent;
            std::stable_sort(list.begin(), list.end(),
                             [&](const ForeignKeyConstraint* a, const ForeignKeyConstraint* b) {
                                 return constraint_rank.at(a->name.str()) <
                                        constraint_rank.at(b->name.str());
                             });
        }
    }

    AbstractTable build_table(const RelationalTable& t, bool multivalued) {
        const ForeignKeyConstraint* witness = multivalued ? attachment.at(t.name.str()) : nullptr;
        std::set<std::string> pk = to_set(t.primary_key);
        std::set<std::string> fk_cols;
        if (witness)
            for (const auto& c : witness->source_columns) fk_cols.insert(c.str());

        std::vector<const ForeignKeyConstraint*> eps;
        for (const auto& f : schema.constraints) {
            if (f.source_table != t.name) continue;
            if (witness && &f == witness) continue;  // the redundant entity reference
            if (!is_simple_fk(schema, f)) {
                warnings.push_back("constraint " + f.name.str() + " from " + t.name.str() +
                                   " dropped: not a simple foreign key constraint");
                continue;
            }
            if (f.source_columns.size() >= t.columns.size()) {
                warnings.push_back("constraint " + f.name.str() + " from " + t.name.str() +
                                   " dropped: covers every column of the table");
                continue;
            }
            if (!cls.at(f.target_table.str()).entity()) {
                warnings.push_back("constraint " + f.name.str() + " from " + t.name.str() +
                                   " dropped: target " + f.target_table.str() +
                                   " is not an entity table");
                continue;
            }
            if (!kept(f.target_table)) {
                warnings.push_back("constraint " + f.name.str() + " from " + t.name.str() +
                                   " dropped: target " + f.target_table.str() +
                                   " is excluded from the model");
                continue;
            }
            eps.push_back(&f);
            for (const auto& c : f.source_columns) fk_cols.insert(c.str());
        }

        std::map<std::string, std::size_t> column_index;
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            column_index[t.columns[i].name.str()] = i;

        // Plain attributes and entity references interleave by column
        // position.
        struct Slot {
            std::size_t anchor;
            std::size_t tiebreak;
            Member member;
            const ForeignKeyConstraint* eps_constraint;  // null for plain attributes
        };
        std::vector<Slot> slots;
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            const Column& c = t.columns[i];
            if (fk_cols.count(c.name.str())) continue;
            slots.push_back({i, 0, PlainAttribute{c.name, c.domain, pk.count(c.name.str()) > 0},
                             nullptr});
        }
        for (const ForeignKeyConstraint* f : eps) {
            std::size_t anchor = t.columns.size();
            for (const auto& c : f->source_columns)
                anchor = std::min(anchor, column_index.at(c.str()));
            bool in_key = true;
            for (const auto& c : f->source_columns) in_key = in_key && pk.count(c.str()) > 0;
            slots.push_back({anchor, constraint_rank.at(f->name.str()),
                             EntityReference{f->name, f->target_table, in_key, actual_columns(*f)},
                             f});
        }
        std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
            if (a.anchor != b.anchor) return a.anchor < b.anchor;
            return a.tiebreak < b.tiebreak;
        });

        std::vector<Member> members;
        members.reserve(slots.size());
        for (auto& s : slots) members.push_back(std::move(s.member));

        // Multivalued children slot in by constraint order relative to the
        // entity references; a child with no later reference goes last.
        std::vector<const ForeignKeyConstraint*> refs;
        for (const ForeignKeyConstraint* f : eps) refs.push_back(f);
        auto kids = children.find(t.name.str());
        if (kids != children.end())
            for (const ForeignKeyConstraint* w : kids->second) refs.push_back(w);
        std::stable_sort(refs.begin(), refs.end(),
                         [&](const ForeignKeyConstraint* a, const ForeignKeyConstraint* b) {
                             return constraint_rank.at(a->name.str()) <
                                    constraint_rank.at(b->name.str());
                         });

        for (std::size_t i = 0; i < refs.size(); ++i) {
            const ForeignKeyConstraint* r = refs[i];
            if (r->target_table != t.name || r->source_table == t.name) continue;  // not a child witness
            AbstractTable child = build_table(schema.require_table(r->source_table), true);
            Member member{MultivaluedChild{r->name, std::make_shared<AbstractTable>(std::move(child))}};
            const ForeignKeyConstraint* next_eps = nullptr;
            for (std::size_t j = i + 1; j < refs.size() && !next_eps; ++j)
                if (refs[j]->source_table == t.name) next_eps = refs[j];
            if (next_eps) {
                auto at = std::find_if(members.begin(), members.end(), [&](const Member& m) {
                    const auto* e = std::get_if<EntityReference>(&m);
                    return e && e->name == next_eps->name;
                });
                members.insert(at, std::move(member));
            } else {
                members.push_back(std::move(member));
            }
        }

        AbstractTable out{t.name,
                          multivalued ? AbstractTable::Kind::multivalued : AbstractTable::Kind::entity,
                          std::move(members)};
        strip_default_column_names(out, witness);
        return out;
    }

    /// Source columns reordered so position i pairs with the i-th primary key
    /// column of the target.
    std::vector<Identifier> actual_columns(const ForeignKeyConstraint& f) const {
        const RelationalTable& target = schema.require_table(f.target_table);
        std::vector<Identifier> out;
        for (const auto& k : target.primary_key) {
            for (std::size_t j = 0; j < f.target_columns.size(); ++j) {
                if (f.target_columns[j] == k) {
                    out.push_back(f.source_columns[j]);
                    break;
                }
            }
        }
        return out;
    }

    /// Drops explicit column names wherever default synthesis would already
    /// produce them, mirroring the compiler's naming passes.
    void strip_default_column_names(AbstractTable& table, const ForeignKeyConstraint* witness) {
        std::set<std::string> used;
        if (witness)
            for (const auto& c : witness->source_columns) used.insert(c.str());
        for (const auto& m : table.members)
            if (const auto* p = std::get_if<PlainAttribute>(&m)) used.insert(p->name.str());

        auto pass = [&](bool key_phase) {
            for (auto& m : table.members) {
                auto* e = std::get_if<EntityReference>(&m);
                if (!e || e->in_key != key_phase) continue;
                const RelationalTable& target = schema.require_table(e->target);
                bool matches_default = true;
                std::vector<std::string> defaults;
                for (const auto& k : target.primary_key) {
                    std::string name = k.str();
                    if (used.count(name)) name = e->name.str() + "_" + name;
                    defaults.push_back(std::move(name));
                }
                for (std::size_t i = 0; i < defaults.size(); ++i)
                    matches_default = matches_default && defaults[i] == e->column_names[i].str();
                if (matches_default) e->column_names.clear();
                for (std::size_t i = 0; i < target.primary_key.size(); ++i) {
                    const std::string& actual = matches_default
                                                    ? defaults[i]
                                                    : e->column_names[i].str();
                    used.insert(actual);
                }
            }
        };
        pass(true);
        pass(false);
    }
};

}  // namespace

LiftReport lift_schema(const RelationalSchema& schema) {
    auto errors = check_schema(schema);
    if (!errors.empty()) throw Error("inconsistent schema: " + errors.front());

    Lifter lifter(schema);
    lifter.classify_all();
    lifter.exclude_mixed_key_references();
    lifter.attach_multivalued();

    LiftReport report;
    for (const auto& t : schema.tables) {
        if (!lifter.kept(t.name)) continue;
        if (lifter.cls.at(t.name.str()).entity())
            report.model.tables.push_back(lifter.build_table(t, false));
    }
    report.warnings = std::move(lifter.warnings);
    for (const auto& t : schema.tables) {
        auto it = lifter.excluded.find(t.name.str());
        if (it != lifter.excluded.end()) report.excluded_tables.emplace_back(t.name, it->second);
    }
    return report;
}

}  // namespace amdl
