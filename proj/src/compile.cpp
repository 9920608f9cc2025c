#include "amdl/compile.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace amdl {

namespace {

std::vector<Column> synthesize_ref(const AbstractTable& table, const EntityReference& ref,
                                   const std::vector<Column>& target_key,
                                   std::set<std::string>& used) {
    std::vector<Column> out;
    if (!ref.column_names.empty()) {
        if (ref.column_names.size() != target_key.size()) {
            std::ostringstream os;
            os << "table " << table.name << ": reference " << ref.name << " names "
               << ref.column_names.size() << " columns but target " << ref.target << " has a "
               << target_key.size() << "-column primary key";
            throw Error(os.str());
        }
        for (std::size_t i = 0; i < target_key.size(); ++i) {
            if (!used.insert(ref.column_names[i].str()).second)
                throw Error("table " + table.name.str() + ": explicit column " +
                            ref.column_names[i].str() + " of reference " + ref.name.str() +
                            " collides with an existing column");
            out.push_back({ref.column_names[i], target_key[i].domain});
        }
        return out;
    }
    for (const auto& kc : target_key) {
        Identifier name = kc.name;
        if (used.count(name.str())) {
            name = Identifier(ref.name.str() + "_" + kc.name.str());
            if (used.count(name.str()))
                throw Error("table " + table.name.str() + ": column " + kc.name.str() +
                            " of reference " + ref.name.str() + " still collides after prefixing as " +
                            name.str());
        }
        used.insert(name.str());
        out.push_back({name, kc.domain});
    }
    return out;
}

/// Seeds the collision context: inherited key columns plus every declared
/// plain attribute name.
std::set<std::string> seed_names(const AbstractTable& table, const std::vector<Column>& inherited) {
    std::set<std::string> used;
    for (const auto& c : inherited) used.insert(c.name.str());
    for (const auto& m : table.members) {
        if (const auto* p = std::get_if<PlainAttribute>(&m)) {
            if (!used.insert(p->name.str()).second)
                throw Error("table " + table.name.str() + ": member " + p->name.str() +
                            " collides with an inherited key column");
        }
    }
    return used;
}

/// Names the key-reference columns, in member order.  target_key_of resolves
/// a target table's primary key columns.
template <typename TargetKeyFn>
void synthesize_key_refs(const AbstractTable& table, std::set<std::string>& used,
                         TargetKeyFn&& target_key_of,
                         std::map<std::string, std::vector<Column>>& ref_columns) {
    for (const auto& m : table.members) {
        const auto* e = std::get_if<EntityReference>(&m);
        if (e && e->in_key)
            ref_columns[e->name.str()] = synthesize_ref(table, *e, target_key_of(e->target), used);
    }
}

struct ClosureResolver {
    std::map<std::string, const AbstractTable*> tables;
    std::map<std::string, std::string> parent;
    KeyClosure result;
    std::set<std::string> visiting;

    explicit ClosureResolver(const AbstractModel& model) {
        for_each_table(model, [&](const AbstractTable& t) {
            tables[t.name.str()] = &t;
            for (const auto& m : t.members)
                if (const auto* mv = std::get_if<MultivaluedChild>(&m))
                    parent[mv->table().name.str()] = t.name.str();
        });
    }

    const KeyClosureEntry& resolve(const Identifier& name) {
        auto done = result.find(name.str());
        if (done != result.end()) return done->second;
        auto table_it = tables.find(name.str());
        if (table_it == tables.end()) throw Error("unknown table " + name.str());
        if (!visiting.insert(name.str()).second)
            throw Error("key dependency cycle involving table " + name.str());

        const AbstractTable& t = *table_it->second;
        KeyClosureEntry entry;
        auto parent_it = parent.find(name.str());
        if (parent_it != parent.end()) {
            const KeyClosureEntry& p = resolve(Identifier(parent_it->second));
            entry.columns = p.columns;
            entry.inherited = p.columns.size();
        }

        std::set<std::string> used = seed_names(t, entry.columns);
        std::map<std::string, std::vector<Column>> key_ref_columns;
        synthesize_key_refs(t, used, [&](const Identifier& target) -> const std::vector<Column>& {
            return resolve(target).columns;
        }, key_ref_columns);

        for (const auto& m : t.members) {
            if (const auto* p = std::get_if<PlainAttribute>(&m)) {
                if (p->in_key) entry.columns.push_back({p->name, p->domain});
            } else if (const auto* e = std::get_if<EntityReference>(&m)) {
                if (e->in_key) {
                    const auto& cols = key_ref_columns.at(e->name.str());
                    entry.columns.insert(entry.columns.end(), cols.begin(), cols.end());
                }
            }
        }
        visiting.erase(name.str());
        return result.emplace(name.str(), std::move(entry)).first->second;
    }
};

}  // namespace

KeyClosure resolve_key_closure(const AbstractModel& model) {
    ClosureResolver resolver(model);
    for_each_table(model, [&](const AbstractTable& t) { resolver.resolve(t.name); });
    return std::move(resolver.result);
}

TableSynthesis synthesize_table(const AbstractTable& table, const std::vector<Column>& inherited,
                                const KeyClosure& closure) {
    auto target_key_of = [&](const Identifier& target) -> const std::vector<Column>& {
        auto it = closure.find(target.str());
        if (it == closure.end()) throw Error("unknown table " + target.str());
        return it->second.columns;
    };

    std::set<std::string> used = seed_names(table, inherited);
    TableSynthesis out;
    synthesize_key_refs(table, used, target_key_of, out.ref_columns);
    for (const auto& m : table.members) {
        const auto* e = std::get_if<EntityReference>(&m);
        if (e && !e->in_key)
            out.ref_columns[e->name.str()] = synthesize_ref(table, *e, target_key_of(e->target), used);
    }

    out.columns = inherited;
    for (const auto& c : inherited) out.primary_key.push_back(c.name);
    for (const auto& m : table.members) {
        if (const auto* p = std::get_if<PlainAttribute>(&m)) {
            out.columns.push_back({p->name, p->domain});
        } else if (const auto* e = std::get_if<EntityReference>(&m)) {
            const auto& cols = out.ref_columns.at(e->name.str());
            out.columns.insert(out.columns.end(), cols.begin(), cols.end());
        }
    }
    for (const auto& m : table.members) {
        if (const auto* p = std::get_if<PlainAttribute>(&m)) {
            if (p->in_key) out.primary_key.push_back(p->name);
        } else if (const auto* e = std::get_if<EntityReference>(&m)) {
            if (e->in_key)
                for (const auto& c : out.ref_columns.at(e->name.str()))
                    out.primary_key.push_back(c.name);
        }
    }
    return out;
}

std::vector<Column> synthesize_fk_columns(const AbstractTable& table, const EntityReference& ref,
                                          const KeyClosure& closure) {
    auto self = closure.find(table.name.str());
    if (self == closure.end()) throw Error("unknown table " + table.name.str());
    std::vector<Column> inherited(self->second.columns.begin(),
                                  self->second.columns.begin() + self->second.inherited);
    TableSynthesis syn = synthesize_table(table, inherited, closure);
    auto it = syn.ref_columns.find(ref.name.str());
    if (it == syn.ref_columns.end())
        throw Error("table " + table.name.str() + " has no reference " + ref.name.str());
    return it->second;
}

RelationalSchema compile_model(const AbstractModel& model) {
    auto issues = validate_model(model);
    if (!issues.empty()) {
        std::ostringstream os;
        os << "invalid model: " << issues.front().message;
        if (issues.size() > 1) os << " (and " << issues.size() - 1 << " more)";
        throw Error(os.str());
    }

    KeyClosure closure = resolve_key_closure(model);
    RelationalSchema schema;

    std::function<void(const AbstractTable&, const std::vector<Column>&)> emit =
        [&](const AbstractTable& t, const std::vector<Column>& inherited) {
            TableSynthesis syn = synthesize_table(t, inherited, closure);
            schema.tables.push_back({t.name, syn.columns, syn.primary_key});
            const std::vector<Column>& own_key = closure.at(t.name.str()).columns;
            for (const auto& m : t.members) {
                if (const auto* e = std::get_if<EntityReference>(&m)) {
                    std::vector<Identifier> src, dst;
                    for (const auto& c : syn.ref_columns.at(e->name.str())) src.push_back(c.name);
                    for (const auto& c : closure.at(e->target.str()).columns) dst.push_back(c.name);
                    schema.constraints.push_back({e->name, t.name, std::move(src), e->target,
                                                  std::move(dst)});
                } else if (const auto* mv = std::get_if<MultivaluedChild>(&m)) {
                    std::vector<Identifier> key_names;
                    for (const auto& c : own_key) key_names.push_back(c.name);
                    schema.constraints.push_back({mv->name, mv->table().name, key_names, t.name,
                                                  key_names});
                    emit(mv->table(), own_key);
                }
            }
        };
    for (const auto& t : model.tables) emit(t, {});
    return schema;
}

}  // namespace amdl
