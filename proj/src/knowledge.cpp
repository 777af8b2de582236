#include "m3/knowledge.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "m3/errors.hpp"
#include "m3/reasoner.hpp"
#include "m3/turtle.hpp"

namespace m3 {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string(), "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string item;
    while (in >> item) {
        if (!item.empty() && item.back() == ',')
            item.pop_back();
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

/// Namespaces that actually occur in a graph: prefix declarations plus the
/// namespace part of every IRI in any position.
std::set<std::string> graph_namespaces(const Graph& g) {
    std::set<std::string> out;
    for (const auto& [prefix, ns] : g.prefixes())
        out.insert(ns);
    auto add = [&](const Term& t) {
        if (!t.is_iri())
            return;
        const auto pos = t.value().find_last_of("#/");
        if (pos != std::string::npos)
            out.insert(t.value().substr(0, pos + 1));
    };
    for (const Triple& t : g) {
        add(t.subject);
        add(t.predicate);
        add(t.object);
    }
    return out;
}

std::set<std::string> ruleset_namespaces(const RuleSet& rules) {
    std::set<std::string> out;
    auto add = [&](const RuleTerm& t) {
        if (t.is_variable || !t.constant.is_iri())
            return;
        const auto pos = t.constant.value().find_last_of("#/");
        if (pos != std::string::npos)
            out.insert(t.constant.value().substr(0, pos + 1));
    };
    for (const Rule& rule : rules.rules) {
        for (const Atom& atom : rule.body) {
            if (const auto* p = std::get_if<PatternAtom>(&atom)) {
                add(p->subject);
                add(p->predicate);
                add(p->object);
            }
        }
        for (const PatternAtom& p : rule.head) {
            add(p.subject);
            add(p.predicate);
            add(p.object);
        }
    }
    return out;
}

} // namespace

std::string_view knowledge_kind_name(KnowledgeKind kind) {
    switch (kind) {
        case KnowledgeKind::Ontology: return "ontology";
        case KnowledgeKind::Dataset: return "dataset";
        case KnowledgeKind::Ruleset: return "ruleset";
    }
    return "ontology";
}

std::vector<std::string> KnowledgeEntry::namespaces() const {
    std::set<std::string> all(defines.begin(), defines.end());
    all.insert(reuses.begin(), reuses.end());
    return {all.begin(), all.end()};
}

Catalog::Catalog(std::vector<KnowledgeEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const KnowledgeEntry& a, const KnowledgeEntry& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        by_id_[entries_[i].id] = i;
        for (const std::string& ns : entries_[i].defines)
            by_defined_namespace_[ns].push_back(i);
    }
}

const KnowledgeEntry* Catalog::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

std::vector<const KnowledgeEntry*> Catalog::select(const std::set<Term>& domains) const {
    std::set<std::size_t> selected;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        for (const Term& d : entries_[i].domains)
            if (domains.count(d)) {
                selected.insert(i);
                break;
            }

    // Definition-dependency closure over reused namespaces.
    bool grew = true;
    while (grew) {
        grew = false;
        std::set<std::size_t> additions;
        for (std::size_t i : selected)
            for (const std::string& ns : entries_[i].reuses)
                if (auto it = by_defined_namespace_.find(ns); it != by_defined_namespace_.end())
                    for (std::size_t j : it->second)
                        if (!selected.count(j))
                            additions.insert(j);
        if (!additions.empty()) {
            selected.insert(additions.begin(), additions.end());
            grew = true;
        }
    }

    std::vector<const KnowledgeEntry*> out;
    for (std::size_t i : selected)
        out.push_back(&entries_[i]);
    return out; // index order == id order
}

Catalog load_catalog(const std::filesystem::path& manifest_file) {
    std::ifstream in(manifest_file);
    if (!in)
        throw IoError(manifest_file.string(), "cannot open manifest");
    const std::filesystem::path base = manifest_file.parent_path();

    std::vector<std::map<std::string, std::string>> records;
    std::map<std::string, std::string> record;
    std::string line;
    std::size_t line_no = 0;
    std::vector<CatalogIssue> issues;
    auto flush = [&]() {
        if (!record.empty()) {
            records.push_back(std::move(record));
            record.clear();
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#')
            continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            issues.push_back({"<manifest>", "line " + std::to_string(line_no) + ": expected 'key: value'"});
            continue;
        }
        std::string key = line.substr(0, colon);
        std::string value = line.substr(colon + 1);
        while (!value.empty() && value.front() == ' ')
            value.erase(value.begin());
        record[key] = value;
    }
    flush();

    std::vector<KnowledgeEntry> entries;
    std::set<std::string> ids;
    for (const auto& rec : records) {
        KnowledgeEntry e;
        auto get = [&](const char* key) {
            auto it = rec.find(key);
            return it == rec.end() ? std::string() : it->second;
        };
        e.id = get("id");
        if (e.id.empty()) {
            issues.push_back({"<manifest>", "record without an id"});
            continue;
        }
        if (!ids.insert(e.id).second) {
            issues.push_back({e.id, "duplicate id"});
            continue;
        }
        const std::string kind = get("kind");
        if (kind == "ontology")
            e.kind = KnowledgeKind::Ontology;
        else if (kind == "dataset")
            e.kind = KnowledgeKind::Dataset;
        else if (kind == "ruleset")
            e.kind = KnowledgeKind::Ruleset;
        else {
            issues.push_back({e.id, "unknown kind '" + kind + "'"});
            continue;
        }
        for (const std::string& d : split_list(get("domains"))) {
            if (!is_absolute_iri(d)) {
                issues.push_back({e.id, "domain is not an absolute IRI: " + d});
                continue;
            }
            e.domains.push_back(Term::iri(d));
        }
        e.defines = split_list(get("defines"));
        e.reuses = split_list(get("reuses"));
        const std::string rel = get("path");
        if (rel.empty()) {
            issues.push_back({e.id, "missing path"});
            continue;
        }
        e.path = base / rel;
        e.note = get("note");

        // Quality gate: the file must parse under its kind's format and must
        // actually mention every declared namespace.
        std::set<std::string> present;
        try {
            const std::string text = read_file(e.path);
            if (e.kind == KnowledgeKind::Ruleset)
                present = ruleset_namespaces(parse_rules(text));
            else
                present = graph_namespaces(parse_turtle(text));
        } catch (const Error& err) {
            issues.push_back({e.id, err.what()});
            continue;
        }
        bool ok = true;
        for (const std::string& ns : e.namespaces())
            if (!present.count(ns)) {
                issues.push_back({e.id, "declared namespace not found in file: " + ns});
                ok = false;
            }
        if (!ok)
            continue;
        entries.push_back(std::move(e));
    }

    if (!issues.empty())
        throw CatalogError(std::move(issues));
    return Catalog(std::move(entries));
}

CrossDomainGraph build_cross_domain_graph(const std::vector<const KnowledgeEntry*>& entries,
                                          const Graph& base) {
    CrossDomainGraph out;
    out.graph = base;
    std::map<std::string, int> namespace_uses;
    for (const KnowledgeEntry* e : entries) {
        if (e->kind == KnowledgeKind::Ruleset)
            throw std::invalid_argument("cannot merge ruleset entry '" + e->id + "' as a graph");
        out.graph = merge(out.graph, parse_turtle(read_file(e->path)));
        for (const std::string& ns : e->namespaces())
            ++namespace_uses[ns];
    }
    for (const auto& [ns, uses] : namespace_uses)
        if (uses >= 2)
            out.shared_namespaces.insert(ns);
    return out;
}

} // namespace m3
