#include "m3/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "m3/errors.hpp"
#include "m3/vocab.hpp"

namespace m3 {

namespace {

const Term& kind_class(EntryKind kind) {
    static const Term sensor = Term::iri(vocab::tax("SensorType"));
    static const Term measurement = Term::iri(vocab::tax("MeasurementType"));
    static const Term unit = Term::iri(vocab::tax("Unit"));
    static const Term domain = Term::iri(vocab::tax("Domain"));
    switch (kind) {
        case EntryKind::SensorType: return sensor;
        case EntryKind::MeasurementType: return measurement;
        case EntryKind::Unit: return unit;
        case EntryKind::Domain: return domain;
    }
    return sensor;
}

const Term& kind_root(EntryKind kind) {
    switch (kind) {
        case EntryKind::SensorType: return vocab::sensor_root();
        case EntryKind::MeasurementType: return vocab::observation_value_root();
        case EntryKind::Unit: return vocab::unit_root();
        case EntryKind::Domain: return vocab::domain_root();
    }
    return vocab::sensor_root();
}

std::string iri_namespace(const std::string& iri) {
    const auto pos = iri.find_last_of("#/");
    return pos == std::string::npos ? iri : iri.substr(0, pos + 1);
}

std::vector<std::string> collect_labels(const Graph& g, const Term& subject, const Term& predicate) {
    std::vector<std::string> out;
    for (const Triple& t : g.match({subject, predicate, std::nullopt}))
        if (t.object.is_literal())
            out.push_back(normalize_label(t.object.value()));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<Term> single_iri(const Graph& g, const Term& subject, const Term& predicate) {
    auto triples = g.match({subject, predicate, std::nullopt});
    if (triples.empty())
        return std::nullopt;
    return triples.front().object;
}

} // namespace

std::string_view entry_kind_name(EntryKind kind) {
    switch (kind) {
        case EntryKind::SensorType: return "SensorType";
        case EntryKind::MeasurementType: return "MeasurementType";
        case EntryKind::Unit: return "Unit";
        case EntryKind::Domain: return "Domain";
    }
    return "SensorType";
}

std::string normalize_label(std::string_view raw) {
    std::string spaced;
    spaced.reserve(raw.size());
    for (char c : raw) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            spaced += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            spaced += ' ';
    }
    std::istringstream in(spaced);
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token)
        tokens.push_back(token);
    std::sort(tokens.begin(), tokens.end());
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty())
            out += ' ';
        out += t;
    }
    return out;
}

Taxonomy::Taxonomy(std::vector<TaxonomyEntry> entries, std::string version)
    : entries_(std::move(entries)), version_(std::move(version)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const TaxonomyEntry& a, const TaxonomyEntry& b) { return a.canonical < b.canonical; });
    std::set<std::string> namespaces;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const TaxonomyEntry& e = entries_[i];
        by_iri_[e.canonical] = i;
        namespaces.insert(iri_namespace(e.canonical.value()));
        for (const auto& label : e.labels)
            lookup_[label].push_back(i);
        for (const auto& synonym : e.synonyms)
            if (std::find(e.labels.begin(), e.labels.end(), synonym) == e.labels.end())
                lookup_[synonym].push_back(i);
    }
    namespaces_.assign(namespaces.begin(), namespaces.end());
}

const TaxonomyEntry* Taxonomy::find(const Term& canonical) const {
    auto it = by_iri_.find(canonical);
    return it == by_iri_.end() ? nullptr : &entries_[it->second];
}

Term Taxonomy::unify(std::string_view raw, EntryKind kind, const UnificationContext& ctx) const {
    const std::string key = normalize_label(raw);
    std::vector<const TaxonomyEntry*> candidates;
    if (auto it = lookup_.find(key); it != lookup_.end())
        for (std::size_t i : it->second)
            if (entries_[i].kind == kind)
                candidates.push_back(&entries_[i]);
    if (candidates.empty())
        throw UnknownTermError(std::string(raw));

    if (ctx.domain && candidates.size() > 1) {
        std::vector<const TaxonomyEntry*> scoped;
        std::vector<const TaxonomyEntry*> global;
        for (const auto* e : candidates) {
            if (std::find(e->domains.begin(), e->domains.end(), *ctx.domain) != e->domains.end())
                scoped.push_back(e);
            else if (e->domains.empty())
                global.push_back(e);
        }
        candidates = scoped.empty() ? global : scoped;
        if (candidates.empty())
            throw UnknownTermError(std::string(raw));
    }

    if (ctx.feature && candidates.size() > 1) {
        std::vector<const TaxonomyEntry*> featured;
        std::vector<const TaxonomyEntry*> neutral;
        for (const auto* e : candidates) {
            if (e->feature && *e->feature == *ctx.feature)
                featured.push_back(e);
            else if (!e->feature)
                neutral.push_back(e);
        }
        candidates = featured.empty() ? neutral : featured;
        if (candidates.empty())
            throw UnknownTermError(std::string(raw));
    }

    if (candidates.size() > 1) {
        // The unqualified dictionary sense: keep a lone candidate whose
        // preferred label is the raw label itself.
        std::vector<const TaxonomyEntry*> preferred;
        for (const auto* e : candidates)
            if (!e->labels.empty() && e->labels.front() == key)
                preferred.push_back(e);
        if (preferred.size() == 1)
            candidates = preferred;
    }

    if (candidates.size() > 1) {
        std::vector<std::string> iris;
        for (const auto* e : candidates)
            iris.push_back(e->canonical.value());
        throw AmbiguousTermError(std::string(raw), std::move(iris));
    }
    return candidates.front()->canonical;
}

std::vector<const TaxonomyEntry*> Taxonomy::reachable_from(const std::vector<Term>& seeds) const {
    std::set<const TaxonomyEntry*> seen;
    std::vector<const TaxonomyEntry*> frontier;
    auto push = [&](const Term& iri) {
        if (const TaxonomyEntry* e = find(iri); e && seen.insert(e).second)
            frontier.push_back(e);
    };
    for (const Term& seed : seeds)
        push(seed);
    while (!frontier.empty()) {
        const TaxonomyEntry* e = frontier.back();
        frontier.pop_back();
        if (e->parent)
            push(*e->parent);
        if (e->default_unit)
            push(*e->default_unit);
        for (const Term& d : e->domains)
            push(d);
    }
    std::vector<const TaxonomyEntry*> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(),
              [](const TaxonomyEntry* a, const TaxonomyEntry* b) { return a->canonical < b->canonical; });
    return out;
}

Graph Taxonomy::to_graph(const std::vector<const TaxonomyEntry*>& subset) const {
    Graph g;
    g.set_prefix("tax", std::string(vocab::kTaxNs));
    g.set_prefix("m3x", std::string(vocab::kClassNs));
    g.set_prefix("m3s", std::string(vocab::kShapeNs));
    g.set_prefix("unit", std::string(vocab::kUnitNs));
    g.set_prefix("dom", std::string(vocab::kDomainNs));
    g.set_prefix("feat", std::string(vocab::kFeatureNs));
    const Term pref = Term::iri(vocab::tax("prefLabel"));
    const Term alt = Term::iri(vocab::tax("altLabel"));
    const Term sub = Term::iri(vocab::tax("subClassOf"));
    const Term unit = Term::iri(vocab::tax("defaultUnit"));
    const Term dom = Term::iri(vocab::tax("domain"));
    const Term feat = Term::iri(vocab::tax("feature"));
    const Term measures = Term::iri(vocab::tax("measures"));
    for (const TaxonomyEntry* e : subset) {
        g.insert({e->canonical, vocab::rdf_type(), kind_class(e->kind)});
        bool first = true;
        for (const auto& label : e->labels) {
            g.insert({e->canonical, first ? pref : alt, Term::literal(label)});
            first = false;
        }
        for (const auto& synonym : e->synonyms)
            g.insert({e->canonical, alt, Term::literal(synonym)});
        if (e->parent)
            g.insert({e->canonical, sub, *e->parent});
        if (e->default_unit)
            g.insert({e->canonical, unit, *e->default_unit});
        for (const Term& d : e->domains)
            g.insert({e->canonical, dom, d});
        if (e->feature)
            g.insert({e->canonical, feat, *e->feature});
        if (e->measures)
            g.insert({e->canonical, measures, Term::literal(*e->measures)});
    }
    if (!version_.empty())
        g.insert({Term::iri("http://m3.example.org/taxonomy"), Term::iri(vocab::tax("version")),
                  Term::literal(version_)});
    return g;
}

Taxonomy load_taxonomy(const Graph& graph) {
    const Term pref = Term::iri(vocab::tax("prefLabel"));
    const Term alt = Term::iri(vocab::tax("altLabel"));
    const Term sub = Term::iri(vocab::tax("subClassOf"));
    const Term unit = Term::iri(vocab::tax("defaultUnit"));
    const Term dom = Term::iri(vocab::tax("domain"));
    const Term feat = Term::iri(vocab::tax("feature"));
    const Term measures = Term::iri(vocab::tax("measures"));

    struct Fault {
        TaxonomyFault kind;
        std::string iri;
        std::string detail;
    };
    std::vector<Fault> faults;
    std::map<Term, TaxonomyEntry> entries;

    for (EntryKind kind : {EntryKind::SensorType, EntryKind::MeasurementType, EntryKind::Unit, EntryKind::Domain}) {
        for (const Triple& t : graph.match({std::nullopt, vocab::rdf_type(), kind_class(kind)})) {
            if (!t.subject.is_iri())
                continue;
            if (entries.count(t.subject)) {
                faults.push_back({TaxonomyFault::DuplicateCanonical, t.subject.value(),
                                  "declared with more than one kind"});
                continue;
            }
            TaxonomyEntry e;
            e.canonical = t.subject;
            e.kind = kind;
            e.labels = collect_labels(graph, t.subject, pref);
            e.synonyms = collect_labels(graph, t.subject, alt);
            e.parent = single_iri(graph, t.subject, sub);
            e.default_unit = single_iri(graph, t.subject, unit);
            for (const Triple& d : graph.match({t.subject, dom, std::nullopt}))
                e.domains.push_back(d.object);
            std::sort(e.domains.begin(), e.domains.end());
            e.feature = single_iri(graph, t.subject, feat);
            for (const Triple& m : graph.match({t.subject, measures, std::nullopt}))
                if (m.object.is_literal())
                    e.measures = normalize_label(m.object.value());
            if (e.labels.empty())
                faults.push_back({TaxonomyFault::MissingLabel, e.canonical.value(), "no tax:prefLabel"});
            entries.emplace(t.subject, std::move(e));
        }
    }

    // Parent chains must stay inside the entry set (or stop at a kind root)
    // and must not loop.
    for (const auto& [iri, entry] : entries) {
        std::set<Term> visited{iri};
        const TaxonomyEntry* cursor = &entry;
        while (cursor->parent) {
            const Term& parent = *cursor->parent;
            if (parent == kind_root(entry.kind))
                break;
            auto it = entries.find(parent);
            if (it == entries.end()) {
                faults.push_back({TaxonomyFault::CyclicHierarchy, iri.value(),
                                  "parent chain leaves the taxonomy at " + parent.value()});
                break;
            }
            if (!visited.insert(parent).second) {
                faults.push_back({TaxonomyFault::CyclicHierarchy, iri.value(), "parent chain loops"});
                break;
            }
            cursor = &it->second;
        }
    }

    // Label uniqueness per (kind, domain-or-global scope).
    std::map<std::string, std::vector<const Term*>> scoped;
    for (const auto& [iri, entry] : entries) {
        std::vector<std::string> scopes;
        if (entry.domains.empty())
            scopes.push_back("~global~");
        for (const Term& d : entry.domains)
            scopes.push_back(d.value());
        std::set<std::string> words(entry.labels.begin(), entry.labels.end());
        words.insert(entry.synonyms.begin(), entry.synonyms.end());
        for (const auto& scope : scopes)
            for (const auto& w : words)
                scoped[std::string(entry_kind_name(entry.kind)) + "|" + scope + "|" + w].push_back(&iri);
    }
    for (const auto& [key, holders] : scoped) {
        if (holders.size() < 2)
            continue;
        for (const Term* iri : holders)
            faults.push_back({TaxonomyFault::DuplicateLabelInScope, iri->value(),
                              "label collision in scope '" + key + "'"});
    }

    if (!faults.empty()) {
        std::vector<std::string> iris;
        std::string detail = "taxonomy has " + std::to_string(faults.size()) + " fault(s):";
        for (const auto& f : faults) {
            iris.push_back(f.iri);
            detail += "\n  " + f.iri + ": " + f.detail;
        }
        throw TaxonomyError(faults.front().kind, std::move(iris), detail);
    }

    std::string version;
    for (const Triple& t :
         graph.match({Term::iri("http://m3.example.org/taxonomy"), Term::iri(vocab::tax("version")), std::nullopt}))
        if (t.object.is_literal())
            version = t.object.value();

    std::vector<TaxonomyEntry> list;
    list.reserve(entries.size());
    for (auto& [iri, entry] : entries)
        list.push_back(std::move(entry));
    return Taxonomy(std::move(list), std::move(version));
}

} // namespace m3
