#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "m3/graph.hpp"
#include "m3/term.hpp"

namespace m3 {

enum class EntryKind { SensorType, MeasurementType, Unit, Domain };

std::string_view entry_kind_name(EntryKind kind);

/// One canonical concept of the unification dictionary: its kind, preferred
/// label plus synonyms, optional parent in the subclass chain, the default
/// unit (measurement types), and the domains it is scoped to. An entry with
/// no domains is global: it names the unqualified sense of its labels.
struct TaxonomyEntry {
    Term canonical;
    EntryKind kind = EntryKind::SensorType;
    std::vector<std::string> labels;   // normalized; front() is the preferred label
    std::vector<std::string> synonyms; // normalized
    std::optional<Term> parent;
    std::optional<Term> default_unit;
    std::vector<Term> domains;
    std::optional<Term> feature;
    /// Sensor types name what they measure as a dictionary label, so the
    /// concrete measurement class is still picked by unification context.
    std::optional<std::string> measures;
};

/// Caller-supplied disambiguation: the applicative domain and/or the feature
/// of interest the raw term was used with.
struct UnificationContext {
    std::optional<Term> domain;
    std::optional<Term> feature;
};

/// Lowercases, maps punctuation to spaces, collapses whitespace, and sorts
/// tokens, so "Rainfall-Sensor" and "sensor rainfall" normalize identically.
std::string normalize_label(std::string_view raw);

class Taxonomy {
public:
    Taxonomy() = default;
    Taxonomy(std::vector<TaxonomyEntry> entries, std::string version);

    /// Resolves a raw label to the canonical IRI of the unique matching entry.
    /// Candidates are narrowed by kind, then ctx.domain (domain-scoped entries
    /// win over global ones), then ctx.feature; a tie is broken only when
    /// exactly one survivor has `raw` as its preferred label. Throws
    /// UnknownTermError / AmbiguousTermError otherwise.
    Term unify(std::string_view raw, EntryKind kind, const UnificationContext& ctx) const;

    const TaxonomyEntry* find(const Term& canonical) const;
    bool contains(const Term& canonical) const { return find(canonical) != nullptr; }

    const std::vector<TaxonomyEntry>& entries() const { return entries_; }
    const std::string& version() const { return version_; }
    std::size_t size() const { return entries_.size(); }

    /// Namespaces (IRI up to the final '#' or '/') owned by entry IRIs.
    const std::vector<std::string>& owned_namespaces() const { return namespaces_; }

    /// Entries transitively reachable from the seeds through parent chains,
    /// default units, and domain lists; used to cut bundle-sized subsets.
    std::vector<const TaxonomyEntry*> reachable_from(const std::vector<Term>& seeds) const;

    /// Re-emits entries as a graph in the taxonomy vocabulary.
    Graph to_graph(const std::vector<const TaxonomyEntry*>& subset) const;

private:
    std::vector<TaxonomyEntry> entries_;                  // sorted by canonical IRI
    std::map<std::string, std::vector<std::size_t>> lookup_; // normalized label -> entry indexes
    std::map<Term, std::size_t> by_iri_;
    std::vector<std::string> namespaces_;
    std::string version_;
};

/// Extracts and validates entries encoded with the taxonomy vocabulary
/// (tax:prefLabel, tax:altLabel, tax:subClassOf, tax:defaultUnit, tax:domain,
/// tax:feature). All malformed entries are collected into one TaxonomyError.
Taxonomy load_taxonomy(const Graph& graph);

} // namespace m3
