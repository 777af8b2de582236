#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "m3/graph.hpp"
#include "m3/term.hpp"

namespace m3 {

enum class KnowledgeKind { Ontology, Dataset, Ruleset };

std::string_view knowledge_kind_name(KnowledgeKind kind);

/// One catalog record: a domain-knowledge file with the namespaces it defines
/// and the foreign namespaces it reuses. The reuse edges drive shared-
/// namespace closure during selection.
struct KnowledgeEntry {
    std::string id;
    KnowledgeKind kind = KnowledgeKind::Ontology;
    std::vector<Term> domains;
    std::vector<std::string> defines;
    std::vector<std::string> reuses;
    std::filesystem::path path; // resolved against the manifest directory
    std::string note;

    std::vector<std::string> namespaces() const;
};

class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<KnowledgeEntry> entries);

    const std::vector<KnowledgeEntry>& entries() const { return entries_; }
    const KnowledgeEntry* find(const std::string& id) const;
    std::size_t size() const { return entries_.size(); }

    /// Entries whose domains intersect the request, closed under definition
    /// dependencies: whenever a selected entry reuses a namespace, every
    /// entry defining that namespace joins the selection. Result is sorted
    /// by id.
    std::vector<const KnowledgeEntry*> select(const std::set<Term>& domains) const;

private:
    std::vector<KnowledgeEntry> entries_; // sorted by id
    std::map<std::string, std::size_t> by_id_;
    std::map<std::string, std::vector<std::size_t>> by_defined_namespace_;
};

/// Parses and validates the line-oriented manifest (see docs/formats.md):
/// every referenced file must exist and parse under its kind's format, and
/// every declared namespace must actually occur in the file. All invalid
/// entries are aggregated into one CatalogError.
Catalog load_catalog(const std::filesystem::path& manifest_file);

struct CrossDomainGraph {
    Graph graph;
    /// Namespaces declared by two or more merged entries: the join surface.
    std::set<std::string> shared_namespaces;
};

/// Merges the graphs of the given ontology/dataset entries into `base`.
/// Throws std::invalid_argument when handed a ruleset entry.
CrossDomainGraph build_cross_domain_graph(const std::vector<const KnowledgeEntry*>& entries,
                                          const Graph& base);

} // namespace m3
