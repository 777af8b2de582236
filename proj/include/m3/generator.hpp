#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "m3/graph.hpp"
#include "m3/knowledge.hpp"
#include "m3/taxonomy.hpp"
#include "m3/term.hpp"

namespace m3 {

/// One catalog template: the six content slots (sensors, domains, annotation
/// hints, rulesets, knowledge, query) plus title, description, and the sample
/// readings used by the generated runbook.
struct Template {
    Term id;
    std::string title;
    std::string description;
    std::vector<Term> sensors;
    std::vector<Term> domains;
    std::vector<Term> annotation_hints; // measurement types the bundle must carry
    std::vector<std::string> rulesets;  // catalog ids, kind ruleset
    std::vector<std::string> knowledge; // catalog ids, kind ontology/dataset
    std::filesystem::path query_file;
    std::filesystem::path sample_file;
};

/// Loads templates from a graph in the template vocabulary, resolving and
/// validating every slot against the knowledge catalog and the taxonomy.
/// Slot extraction runs through the query engine. File paths resolve against
/// `base_dir`. Throws TemplateError on a missing slot or dangling reference.
std::vector<Template> load_template_catalog(const Graph& graph, const Catalog& catalog,
                                            const Taxonomy& taxonomy,
                                            const std::filesystem::path& base_dir);

/// Every template whose sensor set and domain set both intersect the request,
/// ranked by total overlap (descending), ties broken by template id.
std::vector<const Template*> match_templates(const std::vector<Term>& sensors,
                                             const std::vector<Term>& domains,
                                             const std::vector<Template>& catalog);

/// Unifies raw request labels for match_templates: each sensor label is tried
/// against every requested domain context (and the empty context); all
/// resolutions are collected. A label no context can resolve is an error.
std::vector<Term> unify_request_sensors(const std::vector<std::string>& labels,
                                        const std::vector<Term>& domains, const Taxonomy& taxonomy);
std::vector<Term> unify_request_domains(const std::vector<std::string>& labels, const Taxonomy& taxonomy);

struct BundleFile {
    std::string role;
    std::string path; // relative to the bundle directory
    std::string sha256;
};

struct Bundle {
    std::filesystem::path directory;
    std::vector<BundleFile> files;
};

/// Materializes the template into `out_dir` (must be empty or absent):
/// taxonomy subset, rule and knowledge files, query, sample readings, a
/// runbook README, and a digest manifest. Output bytes depend only on the
/// template inputs, never on the output path.
Bundle materialize(const Template& tpl, const Catalog& catalog, const Taxonomy& taxonomy,
                   const std::filesystem::path& out_dir);

} // namespace m3
