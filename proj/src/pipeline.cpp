#include "m3/pipeline.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "m3/errors.hpp"
#include "m3/taxonomy.hpp"
#include "m3/turtle.hpp"
#include "m3/vocab.hpp"

namespace m3 {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string(), "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(path.string(), "cannot open for writing");
    out << content;
    if (!out)
        throw IoError(path.string(), "write failed");
}

RuleSet load_rule_files(const std::vector<std::filesystem::path>& files) {
    RuleSet all;
    std::set<std::string> names;
    for (const auto& file : files) {
        RuleSet one = parse_rules(read_text_file(file));
        for (Rule& rule : one.rules) {
            if (!names.insert(rule.name).second)
                throw RuleSyntaxError(0, "duplicate rule name '" + rule.name + "' across rule files");
            all.rules.push_back(std::move(rule));
        }
    }
    return all;
}

std::string derivations_to_jsonl(const std::vector<Derivation>& derivations) {
    std::string out;
    for (const Derivation& d : derivations) {
        nlohmann::json record;
        record["rule"] = d.rule;
        record["iteration"] = d.iteration;
        auto& bindings = record["bindings"] = nlohmann::json::object();
        for (const auto& [name, term] : d.bindings)
            bindings[name] = term.to_ntriples();
        auto& triples = record["triples"] = nlohmann::json::array();
        for (const Triple& t : d.triples)
            triples.push_back(t.to_ntriples());
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<Term> domains_in_graph(const Graph& graph) {
    std::set<Term> domains;
    for (const Triple& t : graph.match({std::nullopt, vocab::has_domain(), std::nullopt}))
        domains.insert(t.object);
    return {domains.begin(), domains.end()};
}

int run_pipeline(const PipelineConfig& config, std::ostream& diag) {
    namespace fs = std::filesystem;
    auto trace = [&](const char* stage) {
        if (config.verbosity > 0)
            diag << "[pipeline] " << stage << "\n";
    };

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) {
        diag << "pipeline: cannot create output directory: " << config.out_dir.string() << "\n";
        return kUsage;
    }

    // Stage 1: ingest.
    std::vector<RawReading> readings;
    try {
        trace("ingest");
        readings = parse_readings(read_text_file(config.input), config.format);
    } catch (const Error& e) {
        diag << "pipeline stage ingest: " << e.what() << "\n";
        return kIngestFailed;
    }

    // Stage 2: annotate.
    Graph annotated;
    try {
        trace("annotate");
        const Taxonomy taxonomy = load_taxonomy(parse_turtle(read_text_file(config.taxonomy)));
        annotated = annotate(readings, taxonomy);
        write_text_file(config.out_dir / "annotated.ttl", serialize(annotated, RdfFormat::Turtle));
    } catch (const Error& e) {
        diag << "pipeline stage annotate: " << e.what() << "\n";
        return kAnnotateFailed;
    }

    // Stage 3: reason.
    Graph enriched;
    try {
        trace("reason");
        const RuleSet rules = load_rule_files(config.rules);
        ReasonResult result = apply_rules(annotated, rules);
        enriched = std::move(result.graph);
        write_text_file(config.out_dir / "enriched.ttl", serialize(enriched, RdfFormat::Turtle));
        write_text_file(config.out_dir / "derivations.jsonl", derivations_to_jsonl(result.derivations));
        for (const BuiltinIssue& issue : result.issues)
            diag << "pipeline stage reason: rule '" << issue.rule << "': " << issue.detail << "\n";
    } catch (const Error& e) {
        diag << "pipeline stage reason: " << e.what() << "\n";
        return kReasonFailed;
    }

    // Stage 4: knowledge merge.
    Graph merged;
    try {
        trace("knowledge");
        const Catalog catalog = load_catalog(config.knowledge_manifest);
        std::vector<Term> domain_list = domains_in_graph(enriched);
        const std::set<Term> domains(domain_list.begin(), domain_list.end());
        std::vector<const KnowledgeEntry*> graph_entries;
        for (const KnowledgeEntry* e : catalog.select(domains))
            if (e->kind != KnowledgeKind::Ruleset)
                graph_entries.push_back(e);
        CrossDomainGraph cross = build_cross_domain_graph(graph_entries, enriched);
        merged = std::move(cross.graph);
        write_text_file(config.out_dir / "merged.ttl", serialize(merged, RdfFormat::Turtle));
    } catch (const Error& e) {
        diag << "pipeline stage knowledge: " << e.what() << "\n";
        return kKnowledgeFailed;
    }

    // Stage 5: query.
    try {
        trace("query");
        const Query query = parse_query(read_text_file(config.query));
        const SolutionSet solutions = execute(query, merged);
        const bool json = config.result_format == "json";
        write_text_file(config.out_dir / (json ? "results.json" : "results.csv"),
                        json ? to_json(solutions) : to_csv(solutions));
        if (solutions.filter_type_errors > 0)
            diag << "pipeline stage query: " << solutions.filter_type_errors
                 << " row(s) dropped by non-numeric filter comparisons\n";
    } catch (const Error& e) {
        diag << "pipeline stage query: " << e.what() << "\n";
        return kQueryFailed;
    }
    return kOk;
}

} // namespace m3
