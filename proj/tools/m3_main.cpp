#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "m3/annotator.hpp"
#include "m3/errors.hpp"
#include "m3/generator.hpp"
#include "m3/knowledge.hpp"
#include "m3/pipeline.hpp"
#include "m3/query.hpp"
#include "m3/reasoner.hpp"
#include "m3/taxonomy.hpp"
#include "m3/turtle.hpp"
#include "m3/vocab.hpp"

namespace fs = std::filesystem;
using namespace m3;

namespace {

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? value : "";
}

Taxonomy taxonomy_from(const std::string& path) {
    return load_taxonomy(parse_turtle(read_text_file(path)));
}

Graph graph_from_files(const std::vector<std::string>& paths) {
    Graph g;
    bool first = true;
    for (const auto& p : paths) {
        Graph next = parse_turtle(read_text_file(p));
        g = first ? std::move(next) : merge(g, next);
        first = false;
    }
    return g;
}

std::vector<std::string> split_commas(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    for (char c : csv) {
        if (c == ',') {
            if (!item.empty())
                out.push_back(item);
            item.clear();
        } else {
            item += c;
        }
    }
    if (!item.empty())
        out.push_back(item);
    return out;
}

/// Raw domain labels or full IRIs; labels need the taxonomy to resolve.
std::vector<Term> resolve_domains(const std::vector<std::string>& raw, const std::string& taxonomy_path) {
    std::vector<Term> out;
    std::vector<std::string> labels;
    for (const std::string& d : raw) {
        if (d.find("://") != std::string::npos)
            out.push_back(Term::iri(d));
        else
            labels.push_back(d);
    }
    if (!labels.empty()) {
        if (taxonomy_path.empty())
            throw Error("domain labels need --taxonomy to resolve (or pass full IRIs)");
        const Taxonomy taxonomy = taxonomy_from(taxonomy_path);
        for (const Term& t : unify_request_domains(labels, taxonomy))
            out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int cmd_annotate(const std::string& in, const std::string& format, const std::string& taxonomy_path,
                 const std::string& out) {
    std::vector<RawReading> readings;
    try {
        readings = parse_readings(read_text_file(in),
                                  format == "json" ? ReadingFormat::Json : ReadingFormat::Csv);
    } catch (const Error& e) {
        std::cerr << "annotate (ingest): " << e.what() << "\n";
        return kIngestFailed;
    }
    try {
        const Graph g = annotate(readings, taxonomy_from(taxonomy_path));
        write_text_file(out, serialize(g, RdfFormat::Turtle));
    } catch (const Error& e) {
        std::cerr << "annotate: " << e.what() << "\n";
        return kAnnotateFailed;
    }
    return kOk;
}

int cmd_reason(const std::string& in, const std::vector<std::string>& rule_files, const std::string& out,
               const std::string& log) {
    try {
        const Graph input = parse_turtle(read_text_file(in));
        std::vector<fs::path> paths(rule_files.begin(), rule_files.end());
        const RuleSet rules = load_rule_files(paths);
        ReasonResult result = apply_rules(input, rules);
        write_text_file(out, serialize(result.graph, RdfFormat::Turtle));
        if (!log.empty())
            write_text_file(log, derivations_to_jsonl(result.derivations));
        for (const BuiltinIssue& issue : result.issues)
            std::cerr << "reason: rule '" << issue.rule << "': " << issue.detail << "\n";
    } catch (const Error& e) {
        std::cerr << "reason: " << e.what() << "\n";
        return kReasonFailed;
    }
    return kOk;
}

int cmd_query(const std::vector<std::string>& inputs, const std::string& query_file,
              const std::string& format, const std::string& dest) {
    try {
        const Graph g = graph_from_files(inputs);
        const SolutionSet solutions = execute(parse_query(read_text_file(query_file)), g);
        const std::string rendered = format == "json" ? to_json(solutions) : to_csv(solutions);
        if (dest.empty())
            std::cout << rendered;
        else
            write_text_file(dest, rendered);
        if (solutions.filter_type_errors > 0)
            std::cerr << "query: " << solutions.filter_type_errors
                      << " row(s) dropped by non-numeric filter comparisons\n";
    } catch (const Error& e) {
        std::cerr << "query: " << e.what() << "\n";
        return kQueryFailed;
    }
    return kOk;
}

int cmd_knowledge_validate(const std::string& manifest) {
    try {
        const Catalog catalog = load_catalog(manifest);
        std::cout << "ok: " << catalog.size() << " entries\n";
    } catch (const Error& e) {
        std::cerr << "knowledge validate: " << e.what() << "\n";
        return kKnowledgeFailed;
    }
    return kOk;
}

int cmd_knowledge_select(const std::string& manifest, const std::string& domains_csv,
                         const std::string& taxonomy_path) {
    try {
        const Catalog catalog = load_catalog(manifest);
        const std::vector<Term> domains = resolve_domains(split_commas(domains_csv), taxonomy_path);
        const std::set<Term> domain_set(domains.begin(), domains.end());
        for (const KnowledgeEntry* e : catalog.select(domain_set))
            std::cout << e->id << "\n";
    } catch (const Error& e) {
        std::cerr << "knowledge select: " << e.what() << "\n";
        return kKnowledgeFailed;
    }
    return kOk;
}

int cmd_knowledge_merge(const std::string& in, const std::string& manifest,
                        const std::string& domains_csv, const std::string& taxonomy_path,
                        const std::string& out) {
    try {
        const Graph base = parse_turtle(read_text_file(in));
        const Catalog catalog = load_catalog(manifest);
        std::vector<Term> domains;
        if (domains_csv.empty() || domains_csv == "auto")
            domains = domains_in_graph(base);
        else
            domains = resolve_domains(split_commas(domains_csv), taxonomy_path);
        const std::set<Term> domain_set(domains.begin(), domains.end());
        std::vector<const KnowledgeEntry*> graph_entries;
        for (const KnowledgeEntry* e : catalog.select(domain_set))
            if (e->kind != KnowledgeKind::Ruleset)
                graph_entries.push_back(e);
        CrossDomainGraph cross = build_cross_domain_graph(graph_entries, base);
        write_text_file(out, serialize(cross.graph, RdfFormat::Turtle));
    } catch (const Error& e) {
        std::cerr << "knowledge merge: " << e.what() << "\n";
        return kKnowledgeFailed;
    }
    return kOk;
}

struct TemplateEnvironment {
    Taxonomy taxonomy;
    Catalog catalog;
    std::vector<Template> templates;
};

TemplateEnvironment load_template_environment(const std::string& templates_path,
                                              const std::string& manifest,
                                              const std::string& taxonomy_path) {
    TemplateEnvironment env;
    env.taxonomy = taxonomy_from(taxonomy_path);
    env.catalog = load_catalog(manifest);
    const fs::path base = fs::path(templates_path).parent_path();
    env.templates = load_template_catalog(parse_turtle(read_text_file(templates_path)), env.catalog,
                                          env.taxonomy, base);
    return env;
}

int cmd_templates_list(const std::string& templates_path, const std::string& manifest,
                       const std::string& taxonomy_path) {
    try {
        const auto env = load_template_environment(templates_path, manifest, taxonomy_path);
        for (const Template& t : env.templates)
            std::cout << t.id.value() << "\t" << t.title << "\n";
    } catch (const Error& e) {
        std::cerr << "templates list: " << e.what() << "\n";
        return kTemplateFailed;
    }
    return kOk;
}

int cmd_templates_match(const std::string& templates_path, const std::string& manifest,
                        const std::string& taxonomy_path, const std::string& sensors_csv,
                        const std::string& domains_csv) {
    try {
        const auto env = load_template_environment(templates_path, manifest, taxonomy_path);
        const std::vector<Term> domains = unify_request_domains(split_commas(domains_csv), env.taxonomy);
        const std::vector<Term> sensors =
            unify_request_sensors(split_commas(sensors_csv), domains, env.taxonomy);
        for (const Template* t : match_templates(sensors, domains, env.templates))
            std::cout << t->id.value() << "\t" << t->title << "\n";
    } catch (const Error& e) {
        std::cerr << "templates match: " << e.what() << "\n";
        return kTemplateFailed;
    }
    return kOk;
}

int cmd_templates_gen(const std::string& templates_path, const std::string& manifest,
                      const std::string& taxonomy_path, const std::string& id, const std::string& out) {
    try {
        const auto env = load_template_environment(templates_path, manifest, taxonomy_path);
        const Template* chosen = nullptr;
        for (const Template& t : env.templates)
            if (t.id.value() == id)
                chosen = &t;
        if (!chosen)
            throw TemplateError(id, "no such template in the catalog");
        const Bundle bundle = materialize(*chosen, env.catalog, env.taxonomy, out);
        std::cout << "bundle: " << bundle.directory.string() << " (" << bundle.files.size()
                  << " files)\n";
    } catch (const Error& e) {
        std::cerr << "templates gen: " << e.what() << "\n";
        return kTemplateFailed;
    }
    return kOk;
}

/// Flat `key = value` configuration file; '#' starts a comment line.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::map<std::string, std::string> out;
    std::ifstream in(path);
    if (!in)
        throw IoError(path, "cannot open config file");
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::size_t i = line.find_first_not_of(" \t");
        if (i == std::string::npos || line[i] == '#')
            continue;
        const std::size_t eq = line.find('=', i);
        if (eq == std::string::npos)
            throw Error("config line is not 'key = value': " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"M3 semantic engine: annotate sensor data, reason over it, and link cross-domain knowledge"};
    app.require_subcommand(1);

    // annotate
    auto* annotate_cmd = app.add_subcommand("annotate", "Annotate raw readings into RDF observations");
    std::string an_in, an_format = "csv", an_taxonomy = env_or_empty("M3_TAXONOMY"), an_out;
    annotate_cmd->add_option("--in", an_in, "readings file")->required();
    annotate_cmd->add_option("--format", an_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    annotate_cmd->add_option("--taxonomy", an_taxonomy, "taxonomy Turtle file");
    annotate_cmd->add_option("--out", an_out, "output Turtle file")->required();

    // reason
    auto* reason_cmd = app.add_subcommand("reason", "Forward-chain rules to a fixpoint");
    std::string re_in, re_out, re_log;
    std::vector<std::string> re_rules;
    reason_cmd->add_option("--in", re_in, "input Turtle file")->required();
    reason_cmd->add_option("--rules", re_rules, "rule file (repeatable)")->required();
    reason_cmd->add_option("--out", re_out, "enriched Turtle file")->required();
    reason_cmd->add_option("--log", re_log, "derivation log (JSONL)");

    // query
    auto* query_cmd = app.add_subcommand("query", "Evaluate a SELECT query");
    std::vector<std::string> qu_in;
    std::string qu_query, qu_format = "csv", qu_dest;
    query_cmd->add_option("--in", qu_in, "input Turtle file (repeatable; inputs are merged)")->required();
    query_cmd->add_option("--query", qu_query, "query file")->required();
    query_cmd->add_option("--out", qu_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    query_cmd->add_option("--dest", qu_dest, "write results to this file instead of stdout");

    // knowledge
    auto* knowledge_cmd = app.add_subcommand("knowledge", "Manage the domain-knowledge catalog");
    knowledge_cmd->require_subcommand(1);
    knowledge_cmd->fallthrough();
    std::string kn_manifest = env_or_empty("M3_KNOWLEDGE_MANIFEST");
    std::string kn_taxonomy = env_or_empty("M3_TAXONOMY");

    auto* kn_validate = knowledge_cmd->add_subcommand("validate", "Validate a knowledge manifest");
    std::string kn_validate_manifest;
    kn_validate->add_option("manifest", kn_validate_manifest, "manifest file");

    auto* kn_select = knowledge_cmd->add_subcommand("select", "Select entries for a domain set");
    std::string kn_domains;
    kn_select->add_option("--manifest", kn_manifest, "manifest file");
    kn_select->add_option("--domains", kn_domains, "comma-separated domain labels or IRIs")->required();
    kn_select->add_option("--taxonomy", kn_taxonomy, "taxonomy file for label resolution");

    auto* kn_merge = knowledge_cmd->add_subcommand("merge", "Merge selected knowledge into a graph");
    std::string kn_in, kn_out, kn_merge_domains = "auto";
    kn_merge->add_option("--in", kn_in, "base Turtle file")->required();
    kn_merge->add_option("--manifest", kn_manifest, "manifest file");
    kn_merge->add_option("--domains", kn_merge_domains, "'auto' (from graph) or comma-separated");
    kn_merge->add_option("--taxonomy", kn_taxonomy, "taxonomy file for label resolution");
    kn_merge->add_option("--out", kn_out, "merged Turtle file")->required();

    // templates
    auto* templates_cmd = app.add_subcommand("templates", "Work with application templates");
    templates_cmd->require_subcommand(1);
    templates_cmd->fallthrough();
    std::string tp_templates, tp_manifest = env_or_empty("M3_KNOWLEDGE_MANIFEST"),
                tp_taxonomy = env_or_empty("M3_TAXONOMY");
    templates_cmd->add_option("--templates", tp_templates, "template catalog Turtle file");
    templates_cmd->add_option("--manifest", tp_manifest, "knowledge manifest");
    templates_cmd->add_option("--taxonomy", tp_taxonomy, "taxonomy file");

    auto* tp_list = templates_cmd->add_subcommand("list", "List all templates");
    auto* tp_match = templates_cmd->add_subcommand("match", "Match templates to sensors and domains");
    std::string tp_sensors, tp_domains;
    tp_match->add_option("--sensors", tp_sensors, "comma-separated sensor labels")->required();
    tp_match->add_option("--domains", tp_domains, "comma-separated domain labels")->required();
    auto* tp_gen = templates_cmd->add_subcommand("gen", "Materialize a template bundle");
    std::string tp_id, tp_out;
    tp_gen->add_option("--id", tp_id, "template IRI")->required();
    tp_gen->add_option("--out", tp_out, "output directory")->required();

    // pipeline
    auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the whole workflow in one go");
    std::string pl_config, pl_in, pl_format, pl_taxonomy, pl_manifest, pl_query, pl_out, pl_result;
    std::vector<std::string> pl_rules;
    int pl_verbose = 0;
    pipeline_cmd->add_option("--config", pl_config, "flat key=value config file");
    pipeline_cmd->add_option("--in", pl_in, "readings file");
    pipeline_cmd->add_option("--format", pl_format, "csv|json");
    pipeline_cmd->add_option("--taxonomy", pl_taxonomy, "taxonomy file");
    pipeline_cmd->add_option("--rules", pl_rules, "rule file (repeatable)");
    pipeline_cmd->add_option("--knowledge", pl_manifest, "knowledge manifest");
    pipeline_cmd->add_option("--query", pl_query, "query file");
    pipeline_cmd->add_option("--out", pl_out, "output directory");
    pipeline_cmd->add_option("--result-format", pl_result, "csv|json");
    pipeline_cmd->add_flag("-v,--verbose", pl_verbose, "trace stages on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (annotate_cmd->parsed())
            return cmd_annotate(an_in, an_format, an_taxonomy, an_out);
        if (reason_cmd->parsed())
            return cmd_reason(re_in, re_rules, re_out, re_log);
        if (query_cmd->parsed())
            return cmd_query(qu_in, qu_query, qu_format, qu_dest);
        if (knowledge_cmd->parsed()) {
            if (kn_validate->parsed())
                return cmd_knowledge_validate(
                    kn_validate_manifest.empty() ? kn_manifest : kn_validate_manifest);
            if (kn_select->parsed())
                return cmd_knowledge_select(kn_manifest, kn_domains, kn_taxonomy);
            if (kn_merge->parsed())
                return cmd_knowledge_merge(kn_in, kn_manifest, kn_merge_domains, kn_taxonomy, kn_out);
        }
        if (templates_cmd->parsed()) {
            if (tp_templates.empty() || tp_manifest.empty() || tp_taxonomy.empty()) {
                std::cerr << "templates: --templates, --manifest, and --taxonomy are required "
                             "(or set M3_KNOWLEDGE_MANIFEST / M3_TAXONOMY)\n";
                return kUsage;
            }
            if (tp_list->parsed())
                return cmd_templates_list(tp_templates, tp_manifest, tp_taxonomy);
            if (tp_match->parsed())
                return cmd_templates_match(tp_templates, tp_manifest, tp_taxonomy, tp_sensors, tp_domains);
            if (tp_gen->parsed())
                return cmd_templates_gen(tp_templates, tp_manifest, tp_taxonomy, tp_id, tp_out);
        }
        if (pipeline_cmd->parsed()) {
            // Precedence: flags > config file > environment.
            std::map<std::string, std::string> file_config;
            if (!pl_config.empty())
                file_config = parse_config_file(pl_config);
            auto pick = [&](const std::string& flag, const char* key, const char* env) {
                if (!flag.empty())
                    return flag;
                if (auto it = file_config.find(key); it != file_config.end())
                    return it->second;
                return env ? env_or_empty(env) : std::string();
            };
            PipelineConfig config;
            config.input = pick(pl_in, "in", nullptr);
            config.format = pick(pl_format, "format", nullptr) == "json" ? ReadingFormat::Json
                                                                         : ReadingFormat::Csv;
            config.taxonomy = pick(pl_taxonomy, "taxonomy", "M3_TAXONOMY");
            config.knowledge_manifest = pick(pl_manifest, "knowledge", "M3_KNOWLEDGE_MANIFEST");
            config.query = pick(pl_query, "query", nullptr);
            config.out_dir = pick(pl_out, "out", nullptr);
            const std::string result_format = pick(pl_result, "result_format", nullptr);
            config.result_format = result_format.empty() ? "csv" : result_format;
            if (pl_rules.empty()) {
                if (auto it = file_config.find("rules"); it != file_config.end()) {
                    std::istringstream in(it->second);
                    std::string token;
                    while (in >> token)
                        pl_rules.push_back(token);
                }
            }
            for (const std::string& r : pl_rules)
                config.rules.emplace_back(r);
            config.verbosity = pl_verbose;
            if (config.input.empty() || config.taxonomy.empty() || config.rules.empty() ||
                config.knowledge_manifest.empty() || config.query.empty() || config.out_dir.empty()) {
                std::cerr << "pipeline: missing configuration; need in, taxonomy, rules, knowledge, "
                             "query, out (flags, config file, or environment)\n";
                return kUsage;
            }
            return run_pipeline(config, std::cerr);
        }
    } catch (const Error& e) {
        std::cerr << "m3: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
