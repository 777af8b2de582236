#include "m3/generator.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "m3/digest.hpp"
#include "m3/errors.hpp"
#include "m3/query.hpp"
#include "m3/turtle.hpp"
#include "m3/vocab.hpp"

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

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(path.string(), "cannot open for writing");
    out << content;
    if (!out)
        throw IoError(path.string(), "write failed");
}

/// Template slots are extracted with the query engine over the template
/// graph; one query per slot keeps the vocabulary honest.
std::vector<Term> slot_terms(const Graph& graph, const Term& id, std::string_view property) {
    Query q = parse_query("SELECT ?v WHERE { <" + id.value() + "> <" + vocab::tpl(property) + "> ?v . }");
    std::vector<Term> out;
    for (const auto& row : execute(q, graph).rows)
        out.push_back(row.front());
    return out;
}

std::vector<std::string> slot_strings(const Graph& graph, const Term& id, std::string_view property) {
    std::vector<std::string> out;
    for (const Term& t : slot_terms(graph, id, property))
        if (t.is_literal())
            out.push_back(t.value());
    std::sort(out.begin(), out.end());
    return out;
}

std::string single_string(const Graph& graph, const Term& id, std::string_view property) {
    auto values = slot_strings(graph, id, property);
    return values.empty() ? std::string() : values.front();
}

std::string sanitize_filename(const std::string& id) {
    std::string out;
    for (char c : id)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '-';
    return out;
}

} // namespace

std::vector<Template> load_template_catalog(const Graph& graph, const Catalog& catalog,
                                            const Taxonomy& taxonomy,
                                            const std::filesystem::path& base_dir) {
    Query all = parse_query("SELECT ?t WHERE { ?t <" + vocab::rdf("type") + "> <" + vocab::tpl("Template") +
                            "> . }");
    std::vector<Template> templates;
    for (const auto& row : execute(all, graph).rows) {
        const Term& id = row.front();
        Template t;
        t.id = id;
        t.title = single_string(graph, id, "title");
        t.description = single_string(graph, id, "description");
        t.sensors = slot_terms(graph, id, "sensor");
        t.domains = slot_terms(graph, id, "domain");
        t.annotation_hints = slot_terms(graph, id, "annotationHint");
        t.rulesets = slot_strings(graph, id, "ruleset");
        t.knowledge = slot_strings(graph, id, "knowledge");
        const std::string query_rel = single_string(graph, id, "queryFile");
        const std::string sample_rel = single_string(graph, id, "sampleFile");

        if (t.title.empty())
            throw TemplateError(id.value(), "missing title");
        if (t.sensors.empty())
            throw TemplateError(id.value(), "missing sensor slot");
        if (t.domains.empty())
            throw TemplateError(id.value(), "missing domain slot");
        if (t.annotation_hints.empty())
            throw TemplateError(id.value(), "missing annotationHint slot");
        if (t.rulesets.empty())
            throw TemplateError(id.value(), "missing ruleset slot");
        if (t.knowledge.empty())
            throw TemplateError(id.value(), "missing knowledge slot");
        if (query_rel.empty())
            throw TemplateError(id.value(), "missing queryFile slot");
        if (sample_rel.empty())
            throw TemplateError(id.value(), "missing sampleFile slot");

        for (const Term& s : t.sensors) {
            const TaxonomyEntry* e = taxonomy.find(s);
            if (!e || e->kind != EntryKind::SensorType)
                throw TemplateError(id.value(), "sensor is not a taxonomy sensor type: " + s.value());
        }
        for (const Term& d : t.domains) {
            const TaxonomyEntry* e = taxonomy.find(d);
            if (!e || e->kind != EntryKind::Domain)
                throw TemplateError(id.value(), "domain is not a taxonomy domain: " + d.value());
        }
        for (const Term& h : t.annotation_hints) {
            const TaxonomyEntry* e = taxonomy.find(h);
            if (!e || e->kind != EntryKind::MeasurementType)
                throw TemplateError(id.value(), "annotation hint is not a measurement type: " + h.value());
        }
        for (const std::string& r : t.rulesets) {
            const KnowledgeEntry* e = catalog.find(r);
            if (!e || e->kind != KnowledgeKind::Ruleset)
                throw TemplateError(id.value(), "dangling ruleset reference: " + r);
        }
        for (const std::string& k : t.knowledge) {
            const KnowledgeEntry* e = catalog.find(k);
            if (!e || e->kind == KnowledgeKind::Ruleset)
                throw TemplateError(id.value(), "dangling knowledge reference: " + k);
        }
        t.query_file = base_dir / query_rel;
        t.sample_file = base_dir / sample_rel;
        for (const auto& p : {t.query_file, t.sample_file})
            if (!std::filesystem::exists(p))
                throw TemplateError(id.value(), "referenced file is missing: " + p.string());
        templates.push_back(std::move(t));
    }
    std::sort(templates.begin(), templates.end(),
              [](const Template& a, const Template& b) { return a.id < b.id; });
    return templates;
}

std::vector<const Template*> match_templates(const std::vector<Term>& sensors,
                                             const std::vector<Term>& domains,
                                             const std::vector<Template>& catalog) {
    const std::set<Term> sensor_set(sensors.begin(), sensors.end());
    const std::set<Term> domain_set(domains.begin(), domains.end());

    struct Ranked {
        std::size_t score;
        const Template* tpl;
    };
    std::vector<Ranked> ranked;
    for (const Template& t : catalog) {
        std::size_t sensor_hits = 0;
        std::size_t domain_hits = 0;
        for (const Term& s : t.sensors)
            sensor_hits += sensor_set.count(s);
        for (const Term& d : t.domains)
            domain_hits += domain_set.count(d);
        if (sensor_hits == 0 || domain_hits == 0)
            continue;
        ranked.push_back({sensor_hits + domain_hits, &t});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.tpl->id < b.tpl->id;
    });
    std::vector<const Template*> out;
    for (const Ranked& r : ranked)
        out.push_back(r.tpl);
    return out;
}

std::vector<Term> unify_request_sensors(const std::vector<std::string>& labels,
                                        const std::vector<Term>& domains, const Taxonomy& taxonomy) {
    std::set<Term> out;
    for (const std::string& label : labels) {
        bool resolved = false;
        std::vector<UnificationContext> contexts;
        contexts.push_back({});
        for (const Term& d : domains)
            contexts.push_back({d, std::nullopt});
        for (const UnificationContext& ctx : contexts) {
            try {
                out.insert(taxonomy.unify(label, EntryKind::SensorType, ctx));
                resolved = true;
            } catch (const AmbiguousTermError&) {
            } catch (const UnknownTermError&) {
            }
        }
        if (!resolved)
            throw UnknownTermError(label);
    }
    return {out.begin(), out.end()};
}

std::vector<Term> unify_request_domains(const std::vector<std::string>& labels, const Taxonomy& taxonomy) {
    std::set<Term> out;
    for (const std::string& label : labels)
        out.insert(taxonomy.unify(label, EntryKind::Domain, {}));
    return {out.begin(), out.end()};
}

Bundle materialize(const Template& tpl, const Catalog& catalog, const Taxonomy& taxonomy,
                   const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    if (fs::exists(out_dir) && !fs::is_empty(out_dir))
        throw IoError(out_dir.string(), "bundle directory exists and is not empty");

    // Re-check references before touching the filesystem.
    struct Planned {
        std::string role;
        std::string rel;
        std::string content;
    };
    std::vector<Planned> files;

    std::vector<Term> seeds = tpl.sensors;
    seeds.insert(seeds.end(), tpl.annotation_hints.begin(), tpl.annotation_hints.end());
    seeds.insert(seeds.end(), tpl.domains.begin(), tpl.domains.end());
    const Graph subset = taxonomy.to_graph(taxonomy.reachable_from(seeds));
    files.push_back({"taxonomy", "taxonomy.ttl", serialize(subset, RdfFormat::Turtle)});

    std::vector<std::string> rule_paths;
    for (const std::string& rid : tpl.rulesets) {
        const KnowledgeEntry* e = catalog.find(rid);
        if (!e || e->kind != KnowledgeKind::Ruleset)
            throw TemplateError(tpl.id.value(), "dangling ruleset reference: " + rid);
        const std::string rel = "rules/" + sanitize_filename(rid) + ".rules";
        rule_paths.push_back(rel);
        files.push_back({"rules", rel, read_file(e->path)});
    }
    std::vector<std::string> knowledge_paths;
    for (const std::string& kid : tpl.knowledge) {
        const KnowledgeEntry* e = catalog.find(kid);
        if (!e || e->kind == KnowledgeKind::Ruleset)
            throw TemplateError(tpl.id.value(), "dangling knowledge reference: " + kid);
        const std::string rel = "knowledge/" + sanitize_filename(kid) + ".ttl";
        knowledge_paths.push_back(rel);
        files.push_back({"knowledge", rel, read_file(e->path)});
    }
    files.push_back({"query", "query.rq", read_file(tpl.query_file)});
    files.push_back({"readings", "sample-readings.csv", read_file(tpl.sample_file)});

    // Runbook: the annotate -> reason -> query pipeline over bundle files only.
    std::ostringstream readme;
    readme << "# " << tpl.title << "\n\n" << tpl.description << "\n\n";
    readme << "Self-contained bundle generated from template `" << tpl.id.value() << "`.\n\n";
    readme << "## Run\n\n"
           << "Execute these commands inside the bundle directory (the `m3` binary\n"
           << "must be on PATH):\n\n```\n";
    readme << "m3 annotate --in sample-readings.csv --format csv --taxonomy taxonomy.ttl --out annotated.ttl\n";
    readme << "m3 reason --in annotated.ttl";
    for (const std::string& rel : rule_paths)
        readme << " --rules " << rel;
    readme << " --out enriched.ttl --log derivations.jsonl\n";
    readme << "m3 query --in enriched.ttl";
    for (const std::string& rel : knowledge_paths)
        readme << " --in " << rel;
    readme << " --query query.rq --out csv --dest results.csv\n";
    readme << "```\n\n"
           << "`results.csv` then holds the suggestions the template promises.\n";
    files.push_back({"readme", "README.md", readme.str()});

    fs::create_directories(out_dir);

    Bundle bundle;
    bundle.directory = out_dir;
    std::ostringstream manifest;
    std::sort(files.begin(), files.end(),
              [](const Planned& a, const Planned& b) { return a.rel < b.rel; });
    for (const Planned& f : files) {
        const fs::path target = out_dir / f.rel;
        fs::create_directories(target.parent_path());
        write_file(target, f.content);
        const std::string digest = sha256_hex(f.content);
        manifest << f.role << " " << digest << " " << f.rel << "\n";
        bundle.files.push_back({f.role, f.rel, digest});
    }
    write_file(out_dir / "manifest", manifest.str());
    return bundle;
}

} // namespace m3
