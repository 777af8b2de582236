#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "m3/annotator.hpp"
#include "m3/graph.hpp"
#include "m3/knowledge.hpp"
#include "m3/query.hpp"
#include "m3/reasoner.hpp"

namespace m3 {

/// Stage-keyed process exit codes (documented in docs/formats.md).
enum ExitCode : int {
    kOk = 0,
    kIngestFailed = 1,
    kAnnotateFailed = 2,
    kReasonFailed = 3,
    kQueryFailed = 4,
    kTemplateFailed = 5,
    kKnowledgeFailed = 6,
    kUsage = 64,
};

struct PipelineConfig {
    std::filesystem::path input;
    ReadingFormat format = ReadingFormat::Csv;
    std::filesystem::path taxonomy;
    std::vector<std::filesystem::path> rules;
    std::filesystem::path knowledge_manifest;
    std::filesystem::path query;
    std::filesystem::path out_dir;
    std::string result_format = "csv"; // csv | json
    int verbosity = 0;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Rule files parse independently (each carries its own prefix block); rule
/// names must stay unique across the whole set.
RuleSet load_rule_files(const std::vector<std::filesystem::path>& files);

/// One line per derivation: {"bindings":{...},"iteration":n,"rule":"...","triples":[...]}.
std::string derivations_to_jsonl(const std::vector<Derivation>& derivations);

/// Domain IRIs referenced by hasDomain triples; the pipeline selects knowledge
/// for exactly the domains the annotated data mentions.
std::vector<Term> domains_in_graph(const Graph& graph);

/// Runs annotate -> reason -> knowledge merge -> query, writing annotated.ttl,
/// enriched.ttl, derivations.jsonl, merged.ttl, and results.<fmt> into
/// config.out_dir. Artifacts of completed stages survive a later stage's
/// failure. Returns the exit code of the first failing stage, else kOk.
/// Output bytes are identical to running the four subcommands in sequence.
int run_pipeline(const PipelineConfig& config, std::ostream& diagnostics);

} // namespace m3
