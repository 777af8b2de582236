#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "m3/decimal.hpp"
#include "m3/graph.hpp"
#include "m3/taxonomy.hpp"

namespace m3 {

enum class ReadingFormat { Csv, Json };

/// One raw sensor record as ingested, before any vocabulary unification.
struct RawReading {
    std::string sensor_label;
    std::string value_lexical; // original lexical form, kept for output fidelity
    Decimal value;
    std::string unit_label;
    std::string timestamp; // ISO-8601 instant, validated at parse time
    std::optional<std::string> domain_hint;
    std::optional<std::string> feature_hint;
    std::string source_id;
};

/// Parses the documented CSV schema (header
/// `sensor,value,unit,timestamp,domain,feature,source`) or the JSON array of
/// objects with the same field names. Record order is preserved. A header
/// mismatch aborts the whole file; per-record problems are aggregated into
/// one IngestError.
std::vector<RawReading> parse_readings(std::string_view text, ReadingFormat format);

/// Emits one observation per reading: type, value, unit, timestamp, sensor,
/// domain, and (when hinted) feature, plus one type triple per distinct
/// sensor node. Labels are unified through the taxonomy; values are converted
/// to the measurement type's default unit. Observation and sensor IRIs are
/// deterministic hashes of the identifying fields. All failing readings are
/// reported together in one AnnotationError.
Graph annotate(const std::vector<RawReading>& readings, const Taxonomy& taxonomy);

/// True when `timestamp` is an ISO-8601 instant of the form
/// YYYY-MM-DDThh:mm:ss[.frac](Z|±hh:mm).
bool is_valid_timestamp(std::string_view timestamp);

} // namespace m3
