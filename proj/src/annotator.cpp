#include "m3/annotator.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "m3/errors.hpp"
#include "m3/vocab.hpp"

namespace m3 {

namespace {

constexpr std::string_view kCsvHeader = "sensor,value,unit,timestamp,domain,feature,source";

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

bool all_digits(std::string_view s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::optional<RawReading> build_reading(const std::string& sensor, const std::string& value,
                                        const std::string& unit, const std::string& timestamp,
                                        const std::string& domain, const std::string& feature,
                                        const std::string& source, std::string& error) {
    RawReading r;
    if (sensor.empty()) {
        error = "sensor label is empty";
        return std::nullopt;
    }
    auto parsed = Decimal::parse(value);
    if (!parsed) {
        error = "value '" + value + "' is not a finite decimal";
        return std::nullopt;
    }
    if (!is_valid_timestamp(timestamp)) {
        error = "timestamp '" + timestamp + "' is not an ISO-8601 instant";
        return std::nullopt;
    }
    r.sensor_label = sensor;
    r.value_lexical = value;
    r.value = *parsed;
    r.unit_label = unit;
    r.timestamp = timestamp;
    if (!domain.empty())
        r.domain_hint = domain;
    if (!feature.empty())
        r.feature_hint = feature;
    r.source_id = source;
    return r;
}

std::vector<RawReading> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kCsvHeader)
        throw IngestError(0, "header mismatch: expected '" + std::string(kCsvHeader) + "'");

    std::vector<RawReading> readings;
    std::vector<RecordIssue> issues;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        ++index;
        auto fields = split_csv_line(line);
        if (fields.size() != 7) {
            issues.push_back({index, "expected 7 fields, found " + std::to_string(fields.size())});
            continue;
        }
        std::string error;
        auto reading = build_reading(fields[0], fields[1], fields[2], fields[3], fields[4],
                                     fields[5], fields[6], error);
        if (!reading) {
            issues.push_back({index, error});
            continue;
        }
        readings.push_back(std::move(*reading));
    }
    if (!issues.empty())
        throw IngestError(std::move(issues));
    return readings;
}

std::vector<RawReading> parse_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IngestError(0, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_array())
        throw IngestError(0, "top-level JSON value must be an array of readings");

    auto field = [](const nlohmann::json& rec, const char* name) -> std::string {
        if (!rec.contains(name))
            return "";
        const auto& v = rec.at(name);
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_number_integer())
            return std::to_string(v.get<std::int64_t>());
        if (v.is_number_float()) {
            // Re-render through the decimal grammar so CSV and JSON agree.
            std::ostringstream os;
            os << v;
            return os.str();
        }
        return v.dump();
    };

    std::vector<RawReading> readings;
    std::vector<RecordIssue> issues;
    std::size_t index = 0;
    for (const auto& rec : doc) {
        ++index;
        if (!rec.is_object()) {
            issues.push_back({index, "record is not a JSON object"});
            continue;
        }
        std::string error;
        auto reading = build_reading(field(rec, "sensor"), field(rec, "value"), field(rec, "unit"),
                                     field(rec, "timestamp"), field(rec, "domain"),
                                     field(rec, "feature"), field(rec, "source"), error);
        if (!reading) {
            issues.push_back({index, error});
            continue;
        }
        readings.push_back(std::move(*reading));
    }
    if (!issues.empty())
        throw IngestError(std::move(issues));
    return readings;
}

/// Cel <-> Fahrenheit is the only non-identity conversion shipped; slopes are
/// positive so value ordering survives normalization.
struct Conversion {
    std::int64_t slope_num, slope_den, icpt_num, icpt_den;
};

std::optional<Conversion> conversion_between(const Term& from, const Term& to) {
    if (from == to)
        return std::nullopt; // identity, no rounding applied
    const Term cel = Term::iri(vocab::unit("Cel"));
    const Term fahrenheit = Term::iri(vocab::unit("Fahrenheit"));
    if (from == fahrenheit && to == cel)
        return Conversion{5, 9, -160, 9};
    if (from == cel && to == fahrenheit)
        return Conversion{9, 5, 32, 1};
    return std::nullopt;
}

/// Feature hints map mechanically onto the feature namespace: normalized
/// tokens in original order, CamelCased ("body" -> feat:Body).
Term feature_iri(const std::string& hint) {
    std::string local;
    bool upper = true;
    for (char c : hint) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            local += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                           : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            upper = false;
        } else {
            upper = true;
        }
    }
    return Term::iri(vocab::feature(local));
}

} // namespace

bool is_valid_timestamp(std::string_view ts) {
    // YYYY-MM-DDThh:mm:ss[.frac](Z|+hh:mm|-hh:mm)
    if (ts.size() < 20)
        return false;
    auto digit = [&](std::size_t i) { return std::isdigit(static_cast<unsigned char>(ts[i])) != 0; };
    if (!(digit(0) && digit(1) && digit(2) && digit(3) && ts[4] == '-' && digit(5) && digit(6) &&
          ts[7] == '-' && digit(8) && digit(9) && ts[10] == 'T' && digit(11) && digit(12) &&
          ts[13] == ':' && digit(14) && digit(15) && ts[16] == ':' && digit(17) && digit(18)))
        return false;
    const int month = (ts[5] - '0') * 10 + (ts[6] - '0');
    const int day = (ts[8] - '0') * 10 + (ts[9] - '0');
    const int hour = (ts[11] - '0') * 10 + (ts[12] - '0');
    const int minute = (ts[14] - '0') * 10 + (ts[15] - '0');
    const int second = (ts[17] - '0') * 10 + (ts[18] - '0');
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 59)
        return false;
    std::size_t i = 19;
    if (ts[i] == '.') {
        ++i;
        const std::size_t start = i;
        while (i < ts.size() && std::isdigit(static_cast<unsigned char>(ts[i])))
            ++i;
        if (i == start)
            return false;
    }
    if (i >= ts.size())
        return false;
    if (ts[i] == 'Z')
        return i + 1 == ts.size();
    if (ts[i] != '+' && ts[i] != '-')
        return false;
    return ts.size() == i + 6 && all_digits(ts.substr(i + 1, 2)) && ts[i + 3] == ':' &&
           all_digits(ts.substr(i + 4, 2));
}

std::vector<RawReading> parse_readings(std::string_view text, ReadingFormat format) {
    return format == ReadingFormat::Csv ? parse_csv(text) : parse_json(text);
}

Graph annotate(const std::vector<RawReading>& readings, const Taxonomy& taxonomy) {
    Graph g;
    g.set_prefix("m3x", std::string(vocab::kClassNs));
    g.set_prefix("m3s", std::string(vocab::kShapeNs));
    g.set_prefix("unit", std::string(vocab::kUnitNs));
    g.set_prefix("dom", std::string(vocab::kDomainNs));
    g.set_prefix("feat", std::string(vocab::kFeatureNs));
    g.set_prefix("data", std::string(vocab::kDataNs));
    g.set_prefix("xsd", std::string(vocab::kXsdNs));

    std::vector<RecordIssue> issues;
    for (std::size_t i = 0; i < readings.size(); ++i) {
        const RawReading& r = readings[i];
        try {
            UnificationContext ctx;
            if (r.domain_hint)
                ctx.domain = taxonomy.unify(*r.domain_hint, EntryKind::Domain, {});
            if (r.feature_hint)
                ctx.feature = feature_iri(*r.feature_hint);

            const Term sensor_type = taxonomy.unify(r.sensor_label, EntryKind::SensorType, ctx);
            const TaxonomyEntry* sensor_entry = taxonomy.find(sensor_type);
            if (!sensor_entry || !sensor_entry->measures)
                throw Error("sensor type '" + sensor_type.value() + "' does not declare what it measures");
            const Term measurement = taxonomy.unify(*sensor_entry->measures, EntryKind::MeasurementType, ctx);
            const TaxonomyEntry* measurement_entry = taxonomy.find(measurement);
            const Term unit = taxonomy.unify(r.unit_label, EntryKind::Unit, ctx);

            Term out_unit = unit;
            Term value = Term::literal(r.value_lexical, vocab::xsd("decimal"));
            if (measurement_entry && measurement_entry->default_unit &&
                *measurement_entry->default_unit != unit) {
                const Term& target = *measurement_entry->default_unit;
                auto conv = conversion_between(unit, target);
                if (!conv)
                    throw Error("no unit conversion from " + unit.value() + " to " + target.value());
                const Decimal converted =
                    r.value.affine(conv->slope_num, conv->slope_den, conv->icpt_num, conv->icpt_den);
                value = Term::literal(converted.to_canonical(), vocab::xsd("decimal"));
                out_unit = target;
            }

            const Term obs = Term::iri(vocab::data(
                "obs-" + hex64(fnv1a(r.source_id + "\x1f" + r.timestamp + "\x1f" + r.sensor_label))));
            const Term sensor = Term::iri(
                vocab::data("sensor-" + hex64(fnv1a(r.source_id + "\x1f" + r.sensor_label))));

            g.insert({obs, vocab::rdf_type(), measurement});
            g.insert({obs, vocab::has_value(), value});
            g.insert({obs, vocab::has_unit(), out_unit});
            g.insert({obs, vocab::has_timestamp(), Term::literal(r.timestamp, vocab::xsd("dateTime"))});
            g.insert({obs, vocab::observed_by(), sensor});
            if (ctx.domain)
                g.insert({obs, vocab::has_domain(), *ctx.domain});
            else if (measurement_entry && measurement_entry->domains.size() == 1)
                g.insert({obs, vocab::has_domain(), measurement_entry->domains.front()});
            else
                throw Error("reading has no domain hint and the measurement type '" +
                            measurement.value() + "' does not pin one");
            if (ctx.feature)
                g.insert({obs, vocab::has_feature(), *ctx.feature});
            g.insert({sensor, vocab::rdf_type(), sensor_type});
        } catch (const Error& e) {
            issues.push_back({i + 1, e.what()});
        }
    }
    if (!issues.empty())
        throw AnnotationError(std::move(issues));
    return g;
}

} // namespace m3
