#pragma once

#include <string>
#include <string_view>

#include "m3/term.hpp"

// IRIs of the vocabularies this engine ships: the annotation shape (observation
// predicates and kind roots), the class/unit/domain/feature namespaces used by
// the taxonomy, and the template vocabulary. External standard namespaces
// (rdf, xsd) live here too so every module spells them identically.
namespace m3::vocab {

inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";

inline constexpr std::string_view kShapeNs = "http://m3.example.org/shape#";
inline constexpr std::string_view kClassNs = "http://m3.example.org/class#";
inline constexpr std::string_view kTaxNs = "http://m3.example.org/tax#";
inline constexpr std::string_view kUnitNs = "http://m3.example.org/unit#";
inline constexpr std::string_view kDomainNs = "http://m3.example.org/domain#";
inline constexpr std::string_view kFeatureNs = "http://m3.example.org/feature#";
inline constexpr std::string_view kDataNs = "http://m3.example.org/data#";
inline constexpr std::string_view kTemplateNs = "http://m3.example.org/tpl#";

inline std::string rdf(std::string_view local) { return std::string(kRdfNs) + std::string(local); }
inline std::string xsd(std::string_view local) { return std::string(kXsdNs) + std::string(local); }
inline std::string shape(std::string_view local) { return std::string(kShapeNs) + std::string(local); }
inline std::string cls(std::string_view local) { return std::string(kClassNs) + std::string(local); }
inline std::string tax(std::string_view local) { return std::string(kTaxNs) + std::string(local); }
inline std::string unit(std::string_view local) { return std::string(kUnitNs) + std::string(local); }
inline std::string domain(std::string_view local) { return std::string(kDomainNs) + std::string(local); }
inline std::string feature(std::string_view local) { return std::string(kFeatureNs) + std::string(local); }
inline std::string data(std::string_view local) { return std::string(kDataNs) + std::string(local); }
inline std::string tpl(std::string_view local) { return std::string(kTemplateNs) + std::string(local); }

inline const Term& rdf_type() { static const Term t = Term::iri(rdf("type")); return t; }
inline const Term& rdf_lang_string() { static const Term t = Term::iri(rdf("langString")); return t; }
inline const Term& xsd_string() { static const Term t = Term::iri(xsd("string")); return t; }
inline const Term& xsd_decimal() { static const Term t = Term::iri(xsd("decimal")); return t; }
inline const Term& xsd_integer() { static const Term t = Term::iri(xsd("integer")); return t; }
inline const Term& xsd_date_time() { static const Term t = Term::iri(xsd("dateTime")); return t; }

// Observation shape predicates (the SSN-role mapping is documented in docs/formats.md).
inline const Term& has_value() { static const Term t = Term::iri(shape("hasValue")); return t; }
inline const Term& has_unit() { static const Term t = Term::iri(shape("hasUnit")); return t; }
inline const Term& has_timestamp() { static const Term t = Term::iri(shape("hasTimestamp")); return t; }
inline const Term& observed_by() { static const Term t = Term::iri(shape("observedBy")); return t; }
inline const Term& has_domain() { static const Term t = Term::iri(shape("hasDomain")); return t; }
inline const Term& has_feature() { static const Term t = Term::iri(shape("hasFeature")); return t; }

// Kind roots that taxonomy parent chains terminate at.
inline const Term& sensor_root() { static const Term t = Term::iri(shape("Sensor")); return t; }
inline const Term& observation_value_root() { static const Term t = Term::iri(shape("ObservationValue")); return t; }
inline const Term& feature_root() { static const Term t = Term::iri(shape("FeatureOfInterest")); return t; }
inline const Term& unit_root() { static const Term t = Term::iri(shape("Unit")); return t; }
inline const Term& domain_root() { static const Term t = Term::iri(shape("Domain")); return t; }

} // namespace m3::vocab
