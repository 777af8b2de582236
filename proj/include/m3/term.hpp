#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace m3 {

enum class TermKind : std::uint8_t { Iri, Blank, Literal };

/// One RDF term: an absolute IRI, a blank node label, or a literal with an
/// explicit datatype IRI and an optional language tag. Terms are immutable
/// value types with a total order (kind, then fields), so they can key
/// ordered containers and give deterministic serializations.
class Term {
public:
    Term() : kind_(TermKind::Iri) {}

    /// Throws std::invalid_argument unless `iri` is absolute (has a scheme).
    static Term iri(std::string iri);
    static Term blank(std::string label);
    /// Plain literal; datatype defaults to xsd:string.
    static Term literal(std::string lexical);
    static Term literal(std::string lexical, std::string datatype_iri);
    /// Language-tagged literal; datatype is forced to rdf:langString.
    static Term lang_literal(std::string lexical, std::string language);

    TermKind kind() const { return kind_; }
    bool is_iri() const { return kind_ == TermKind::Iri; }
    bool is_blank() const { return kind_ == TermKind::Blank; }
    bool is_literal() const { return kind_ == TermKind::Literal; }

    /// IRI string, blank label, or literal lexical form depending on kind.
    const std::string& value() const { return value_; }
    const std::string& datatype() const { return datatype_; }
    const std::string& language() const { return language_; }

    /// N-Triples surface form (<iri>, _:label, "lex"^^<dt> / "lex"@lang).
    std::string to_ntriples() const;

    friend std::strong_ordering operator<=>(const Term& a, const Term& b) = default;
    friend bool operator==(const Term& a, const Term& b) = default;

private:
    TermKind kind_;
    std::string value_;
    std::string datatype_;
    std::string language_;
};

/// True when the string has a leading scheme followed by ':'.
bool is_absolute_iri(std::string_view iri);

/// Escapes a literal body for N-Triples / Turtle double-quoted strings.
std::string escape_literal(std::string_view lexical);

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    std::string to_ntriples() const;

    friend std::strong_ordering operator<=>(const Triple& a, const Triple& b) = default;
    friend bool operator==(const Triple& a, const Triple& b) = default;
};

/// Match pattern with wildcards: unset positions match anything.
struct TriplePattern {
    std::optional<Term> subject;
    std::optional<Term> predicate;
    std::optional<Term> object;

    bool matches(const Triple& t) const {
        return (!subject || *subject == t.subject) &&
               (!predicate || *predicate == t.predicate) &&
               (!object || *object == t.object);
    }
};

} // namespace m3
