#include "m3/term.hpp"

#include <cctype>
#include <stdexcept>

#include "m3/vocab.hpp"

namespace m3 {

bool is_absolute_iri(std::string_view iri) {
    if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri[0])))
        return false;
    for (std::size_t i = 1; i < iri.size(); ++i) {
        const char c = iri[i];
        if (c == ':')
            return true;
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return false;
    }
    return false;
}

Term Term::iri(std::string iri) {
    if (!is_absolute_iri(iri))
        throw std::invalid_argument("not an absolute IRI: '" + iri + "'");
    Term t;
    t.kind_ = TermKind::Iri;
    t.value_ = std::move(iri);
    return t;
}

Term Term::blank(std::string label) {
    if (label.empty())
        throw std::invalid_argument("blank node label must be non-empty");
    Term t;
    t.kind_ = TermKind::Blank;
    t.value_ = std::move(label);
    return t;
}

Term Term::literal(std::string lexical) {
    return literal(std::move(lexical), vocab::xsd("string"));
}

Term Term::literal(std::string lexical, std::string datatype_iri) {
    if (!is_absolute_iri(datatype_iri))
        throw std::invalid_argument("literal datatype must be an absolute IRI");
    Term t;
    t.kind_ = TermKind::Literal;
    t.value_ = std::move(lexical);
    t.datatype_ = std::move(datatype_iri);
    return t;
}

Term Term::lang_literal(std::string lexical, std::string language) {
    if (language.empty())
        throw std::invalid_argument("language tag must be non-empty");
    Term t;
    t.kind_ = TermKind::Literal;
    t.value_ = std::move(lexical);
    t.datatype_ = vocab::rdf("langString");
    t.language_ = std::move(language);
    return t;
}

std::string escape_literal(std::string_view lexical) {
    std::string out;
    out.reserve(lexical.size());
    for (char c : lexical) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
        }
    }
    return out;
}

std::string Term::to_ntriples() const {
    switch (kind_) {
        case TermKind::Iri:
            return "<" + value_ + ">";
        case TermKind::Blank:
            return "_:" + value_;
        case TermKind::Literal:
            break;
    }
    std::string out = "\"" + escape_literal(value_) + "\"";
    if (!language_.empty())
        return out + "@" + language_;
    if (datatype_ != vocab::xsd("string"))
        return out + "^^<" + datatype_ + ">";
    return out;
}

std::string Triple::to_ntriples() const {
    return subject.to_ntriples() + " " + predicate.to_ntriples() + " " + object.to_ntriples() + " .";
}

} // namespace m3
