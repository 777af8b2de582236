#include "m3/turtle.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include "m3/errors.hpp"
#include "m3/vocab.hpp"

namespace m3 {

namespace {

bool pn_local_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

bool blank_label_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Graph run() {
        skip_trivia();
        while (!at_end()) {
            if (peek() == '@')
                prefix_declaration();
            else
                statement();
            skip_trivia();
        }
        return std::move(graph_);
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw SyntaxError(line_, column_, message);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        return c;
    }

    void skip_trivia() {
        while (!at_end()) {
            const char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#') {
                while (!at_end() && peek() != '\n')
                    advance();
            } else {
                break;
            }
        }
    }

    void expect(char c, const std::string& what) {
        if (at_end() || peek() != c)
            fail("expected " + what);
        advance();
    }

    void prefix_declaration() {
        for (const char* kw = "@prefix"; *kw; ++kw) {
            if (at_end() || peek() != *kw)
                fail("expected '@prefix'");
            advance();
        }
        skip_trivia();
        std::string prefix;
        while (!at_end() && peek() != ':' && !std::isspace(static_cast<unsigned char>(peek())))
            prefix += advance();
        expect(':', "':' after prefix name");
        skip_trivia();
        const std::string ns = iri_ref();
        skip_trivia();
        expect('.', "'.' after prefix declaration");
        graph_.set_prefix(prefix, ns);
    }

    std::string iri_ref() {
        expect('<', "'<'");
        std::string iri;
        while (!at_end() && peek() != '>') {
            const char c = advance();
            if (c == '\n' || c == '"' || c == '{' || c == '}' || c == '|' || c == ' ')
                fail("invalid character in IRI");
            iri += c;
        }
        expect('>', "'>' closing IRI");
        if (!is_absolute_iri(iri))
            fail("IRI is not absolute: <" + iri + ">");
        return iri;
    }

    Term prefixed_name() {
        const std::size_t err_line = line_;
        std::string prefix;
        while (!at_end() && peek() != ':' && pn_local_char(peek()))
            prefix += advance();
        expect(':', "':' in prefixed name");
        std::string local;
        while (!at_end() && pn_local_char(peek()))
            local += advance();
        if (!local.empty() && local.back() == '.') { // trailing dot ends the statement
            local.pop_back();
            rewind_one('.');
        }
        auto it = graph_.prefixes().find(prefix);
        if (it == graph_.prefixes().end())
            throw UnknownPrefixError(prefix, err_line);
        return Term::iri(it->second + local);
    }

    void rewind_one(char expected) {
        --pos_;
        --column_;
        (void)expected;
    }

    Term blank_node() {
        advance(); // '_'
        expect(':', "':' after '_' in blank node");
        std::string label;
        while (!at_end() && blank_label_char(peek()))
            label += advance();
        if (label.empty())
            fail("empty blank node label");
        return Term::blank(label);
    }

    Term quoted_literal() {
        expect('"', "'\"'");
        std::string lexical;
        while (true) {
            if (at_end())
                fail("unterminated string literal");
            char c = advance();
            if (c == '"')
                break;
            if (c == '\n')
                fail("newline in string literal");
            if (c == '\\') {
                if (at_end())
                    fail("dangling escape");
                const char e = advance();
                switch (e) {
                    case 't': lexical += '\t'; break;
                    case 'n': lexical += '\n'; break;
                    case 'r': lexical += '\r'; break;
                    case '"': lexical += '"'; break;
                    case '\\': lexical += '\\'; break;
                    case 'u': lexical += unicode_escape(4); break;
                    case 'U': lexical += unicode_escape(8); break;
                    default: fail(std::string("unknown escape '\\") + e + "'");
                }
            } else {
                lexical += c;
            }
        }
        if (!at_end() && peek() == '@') {
            advance();
            std::string lang;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-'))
                lang += advance();
            if (lang.empty())
                fail("empty language tag");
            return Term::lang_literal(lexical, lang);
        }
        if (!at_end() && peek() == '^') {
            advance();
            expect('^', "'^^' before datatype");
            skip_trivia();
            Term dt = peek() == '<' ? Term::iri(iri_ref()) : prefixed_name();
            return Term::literal(lexical, dt.value());
        }
        return Term::literal(lexical);
    }

    std::string unicode_escape(int width) {
        std::uint32_t cp = 0;
        for (int i = 0; i < width; ++i) {
            if (at_end())
                fail("truncated unicode escape");
            const char c = advance();
            cp <<= 4;
            if (c >= '0' && c <= '9') cp |= static_cast<std::uint32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') cp |= static_cast<std::uint32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') cp |= static_cast<std::uint32_t>(c - 'A' + 10);
            else fail("invalid hex digit in unicode escape");
        }
        std::string out;
        if (cp <= 0x7F) {
            out += static_cast<char>(cp);
        } else if (cp <= 0x7FF) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp <= 0xFFFF) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
        return out;
    }

    Term subject() {
        const char c = peek();
        if (c == '<')
            return Term::iri(iri_ref());
        if (c == '_')
            return blank_node();
        if (c == '"')
            fail("literal is not allowed as subject");
        return prefixed_name();
    }

    Term verb() {
        if (peek() == 'a') {
            // 'a' only when followed by a delimiter, otherwise a prefixed name.
            const std::size_t next = pos_ + 1;
            if (next >= text_.size() || std::isspace(static_cast<unsigned char>(text_[next])) ||
                text_[next] == '<' || text_[next] == '"' || text_[next] == '_') {
                advance();
                return vocab::rdf_type();
            }
        }
        if (peek() == '<')
            return Term::iri(iri_ref());
        if (peek() == '_' || peek() == '"')
            fail("predicate must be an IRI");
        return prefixed_name();
    }

    Term object() {
        const char c = peek();
        if (c == '<')
            return Term::iri(iri_ref());
        if (c == '_')
            return blank_node();
        if (c == '"')
            return quoted_literal();
        return prefixed_name();
    }

    void statement() {
        const Term subj = subject();
        while (true) {
            skip_trivia();
            if (at_end())
                fail("statement not terminated by '.'");
            const Term pred = verb();
            while (true) {
                skip_trivia();
                if (at_end())
                    fail("statement not terminated by '.'");
                graph_.insert(Triple{subj, pred, object()});
                skip_trivia();
                if (!at_end() && peek() == ',') {
                    advance();
                    continue;
                }
                break;
            }
            if (!at_end() && peek() == ';') {
                advance();
                skip_trivia();
                if (!at_end() && peek() == '.')
                    break; // tolerate trailing ';' before '.'
                continue;
            }
            break;
        }
        skip_trivia();
        expect('.', "'.' terminating statement");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    Graph graph_;
};

/// Longest declared namespace that prefixes `iri` and leaves a safe local name.
std::string shrink(const Graph& g, const std::string& iri) {
    const std::string* best_ns = nullptr;
    const std::string* best_prefix = nullptr;
    for (const auto& [prefix, ns] : g.prefixes()) {
        if (iri.size() <= ns.size() || iri.compare(0, ns.size(), ns) != 0)
            continue;
        if (best_ns && ns.size() <= best_ns->size())
            continue;
        const std::string local = iri.substr(ns.size());
        bool safe = !local.empty() && local.front() != '-' && local.front() != '.' && local.back() != '.';
        for (char c : local)
            if (!pn_local_char(c))
                safe = false;
        if (safe) {
            best_ns = &ns;
            best_prefix = &prefix;
        }
    }
    if (best_ns)
        return *best_prefix + ":" + iri.substr(best_ns->size());
    return "<" + iri + ">";
}

std::string turtle_term(const Graph& g, const Term& t, bool verb_position) {
    switch (t.kind()) {
        case TermKind::Iri:
            if (verb_position && t == vocab::rdf_type())
                return "a";
            return shrink(g, t.value());
        case TermKind::Blank:
            return "_:" + t.value();
        case TermKind::Literal:
            break;
    }
    std::string out = "\"" + escape_literal(t.value()) + "\"";
    if (!t.language().empty())
        return out + "@" + t.language();
    if (t.datatype() != vocab::xsd("string"))
        return out + "^^" + shrink(g, t.datatype());
    return out;
}

std::string serialize_turtle(const Graph& graph) {
    std::ostringstream out;
    for (const auto& [prefix, ns] : graph.prefixes())
        out << "@prefix " << prefix << ": <" << ns << "> .\n";
    if (!graph.prefixes().empty() && !graph.empty())
        out << "\n";

    // Group by subject, then predicate; term order keeps output stable.
    const Term* subj = nullptr;
    const Term* pred = nullptr;
    for (const Triple& t : graph) {
        if (!subj || t.subject != *subj) {
            if (subj)
                out << " .\n";
            out << turtle_term(graph, t.subject, false) << " "
                << turtle_term(graph, t.predicate, true) << " "
                << turtle_term(graph, t.object, false);
        } else if (t.predicate != *pred) {
            out << " ;\n    " << turtle_term(graph, t.predicate, true) << " "
                << turtle_term(graph, t.object, false);
        } else {
            out << " , " << turtle_term(graph, t.object, false);
        }
        subj = &t.subject;
        pred = &t.predicate;
    }
    if (subj)
        out << " .\n";
    return out.str();
}

std::string serialize_ntriples(const Graph& graph) {
    std::string out;
    for (const Triple& t : graph) {
        out += t.to_ntriples();
        out += '\n';
    }
    return out;
}

} // namespace

Graph parse_turtle(std::string_view text) {
    return Parser(text).run();
}

std::string serialize(const Graph& graph, RdfFormat format) {
    return format == RdfFormat::Turtle ? serialize_turtle(graph) : serialize_ntriples(graph);
}

} // namespace m3
