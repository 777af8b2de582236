#include "m3/query.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

#include "m3/decimal.hpp"
#include "m3/errors.hpp"
#include "m3/vocab.hpp"

namespace m3 {

namespace {

const std::set<std::string>& rejected_keywords() {
    static const std::set<std::string> kw = {
        "OPTIONAL", "UNION",  "GRAPH",  "SERVICE", "MINUS",    "BIND",     "VALUES",
        "GROUP",    "HAVING", "ASK",    "CONSTRUCT", "DESCRIBE", "EXISTS", "NOT",
        "OFFSET",   "REDUCED", "COUNT", "SUM",     "AVG",      "MIN",      "MAX",
    };
    return kw;
}

class QueryParser {
public:
    explicit QueryParser(std::string_view text) : text_(text) {}

    Query run() {
        skip_trivia();
        while (keyword_ahead("PREFIX")) {
            consume_keyword("PREFIX");
            prefix_declaration();
            skip_trivia();
        }
        consume_keyword("SELECT");
        skip_trivia();
        if (keyword_ahead("DISTINCT")) {
            consume_keyword("DISTINCT");
            query_.distinct = true;
            skip_trivia();
        }
        select_clause();
        skip_trivia();
        consume_keyword("WHERE");
        skip_trivia();
        group_graph_pattern();
        skip_trivia();
        if (keyword_ahead("ORDER")) {
            consume_keyword("ORDER");
            skip_trivia();
            consume_keyword("BY");
            skip_trivia();
            query_.order_by = variable();
            skip_trivia();
        }
        if (keyword_ahead("LIMIT")) {
            consume_keyword("LIMIT");
            skip_trivia();
            query_.limit = integer();
            skip_trivia();
        }
        if (!at_end())
            fail("unexpected trailing input");
        validate();
        return std::move(query_);
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw QuerySyntaxError(line_, message); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n')
            ++line_;
        return c;
    }

    void skip_trivia() {
        while (!at_end()) {
            if (std::isspace(static_cast<unsigned char>(peek())))
                advance();
            else if (peek() == '#')
                while (!at_end() && peek() != '\n')
                    advance();
            else
                break;
        }
    }

    static std::string upper(std::string s) {
        for (char& c : s)
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return s;
    }

    std::string peek_word() const {
        std::size_t i = pos_;
        std::string w;
        while (i < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_'))
            w += text_[i++];
        return w;
    }

    bool keyword_ahead(const std::string& kw) const { return upper(peek_word()) == kw; }

    void consume_keyword(const std::string& kw) {
        if (!keyword_ahead(kw))
            fail("expected " + kw);
        for (std::size_t i = 0; i < kw.size(); ++i)
            advance();
    }

    void reject_if_keyword(const std::string& word) {
        if (rejected_keywords().count(upper(word)))
            throw UnsupportedFeatureError(upper(word));
    }

    void prefix_declaration() {
        skip_trivia();
        std::string prefix;
        while (!at_end() && peek() != ':' && !std::isspace(static_cast<unsigned char>(peek())))
            prefix += advance();
        if (at_end() || peek() != ':')
            fail("expected ':' in PREFIX declaration");
        advance();
        skip_trivia();
        if (at_end() || peek() != '<')
            fail("expected '<' opening namespace IRI");
        advance();
        std::string ns;
        while (!at_end() && peek() != '>')
            ns += advance();
        if (at_end())
            fail("unterminated namespace IRI");
        advance();
        if (!is_absolute_iri(ns))
            fail("namespace IRI is not absolute");
        prefixes_[prefix] = ns;
    }

    void select_clause() {
        if (!at_end() && peek() == '*') {
            advance();
            query_.select_all = true;
            return;
        }
        while (!at_end() && peek() == '?') {
            query_.select_vars.push_back(variable());
            skip_trivia();
        }
        if (query_.select_vars.empty())
            fail("SELECT needs '*' or at least one variable");
    }

    std::string variable() {
        if (at_end() || peek() != '?')
            fail("expected variable");
        advance();
        std::string name;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            name += advance();
        if (name.empty())
            fail("empty variable name");
        return name;
    }

    std::size_t integer() {
        std::string digits;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
            digits += advance();
        if (digits.empty())
            fail("expected integer");
        return static_cast<std::size_t>(std::stoull(digits));
    }

    void group_graph_pattern() {
        if (at_end() || peek() != '{')
            fail("expected '{' opening WHERE");
        advance();
        while (true) {
            skip_trivia();
            if (at_end())
                fail("unterminated WHERE block");
            if (peek() == '}') {
                advance();
                return;
            }
            const std::string word = peek_word();
            if (!word.empty()) {
                reject_if_keyword(word);
                if (upper(word) == "FILTER") {
                    consume_keyword("FILTER");
                    query_.where.push_back(filter());
                    skip_trivia();
                    if (!at_end() && peek() == '.')
                        advance();
                    continue;
                }
            }
            if (peek() == '{')
                throw UnsupportedFeatureError("nested group");
            query_.where.push_back(triple_pattern());
            skip_trivia();
            if (!at_end() && peek() == '.')
                advance();
        }
    }

    QueryPattern triple_pattern() {
        QueryPattern p;
        p.subject = slot(false);
        skip_trivia();
        p.predicate = slot(true);
        skip_trivia();
        p.object = slot(false);
        return p;
    }

    QuerySlot slot(bool verb_position) {
        if (at_end())
            fail("unexpected end of pattern");
        const char c = peek();
        if (c == '?')
            return QuerySlot::var(variable());
        if (c == '<') {
            advance();
            std::string iri;
            while (!at_end() && peek() != '>')
                iri += advance();
            if (at_end())
                fail("unterminated IRI");
            advance();
            if (!is_absolute_iri(iri))
                fail("IRI is not absolute: <" + iri + ">");
            return QuerySlot::val(Term::iri(iri));
        }
        if (c == '"') {
            advance();
            std::string lexical;
            while (!at_end() && peek() != '"') {
                char ch = advance();
                if (ch == '\\' && !at_end())
                    ch = advance();
                lexical += ch;
            }
            if (at_end())
                fail("unterminated string literal");
            advance();
            if (!at_end() && peek() == '^') {
                advance();
                if (at_end() || peek() != '^')
                    fail("expected '^^'");
                advance();
                return QuerySlot::val(Term::literal(lexical, resolve_iri().value()));
            }
            return QuerySlot::val(Term::literal(lexical));
        }
        if (verb_position && c == 'a') {
            const std::size_t next = pos_ + 1;
            if (next >= text_.size() || std::isspace(static_cast<unsigned char>(text_[next])) ||
                text_[next] == '?' || text_[next] == '<') {
                advance();
                return QuerySlot::val(vocab::rdf_type());
            }
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
            std::string num;
            while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                                 peek() == '-' || peek() == '+'))
                num += advance();
            if (!Decimal::parse(num))
                fail("malformed numeric literal '" + num + "'");
            return QuerySlot::val(Term::literal(num, vocab::xsd("decimal")));
        }
        const std::string word = peek_word();
        reject_if_keyword(word);
        return QuerySlot::val(resolve_iri());
    }

    Term resolve_iri() {
        if (!at_end() && peek() == '<') {
            advance();
            std::string iri;
            while (!at_end() && peek() != '>')
                iri += advance();
            if (at_end())
                fail("unterminated IRI");
            advance();
            if (!is_absolute_iri(iri))
                fail("IRI is not absolute: <" + iri + ">");
            return Term::iri(iri);
        }
        std::string prefix;
        while (!at_end() && peek() != ':' &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            prefix += advance();
        if (at_end() || peek() != ':')
            fail("expected prefixed name");
        advance();
        std::string local;
        while (!at_end() &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            local += advance();
        auto it = prefixes_.find(prefix);
        if (it == prefixes_.end())
            fail("undeclared prefix '" + prefix + ":'");
        return Term::iri(it->second + local);
    }

    FilterExpr filter() {
        skip_trivia();
        if (at_end() || peek() != '(')
            fail("expected '(' after FILTER");
        advance();
        FilterExpr expr = or_expr();
        skip_trivia();
        if (at_end() || peek() != ')')
            fail("expected ')' closing FILTER");
        advance();
        return expr;
    }

    FilterExpr or_expr() {
        FilterExpr left = and_expr();
        skip_trivia();
        while (!at_end() && peek() == '|') {
            advance();
            if (at_end() || peek() != '|')
                fail("expected '||'");
            advance();
            FilterExpr node;
            node.kind = FilterExpr::Kind::Or;
            node.children.push_back(std::move(left));
            node.children.push_back(and_expr());
            left = std::move(node);
            skip_trivia();
        }
        return left;
    }

    FilterExpr and_expr() {
        FilterExpr left = primary_expr();
        skip_trivia();
        while (!at_end() && peek() == '&') {
            advance();
            if (at_end() || peek() != '&')
                fail("expected '&&'");
            advance();
            FilterExpr node;
            node.kind = FilterExpr::Kind::And;
            node.children.push_back(std::move(left));
            node.children.push_back(primary_expr());
            left = std::move(node);
            skip_trivia();
        }
        return left;
    }

    FilterExpr primary_expr() {
        skip_trivia();
        if (!at_end() && peek() == '(') {
            advance();
            FilterExpr inner = or_expr();
            skip_trivia();
            if (at_end() || peek() != ')')
                fail("expected ')'");
            advance();
            return inner;
        }
        FilterExpr node;
        node.kind = FilterExpr::Kind::Cmp;
        node.cmp.variable = variable();
        skip_trivia();
        node.cmp.op = comparison_op();
        skip_trivia();
        node.cmp.constant = filter_constant();
        return node;
    }

    CmpOp comparison_op() {
        if (at_end())
            fail("expected comparison operator");
        const char c = advance();
        switch (c) {
            case '<': if (!at_end() && peek() == '=') { advance(); return CmpOp::Le; } return CmpOp::Lt;
            case '>': if (!at_end() && peek() == '=') { advance(); return CmpOp::Ge; } return CmpOp::Gt;
            case '=': return CmpOp::Eq;
            case '!':
                if (!at_end() && peek() == '=') { advance(); return CmpOp::Ne; }
                fail("expected '!='");
            default:
                fail("unknown comparison operator");
        }
    }

    Term filter_constant() {
        if (at_end())
            fail("expected filter constant");
        const char c = peek();
        if (c == '<' || (!std::isdigit(static_cast<unsigned char>(c)) && c != '-' && c != '+'))
            return resolve_iri();
        std::string num;
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                             peek() == '-' || peek() == '+'))
            num += advance();
        if (!Decimal::parse(num))
            fail("filter constants must be numeric literals or IRIs");
        return Term::literal(num, vocab::xsd("decimal"));
    }

    /// Selected, ordered, and filtered variables must occur in some pattern,
    /// and each FILTER must stay on a single variable.
    void validate() const {
        std::set<std::string> pattern_vars;
        for (const WhereElement& e : query_.where)
            if (const auto* p = std::get_if<QueryPattern>(&e))
                for (const QuerySlot* s : {&p->subject, &p->predicate, &p->object})
                    if (s->is_variable)
                        pattern_vars.insert(s->variable);
        auto require = [&](const std::string& var, const char* where) {
            if (!pattern_vars.count(var))
                throw QuerySyntaxError(1, std::string("variable ?") + var + " in " + where +
                                              " does not occur in any triple pattern");
        };
        for (const std::string& v : query_.select_vars)
            require(v, "SELECT");
        if (query_.order_by)
            require(*query_.order_by, "ORDER BY");
        for (const WhereElement& e : query_.where) {
            if (const auto* f = std::get_if<FilterExpr>(&e)) {
                std::set<std::string> used;
                collect_filter_vars(*f, used);
                if (used.size() != 1)
                    throw QuerySyntaxError(1, "each FILTER must constrain exactly one variable");
                require(*used.begin(), "FILTER");
            }
        }
    }

    static void collect_filter_vars(const FilterExpr& f, std::set<std::string>& out) {
        if (f.kind == FilterExpr::Kind::Cmp)
            out.insert(f.cmp.variable);
        for (const FilterExpr& child : f.children)
            collect_filter_vars(child, out);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::map<std::string, std::string> prefixes_;
    Query query_;
};

using Bindings = std::map<std::string, Term>;

std::optional<Term> bound(const QuerySlot& slot, const Bindings& b) {
    if (!slot.is_variable)
        return slot.constant;
    auto it = b.find(slot.variable);
    return it == b.end() ? std::nullopt : std::optional<Term>(it->second);
}

enum class FilterVerdict { True, False, TypeError };

FilterVerdict eval_cmp(const Comparison& cmp, const Term& value) {
    const auto constant_num = Decimal::from_term(cmp.constant);
    if (constant_num) {
        const auto value_num = Decimal::from_term(value);
        if (!value_num)
            return FilterVerdict::TypeError;
        const auto ord = *value_num <=> *constant_num;
        bool holds = false;
        switch (cmp.op) {
            case CmpOp::Lt: holds = ord < 0; break;
            case CmpOp::Le: holds = ord <= 0; break;
            case CmpOp::Gt: holds = ord > 0; break;
            case CmpOp::Ge: holds = ord >= 0; break;
            case CmpOp::Eq: holds = ord == 0; break;
            case CmpOp::Ne: holds = ord != 0; break;
        }
        return holds ? FilterVerdict::True : FilterVerdict::False;
    }
    // IRI constant: only equality comparisons are meaningful.
    if (cmp.op == CmpOp::Eq)
        return value == cmp.constant ? FilterVerdict::True : FilterVerdict::False;
    if (cmp.op == CmpOp::Ne)
        return value == cmp.constant ? FilterVerdict::False : FilterVerdict::True;
    return FilterVerdict::TypeError;
}

FilterVerdict eval_filter(const FilterExpr& f, const Bindings& b) {
    switch (f.kind) {
        case FilterExpr::Kind::Cmp: {
            auto it = b.find(f.cmp.variable);
            if (it == b.end())
                return FilterVerdict::TypeError; // validated away at parse time
            return eval_cmp(f.cmp, it->second);
        }
        case FilterExpr::Kind::And: {
            for (const FilterExpr& child : f.children) {
                const FilterVerdict v = eval_filter(child, b);
                if (v != FilterVerdict::True)
                    return v;
            }
            return FilterVerdict::True;
        }
        case FilterExpr::Kind::Or: {
            bool type_error = false;
            for (const FilterExpr& child : f.children) {
                const FilterVerdict v = eval_filter(child, b);
                if (v == FilterVerdict::True)
                    return v;
                if (v == FilterVerdict::TypeError)
                    type_error = true;
            }
            return type_error ? FilterVerdict::TypeError : FilterVerdict::False;
        }
    }
    return FilterVerdict::False;
}

TriplePattern to_store_pattern(const QueryPattern& p, const Bindings& b) {
    TriplePattern out;
    out.subject = bound(p.subject, b);
    out.predicate = bound(p.predicate, b);
    out.object = bound(p.object, b);
    return out;
}

bool bind_solution(const QueryPattern& p, const Triple& t, Bindings& b) {
    auto bind_one = [&](const QuerySlot& slot, const Term& value) {
        if (!slot.is_variable)
            return slot.constant == value;
        auto [it, inserted] = b.emplace(slot.variable, value);
        return inserted || it->second == value;
    };
    return bind_one(p.subject, t.subject) && bind_one(p.predicate, t.predicate) &&
           bind_one(p.object, t.object);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

Query parse_query(std::string_view text) {
    return QueryParser(text).run();
}

SolutionSet execute(const Query& query, const Graph& graph) {
    // Split WHERE into patterns and filters; order patterns greedily by
    // constant-only selectivity from the index counts. Semantics do not
    // depend on this order, only speed does.
    std::vector<const QueryPattern*> patterns;
    std::vector<const FilterExpr*> filters;
    for (const WhereElement& e : query.where) {
        if (const auto* p = std::get_if<QueryPattern>(&e))
            patterns.push_back(p);
        else
            filters.push_back(&std::get<FilterExpr>(e));
    }
    std::vector<std::pair<std::size_t, const QueryPattern*>> ranked;
    for (const QueryPattern* p : patterns)
        ranked.emplace_back(graph.count(to_store_pattern(*p, {})), p);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t type_errors = 0;
    std::vector<Bindings> solutions;
    Bindings scratch;
    // Nested-loop join over the ranked patterns.
    auto join = [&](auto&& self, std::size_t depth, Bindings& b) -> void {
        if (depth == ranked.size()) {
            solutions.push_back(b);
            return;
        }
        const QueryPattern& p = *ranked[depth].second;
        for (const Triple& t : graph.match(to_store_pattern(p, b))) {
            Bindings next = b;
            if (bind_solution(p, t, next))
                self(self, depth + 1, next);
        }
    };
    join(join, 0, scratch);

    // Filters run on complete rows; a type error drops the row and is tallied.
    std::vector<Bindings> kept;
    for (Bindings& b : solutions) {
        bool ok = true;
        for (const FilterExpr* f : filters) {
            switch (eval_filter(*f, b)) {
                case FilterVerdict::True:
                    break;
                case FilterVerdict::False:
                    ok = false;
                    break;
                case FilterVerdict::TypeError:
                    ok = false;
                    ++type_errors;
                    break;
            }
            if (!ok)
                break;
        }
        if (ok)
            kept.push_back(std::move(b));
    }

    // Project.
    SolutionSet out;
    out.filter_type_errors = type_errors;
    if (query.select_all) {
        std::set<std::string> seen;
        for (const WhereElement& e : query.where)
            if (const auto* p = std::get_if<QueryPattern>(&e))
                for (const QuerySlot* s : {&p->subject, &p->predicate, &p->object})
                    if (s->is_variable && seen.insert(s->variable).second)
                        out.vars.push_back(s->variable);
    } else {
        out.vars = query.select_vars;
    }
    for (const Bindings& b : kept) {
        std::vector<Term> row;
        row.reserve(out.vars.size());
        for (const std::string& v : out.vars)
            row.push_back(b.at(v));
        out.rows.push_back(std::move(row));
    }

    if (query.distinct) {
        std::sort(out.rows.begin(), out.rows.end());
        out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
    }

    auto row_key = [&](const std::vector<Term>& row) {
        std::string key;
        for (const Term& t : row) {
            key += t.to_ntriples();
            key += '\x1f';
        }
        return key;
    };
    if (query.order_by) {
        const auto it = std::find(out.vars.begin(), out.vars.end(), *query.order_by);
        const std::size_t idx = static_cast<std::size_t>(it - out.vars.begin());
        const bool projected = it != out.vars.end();
        // ORDER BY on an unprojected variable falls back to row order; the
        // parser guarantees the variable exists in the pattern, projection
        // may still omit it.
        std::stable_sort(out.rows.begin(), out.rows.end(),
                         [&](const std::vector<Term>& a, const std::vector<Term>& b) {
                             if (projected) {
                                 const Term& ta = a[idx];
                                 const Term& tb = b[idx];
                                 const auto da = Decimal::from_term(ta);
                                 const auto db = Decimal::from_term(tb);
                                 if (da && db && !(*da == *db))
                                     return *da < *db;
                                 if (ta != tb)
                                     return ta.to_ntriples() < tb.to_ntriples();
                             }
                             return row_key(a) < row_key(b);
                         });
    } else {
        std::sort(out.rows.begin(), out.rows.end(),
                  [&](const std::vector<Term>& a, const std::vector<Term>& b) {
                      return row_key(a) < row_key(b);
                  });
    }

    if (query.limit && out.rows.size() > *query.limit)
        out.rows.resize(*query.limit);
    return out;
}

std::string to_csv(const SolutionSet& s) {
    std::string out;
    for (std::size_t i = 0; i < s.vars.size(); ++i) {
        if (i)
            out += ',';
        out += csv_escape(s.vars[i]);
    }
    out += '\n';
    for (const auto& row : s.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += csv_escape(row[i].to_ntriples());
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const SolutionSet& s) {
    nlohmann::json doc;
    doc["vars"] = s.vars;
    auto& rows = doc["rows"] = nlohmann::json::array();
    for (const auto& row : s.rows) {
        nlohmann::json jrow = nlohmann::json::array();
        for (const Term& t : row)
            jrow.push_back(t.to_ntriples());
        rows.push_back(std::move(jrow));
    }
    return doc.dump(2) + "\n";
}

} // namespace m3
