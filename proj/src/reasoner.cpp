#include "m3/reasoner.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "m3/decimal.hpp"
#include "m3/errors.hpp"
#include "m3/vocab.hpp"

namespace m3 {

namespace {

/// Bare predicate names the rule grammar resolves without a prefix.
const std::map<std::string, Term>& bare_predicates() {
    static const std::map<std::string, Term> map = {
        {"a", vocab::rdf_type()},
        {"type", vocab::rdf_type()},
        {"hasValue", vocab::has_value()},
        {"hasUnit", vocab::has_unit()},
        {"hasTimestamp", vocab::has_timestamp()},
        {"observedBy", vocab::observed_by()},
        {"hasDomain", vocab::has_domain()},
        {"hasFeature", vocab::has_feature()},
    };
    return map;
}

const std::map<std::string, BuiltinOp>& builtin_ops() {
    static const std::map<std::string, BuiltinOp> map = {
        {"greaterThan", BuiltinOp::GreaterThan}, {"lessThan", BuiltinOp::LessThan},
        {"ge", BuiltinOp::Ge},                   {"le", BuiltinOp::Le},
        {"equal", BuiltinOp::Equal},             {"notEqual", BuiltinOp::NotEqual},
        {"interval", BuiltinOp::Interval},
    };
    return map;
}

class RuleParser {
public:
    explicit RuleParser(std::string_view text) : text_(text) {}

    RuleSet run() {
        RuleSet set;
        std::set<std::string> names;
        skip_trivia();
        while (!at_end()) {
            if (peek() == '@') {
                prefix_declaration();
            } else if (peek() == '[') {
                Rule rule = parse_rule();
                if (!names.insert(rule.name).second)
                    fail("duplicate rule name '" + rule.name + "'");
                validate(rule);
                set.rules.push_back(std::move(rule));
            } else {
                fail("expected '[' or '@prefix'");
            }
            skip_trivia();
        }
        return set;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw RuleSyntaxError(line_, message); }

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
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                advance();
            } else if (peek() == '#') {
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

    std::string word() {
        std::string out;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            out += advance();
        return out;
    }

    void prefix_declaration() {
        for (const char* kw = "@prefix"; *kw; ++kw) {
            if (at_end() || peek() != *kw)
                fail("expected '@prefix'");
            advance();
        }
        skip_trivia();
        std::string prefix = word();
        expect(':', "':' after prefix name");
        skip_trivia();
        expect('<', "'<' opening namespace IRI");
        std::string ns;
        while (!at_end() && peek() != '>')
            ns += advance();
        expect('>', "'>' closing namespace IRI");
        skip_trivia();
        expect('.', "'.' after prefix declaration");
        if (!is_absolute_iri(ns))
            fail("namespace IRI is not absolute: <" + ns + ">");
        prefixes_[prefix] = ns;
    }

    Rule parse_rule() {
        expect('[', "'['");
        skip_trivia();
        Rule rule;
        rule.name = word();
        if (rule.name.empty())
            fail("rule name missing");
        skip_trivia();
        expect(':', "':' after rule name");
        skip_trivia();
        // Body atoms until '->'.
        while (true) {
            if (at_end())
                fail("unterminated rule");
            if (peek() == '-') {
                advance();
                expect('>', "'->'");
                break;
            }
            rule.body.push_back(parse_atom());
            skip_trivia();
        }
        skip_trivia();
        while (!at_end() && peek() != ']') {
            Atom atom = parse_atom();
            if (!std::holds_alternative<PatternAtom>(atom))
                fail("rule head must contain only triple patterns");
            rule.head.push_back(std::get<PatternAtom>(atom));
            skip_trivia();
        }
        expect(']', "']' closing rule");
        if (rule.head.empty())
            fail("rule '" + rule.name + "' has an empty head");
        return rule;
    }

    Atom parse_atom() {
        skip_trivia();
        if (peek() == '(')
            return pattern_atom();
        const std::size_t mark = pos_;
        std::string name = word();
        auto op = builtin_ops().find(name);
        if (op == builtin_ops().end()) {
            pos_ = mark;
            fail("expected triple pattern or built-in, found '" + name + "'");
        }
        skip_trivia();
        expect('(', "'(' after built-in name");
        BuiltinAtom builtin;
        builtin.op = op->second;
        while (true) {
            skip_trivia();
            builtin.args.push_back(rule_term(false));
            skip_trivia();
            if (!at_end() && peek() == ',') {
                advance();
                continue;
            }
            break;
        }
        expect(')', "')' closing built-in");
        const std::size_t expected = builtin.op == BuiltinOp::Interval ? 3 : 2;
        if (builtin.args.size() != expected)
            fail(std::string(builtin_name(builtin.op)) + " takes " + std::to_string(expected) + " arguments");
        for (const RuleTerm& arg : builtin.args)
            if (!arg.is_variable && !Decimal::from_term(arg.constant))
                fail("built-in arguments must be variables or numeric literals");
        if (builtin.op == BuiltinOp::Interval && !builtin.args[1].is_variable && !builtin.args[2].is_variable) {
            const auto lo = Decimal::from_term(builtin.args[1].constant);
            const auto hi = Decimal::from_term(builtin.args[2].constant);
            if (lo && hi && *hi < *lo)
                fail("interval bounds are reversed");
        }
        return builtin;
    }

    Atom pattern_atom() {
        expect('(', "'('");
        PatternAtom atom;
        skip_trivia();
        atom.subject = rule_term(true);
        skip_trivia();
        atom.predicate = rule_term(true);
        skip_trivia();
        atom.object = rule_term(true);
        skip_trivia();
        expect(')', "')' closing triple pattern");
        return atom;
    }

    RuleTerm rule_term(bool allow_bare) {
        if (at_end())
            fail("unexpected end of input in term");
        const char c = peek();
        if (c == '?') {
            advance();
            std::string name = word();
            if (name.empty())
                fail("empty variable name");
            return RuleTerm::var(std::move(name));
        }
        if (c == '<') {
            advance();
            std::string iri;
            while (!at_end() && peek() != '>')
                iri += advance();
            expect('>', "'>' closing IRI");
            if (!is_absolute_iri(iri))
                fail("IRI is not absolute: <" + iri + ">");
            return RuleTerm::val(Term::iri(iri));
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
            expect('"', "closing '\"'");
            return RuleTerm::val(Term::literal(lexical));
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                                 peek() == '-' || peek() == '+'))
                num += advance();
            if (!Decimal::parse(num))
                fail("malformed numeric literal '" + num + "'");
            return RuleTerm::val(Term::literal(num, vocab::xsd("decimal")));
        }
        std::string name = word();
        if (name.empty())
            fail("expected term");
        if (!at_end() && peek() == ':') {
            advance();
            std::string local;
            while (!at_end() &&
                   (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
                local += advance();
            auto it = prefixes_.find(name);
            if (it == prefixes_.end())
                fail("undeclared prefix '" + name + ":'");
            return RuleTerm::val(Term::iri(it->second + local));
        }
        if (allow_bare) {
            auto it = bare_predicates().find(name);
            if (it != bare_predicates().end())
                return RuleTerm::val(it->second);
        }
        fail("unknown bare identifier '" + name + "'");
    }

    /// Range restriction for head variables; built-in arguments must be bound
    /// by an earlier body triple pattern.
    void validate(const Rule& rule) const {
        std::set<std::string> bound;
        for (const Atom& atom : rule.body) {
            if (const auto* pattern = std::get_if<PatternAtom>(&atom)) {
                for (const RuleTerm* t : {&pattern->subject, &pattern->predicate, &pattern->object})
                    if (t->is_variable)
                        bound.insert(t->variable);
            } else {
                for (const RuleTerm& arg : std::get<BuiltinAtom>(atom).args)
                    if (arg.is_variable && !bound.count(arg.variable))
                        throw UnsafeRuleError(rule.name, arg.variable);
            }
        }
        for (const PatternAtom& pattern : rule.head)
            for (const RuleTerm* t : {&pattern.subject, &pattern.predicate, &pattern.object})
                if (t->is_variable && !bound.count(t->variable))
                    throw UnsafeRuleError(rule.name, t->variable);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::map<std::string, std::string> prefixes_;
};

using Bindings = std::map<std::string, Term>;

std::optional<Term> resolve(const RuleTerm& t, const Bindings& bindings) {
    if (!t.is_variable)
        return t.constant;
    auto it = bindings.find(t.variable);
    if (it == bindings.end())
        return std::nullopt;
    return it->second;
}

bool bind_pattern(const PatternAtom& pattern, const Triple& triple, Bindings& bindings) {
    auto bind_one = [&](const RuleTerm& slot, const Term& value) {
        if (!slot.is_variable)
            return slot.constant == value;
        auto [it, inserted] = bindings.emplace(slot.variable, value);
        return inserted || it->second == value;
    };
    return bind_one(pattern.subject, triple.subject) && bind_one(pattern.predicate, triple.predicate) &&
           bind_one(pattern.object, triple.object);
}

TriplePattern to_query(const PatternAtom& pattern, const Bindings& bindings) {
    TriplePattern q;
    q.subject = resolve(pattern.subject, bindings);
    q.predicate = resolve(pattern.predicate, bindings);
    q.object = resolve(pattern.object, bindings);
    return q;
}

enum class BuiltinVerdict { True, False, TypeError };

BuiltinVerdict eval_builtin(const BuiltinAtom& builtin, const Bindings& bindings) {
    std::vector<Decimal> values;
    for (const RuleTerm& arg : builtin.args) {
        const auto term = resolve(arg, bindings);
        if (!term)
            return BuiltinVerdict::TypeError; // unreachable for safe rules
        const auto value = Decimal::from_term(*term);
        if (!value)
            return BuiltinVerdict::TypeError;
        values.push_back(*value);
    }
    bool holds = false;
    switch (builtin.op) {
        case BuiltinOp::GreaterThan: holds = values[0] > values[1]; break;
        case BuiltinOp::LessThan: holds = values[0] < values[1]; break;
        case BuiltinOp::Ge: holds = values[0] >= values[1]; break;
        case BuiltinOp::Le: holds = values[0] <= values[1]; break;
        case BuiltinOp::Equal: holds = values[0] == values[1]; break;
        case BuiltinOp::NotEqual: holds = !(values[0] == values[1]); break;
        case BuiltinOp::Interval: holds = values[1] <= values[0] && values[0] <= values[2]; break;
    }
    return holds ? BuiltinVerdict::True : BuiltinVerdict::False;
}

struct RuleEvaluator {
    const Graph& full;
    const std::set<Triple>& delta;
    const Rule& rule;
    std::size_t delta_position; // body pattern index that must match inside delta
    std::vector<Bindings>& matches;
    std::optional<BuiltinOp>& type_error;

    void search(std::size_t atom_index, std::size_t pattern_index, Bindings& bindings) {
        if (atom_index == rule.body.size()) {
            matches.push_back(bindings);
            return;
        }
        const Atom& atom = rule.body[atom_index];
        if (const auto* builtin = std::get_if<BuiltinAtom>(&atom)) {
            switch (eval_builtin(*builtin, bindings)) {
                case BuiltinVerdict::True:
                    search(atom_index + 1, pattern_index, bindings);
                    break;
                case BuiltinVerdict::TypeError:
                    type_error = builtin->op;
                    break;
                case BuiltinVerdict::False:
                    break;
            }
            return;
        }
        const auto& pattern = std::get<PatternAtom>(atom);
        if (pattern_index == delta_position) {
            for (const Triple& t : delta) {
                Bindings next = bindings;
                if (bind_pattern(pattern, t, next))
                    search(atom_index + 1, pattern_index + 1, next);
            }
        } else {
            for (const Triple& t : full.match(to_query(pattern, bindings))) {
                Bindings next = bindings;
                if (bind_pattern(pattern, t, next))
                    search(atom_index + 1, pattern_index + 1, next);
            }
        }
    }
};

std::size_t count_patterns(const Rule& rule) {
    std::size_t n = 0;
    for (const Atom& atom : rule.body)
        if (std::holds_alternative<PatternAtom>(atom))
            ++n;
    return n;
}

std::string binding_key(const Bindings& bindings) {
    std::string key;
    for (const auto& [name, term] : bindings) {
        key += name;
        key += '=';
        key += term.to_ntriples();
        key += ';';
    }
    return key;
}

} // namespace

std::string_view builtin_name(BuiltinOp op) {
    switch (op) {
        case BuiltinOp::GreaterThan: return "greaterThan";
        case BuiltinOp::LessThan: return "lessThan";
        case BuiltinOp::Ge: return "ge";
        case BuiltinOp::Le: return "le";
        case BuiltinOp::Equal: return "equal";
        case BuiltinOp::NotEqual: return "notEqual";
        case BuiltinOp::Interval: return "interval";
    }
    return "equal";
}

RuleSet parse_rules(std::string_view text) {
    return RuleParser(text).run();
}

ReasonResult apply_rules(const Graph& graph, const RuleSet& rules) {
    ReasonResult result;
    result.graph = graph;

    std::set<Triple> delta(graph.triples().begin(), graph.triples().end());
    std::vector<std::set<std::string>> seen_bindings(rules.size());
    std::set<std::string> reported_issues;

    for (std::size_t iteration = 1;; ++iteration) {
        std::set<Triple> next_delta;
        for (std::size_t r = 0; r < rules.rules.size(); ++r) {
            const Rule& rule = rules.rules[r];
            const std::size_t patterns = count_patterns(rule);
            std::vector<Bindings> matches;
            std::optional<BuiltinOp> type_error;

            if (patterns == 0) {
                // Ground body (built-ins only): evaluate once, at iteration 1.
                if (iteration == 1) {
                    RuleEvaluator eval{result.graph, delta, rule, patterns + 1, matches, type_error};
                    Bindings empty;
                    eval.search(0, 0, empty);
                }
            } else {
                // Semi-naive: each match must read the delta at one pattern
                // position; older bindings were produced in earlier passes.
                for (std::size_t dp = 0; dp < patterns; ++dp) {
                    RuleEvaluator eval{result.graph, delta, rule, dp, matches, type_error};
                    Bindings empty;
                    eval.search(0, 0, empty);
                }
            }

            if (type_error && reported_issues.insert(rule.name).second)
                result.issues.push_back(
                    {rule.name, *type_error, "built-in applied to a non-numeric binding"});

            for (Bindings& bindings : matches) {
                if (!seen_bindings[r].insert(binding_key(bindings)).second)
                    continue;
                Derivation d;
                d.rule = rule.name;
                d.bindings = bindings;
                d.iteration = iteration;
                for (const PatternAtom& pattern : rule.head) {
                    Triple t{*resolve(pattern.subject, bindings), *resolve(pattern.predicate, bindings),
                             *resolve(pattern.object, bindings)};
                    if (!result.graph.contains(t))
                        next_delta.insert(t);
                    d.triples.push_back(std::move(t));
                }
                result.derivations.push_back(std::move(d));
            }
        }
        if (next_delta.empty())
            break;
        for (const Triple& t : next_delta)
            result.graph.insert(t);
        delta = std::move(next_delta);
    }
    return result;
}

std::vector<std::string> validate_ruleset_against_taxonomy(const RuleSet& rules, const Taxonomy& taxonomy) {
    std::set<std::string> shape_predicates;
    for (const auto& [name, term] : bare_predicates())
        shape_predicates.insert(term.value());

    auto ns_of = [](const std::string& iri) {
        const auto pos = iri.find_last_of("#/");
        return pos == std::string::npos ? iri : iri.substr(0, pos + 1);
    };
    std::set<std::string> owned(taxonomy.owned_namespaces().begin(), taxonomy.owned_namespaces().end());

    std::set<std::string> report;
    auto check_predicate = [&](const RuleTerm& t) {
        if (t.is_variable || !t.constant.is_iri())
            return;
        const std::string& iri = t.constant.value();
        if (shape_predicates.count(iri) || taxonomy.contains(t.constant))
            return;
        report.insert(iri);
    };
    auto check_class = [&](const RuleTerm& pred, const RuleTerm& obj) {
        if (pred.is_variable || pred.constant != vocab::rdf_type())
            return;
        if (obj.is_variable || !obj.constant.is_iri())
            return;
        // Foreign-namespace classes are domain knowledge, not dictionary terms.
        if (!owned.count(ns_of(obj.constant.value())))
            return;
        if (!taxonomy.contains(obj.constant))
            report.insert(obj.constant.value());
    };
    auto check_pattern = [&](const PatternAtom& p) {
        check_predicate(p.predicate);
        check_class(p.predicate, p.object);
        // Constant IRIs in subject/object positions inside taxonomy-owned
        // namespaces must also resolve.
        for (const RuleTerm* t : {&p.subject, &p.object}) {
            if (t->is_variable || !t->constant.is_iri())
                continue;
            const std::string& iri = t->constant.value();
            if (owned.count(ns_of(iri)) && !taxonomy.contains(t->constant))
                report.insert(iri);
        }
    };
    for (const Rule& rule : rules.rules) {
        for (const Atom& atom : rule.body)
            if (const auto* pattern = std::get_if<PatternAtom>(&atom))
                check_pattern(*pattern);
        for (const PatternAtom& pattern : rule.head)
            check_pattern(pattern);
    }
    return {report.begin(), report.end()};
}

} // namespace m3
