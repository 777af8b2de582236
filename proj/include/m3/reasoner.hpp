#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "m3/graph.hpp"
#include "m3/taxonomy.hpp"
#include "m3/term.hpp"

namespace m3 {

/// Variable or constant slot inside a rule atom.
struct RuleTerm {
    bool is_variable = false;
    std::string variable; // without the '?' sigil
    Term constant;

    static RuleTerm var(std::string name) { return {true, std::move(name), {}}; }
    static RuleTerm val(Term term) { return {false, {}, std::move(term)}; }
};

struct PatternAtom {
    RuleTerm subject;
    RuleTerm predicate;
    RuleTerm object;
};

enum class BuiltinOp { GreaterThan, LessThan, Ge, Le, Equal, NotEqual, Interval };

std::string_view builtin_name(BuiltinOp op);

/// Numeric comparison over bound values; Interval takes (arg, lo, hi) and
/// holds when lo <= arg <= hi.
struct BuiltinAtom {
    BuiltinOp op = BuiltinOp::Equal;
    std::vector<RuleTerm> args; // 2, or 3 for Interval
};

using Atom = std::variant<PatternAtom, BuiltinAtom>;

struct Rule {
    std::string name;
    std::vector<Atom> body;
    std::vector<PatternAtom> head;
};

struct RuleSet {
    std::vector<Rule> rules;

    bool empty() const { return rules.empty(); }
    std::size_t size() const { return rules.size(); }
};

/// Parses the bracketed rule format `[name: bodyAtom+ -> headPattern+]` with
/// a leading @prefix block; grammar in docs/formats.md. Enforces name
/// uniqueness, head range-restriction, and built-in binding safety.
/// Throws RuleSyntaxError / UnsafeRuleError.
RuleSet parse_rules(std::string_view text);

/// One logged inference: the rule, the full body binding, the head triples it
/// instantiated, and the fixpoint iteration (1-based) it fired in.
struct Derivation {
    std::string rule;
    std::map<std::string, Term> bindings;
    std::vector<Triple> triples;
    std::size_t iteration = 0;
};

/// A built-in hit a non-numeric binding; the offending rule keeps running on
/// other bindings and the problem is reported once per (rule, builtin).
struct BuiltinIssue {
    std::string rule;
    BuiltinOp op = BuiltinOp::Equal;
    std::string detail;
};

struct ReasonResult {
    Graph graph;
    std::vector<Derivation> derivations;
    std::vector<BuiltinIssue> issues;
};

/// Least fixpoint of the graph under the rules, computed semi-naively (each
/// iteration only joins through the previous iteration's delta). The input
/// graph is untouched; facts derived in an iteration become visible in the
/// next one, so every derivation replays against the graph state at its
/// iteration start.
ReasonResult apply_rules(const Graph& graph, const RuleSet& rules);

/// IRIs referenced by the rules but covered by neither the taxonomy nor the
/// shape vocabulary, per slot: predicates must be known everywhere; class
/// IRIs (objects of rdf:type) must be taxonomy entries when they live in a
/// taxonomy-owned namespace. Empty report means the rules are interoperable.
std::vector<std::string> validate_ruleset_against_taxonomy(const RuleSet& rules, const Taxonomy& taxonomy);

} // namespace m3
