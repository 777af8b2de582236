#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "m3/graph.hpp"
#include "m3/term.hpp"

namespace m3 {

struct QuerySlot {
    bool is_variable = false;
    std::string variable;
    Term constant;

    static QuerySlot var(std::string name) { return {true, std::move(name), {}}; }
    static QuerySlot val(Term term) { return {false, {}, std::move(term)}; }
};

struct QueryPattern {
    QuerySlot subject;
    QuerySlot predicate;
    QuerySlot object;
};

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

/// One comparison inside FILTER: a variable against a numeric or IRI constant.
struct Comparison {
    std::string variable;
    CmpOp op = CmpOp::Eq;
    Term constant;
};

/// Boolean combination (&&, ||) of comparisons over a single variable.
struct FilterExpr {
    enum class Kind { Cmp, And, Or };
    Kind kind = Kind::Cmp;
    Comparison cmp;
    std::vector<FilterExpr> children;
};

using WhereElement = std::variant<QueryPattern, FilterExpr>;

struct Query {
    bool select_all = false;
    bool distinct = false;
    std::vector<std::string> select_vars;
    std::vector<WhereElement> where;
    std::optional<std::string> order_by;
    std::optional<std::size_t> limit;
};

/// Variable bindings table. Every row binds every variable; order is the
/// query's deterministic result order.
struct SolutionSet {
    std::vector<std::string> vars;
    std::vector<std::vector<Term>> rows;
    std::size_t filter_type_errors = 0; // rows dropped by non-numeric comparisons
};

/// Parses the documented SELECT subset: basic graph patterns, FILTER with
/// numeric and IRI-equality comparisons, DISTINCT, ORDER BY one variable,
/// LIMIT. Anything else (OPTIONAL, UNION, ...) raises UnsupportedFeature;
/// malformed text raises QuerySyntaxError.
Query parse_query(std::string_view text);

/// Evaluates the query. Rows are exactly the assignments satisfying all
/// patterns and filters; ordered by ORDER BY when given, otherwise by the
/// lexicographic serialization of the selected bindings.
SolutionSet execute(const Query& query, const Graph& graph);

/// CSV rendering: header of variable names, terms in N-Triples syntax.
std::string to_csv(const SolutionSet& solutions);

/// JSON rendering: {"vars": [...], "rows": [[...], ...]}.
std::string to_json(const SolutionSet& solutions);

} // namespace m3
