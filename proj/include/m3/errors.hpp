#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace m3 {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input at a known position (1-based line/column).
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& message)
        : Error("line " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

class UnknownPrefixError : public Error {
public:
    UnknownPrefixError(std::string prefix, std::size_t line)
        : Error("line " + std::to_string(line) + ": undeclared prefix '" + prefix + ":'"),
          prefix_(std::move(prefix)), line_(line) {}

    const std::string& prefix() const { return prefix_; }
    std::size_t line() const { return line_; }

private:
    std::string prefix_;
    std::size_t line_;
};

enum class TaxonomyFault {
    DuplicateCanonical,
    CyclicHierarchy,
    DuplicateLabelInScope,
    MissingLabel,
};

class TaxonomyError : public Error {
public:
    TaxonomyError(TaxonomyFault fault, std::vector<std::string> iris, const std::string& detail)
        : Error(detail), fault_(fault), iris_(std::move(iris)) {}

    TaxonomyFault fault() const { return fault_; }
    const std::vector<std::string>& iris() const { return iris_; }

private:
    TaxonomyFault fault_;
    std::vector<std::string> iris_;
};

class UnknownTermError : public Error {
public:
    explicit UnknownTermError(std::string raw)
        : Error("unknown term '" + raw + "'"), raw_(std::move(raw)) {}

    const std::string& raw() const { return raw_; }

private:
    std::string raw_;
};

class AmbiguousTermError : public Error {
public:
    AmbiguousTermError(std::string raw, std::vector<std::string> candidates)
        : Error(describe(raw, candidates)), raw_(std::move(raw)), candidates_(std::move(candidates)) {}

    const std::string& raw() const { return raw_; }
    const std::vector<std::string>& candidates() const { return candidates_; }

private:
    static std::string describe(const std::string& raw, const std::vector<std::string>& candidates) {
        std::string s = "ambiguous term '" + raw + "', candidates:";
        for (const auto& c : candidates) s += " " + c;
        return s;
    }

    std::string raw_;
    std::vector<std::string> candidates_;
};

/// One failed record in a batch operation; batches report all failures at once.
struct RecordIssue {
    std::size_t index;
    std::string reason;
};

class IngestError : public Error {
public:
    explicit IngestError(std::vector<RecordIssue> issues)
        : Error(describe("ingest", issues)), issues_(std::move(issues)) {}

    IngestError(std::size_t index, const std::string& reason)
        : IngestError(std::vector<RecordIssue>{{index, reason}}) {}

    const std::vector<RecordIssue>& issues() const { return issues_; }

    static std::string describe(const std::string& what, const std::vector<RecordIssue>& issues) {
        std::string s = what + " failed for " + std::to_string(issues.size()) + " record(s):";
        for (const auto& i : issues)
            s += "\n  record " + std::to_string(i.index) + ": " + i.reason;
        return s;
    }

private:
    std::vector<RecordIssue> issues_;
};

class AnnotationError : public Error {
public:
    explicit AnnotationError(std::vector<RecordIssue> issues)
        : Error(IngestError::describe("annotation", issues)), issues_(std::move(issues)) {}

    const std::vector<RecordIssue>& issues() const { return issues_; }

private:
    std::vector<RecordIssue> issues_;
};

class RuleSyntaxError : public Error {
public:
    RuleSyntaxError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

    std::size_t line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::string message_;
};

class UnsafeRuleError : public Error {
public:
    UnsafeRuleError(std::string rule, std::string variable)
        : Error("rule '" + rule + "': variable ?" + variable + " is not bound by a body triple pattern"),
          rule_(std::move(rule)), variable_(std::move(variable)) {}

    const std::string& rule() const { return rule_; }
    const std::string& variable() const { return variable_; }

private:
    std::string rule_;
    std::string variable_;
};

class QuerySyntaxError : public Error {
public:
    QuerySyntaxError(std::size_t line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

    std::size_t line() const { return line_; }
    const std::string& message() const { return message_; }

private:
    std::size_t line_;
    std::string message_;
};

class UnsupportedFeatureError : public Error {
public:
    explicit UnsupportedFeatureError(std::string feature)
        : Error("unsupported query feature: " + feature), feature_(std::move(feature)) {}

    const std::string& feature() const { return feature_; }

private:
    std::string feature_;
};

/// One invalid catalog entry; catalog loading aggregates all of them.
struct CatalogIssue {
    std::string id;
    std::string reason;
};

class CatalogError : public Error {
public:
    explicit CatalogError(std::vector<CatalogIssue> issues)
        : Error(describe(issues)), issues_(std::move(issues)) {}

    CatalogError(const std::string& id, const std::string& reason)
        : CatalogError(std::vector<CatalogIssue>{{id, reason}}) {}

    const std::vector<CatalogIssue>& issues() const { return issues_; }

private:
    static std::string describe(const std::vector<CatalogIssue>& issues) {
        std::string s = "catalog has " + std::to_string(issues.size()) + " invalid entr" +
                        (issues.size() == 1 ? "y:" : "ies:");
        for (const auto& i : issues) s += "\n  " + i.id + ": " + i.reason;
        return s;
    }

    std::vector<CatalogIssue> issues_;
};

class TemplateError : public Error {
public:
    TemplateError(std::string id, const std::string& reason)
        : Error("template " + id + ": " + reason), id_(std::move(id)) {}

    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& reason)
        : Error(path + ": " + reason) {}
};

} // namespace m3
