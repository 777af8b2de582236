#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "m3/term.hpp"

namespace m3 {

/// In-memory triple store with set semantics and three access paths (SPO,
/// POS, OSP), so any pattern with bound positions is answered from an index
/// rather than a scan. Intended use is single-writer construction followed by
/// shared read-only access; reads never mutate.
class Graph {
public:
    /// Inserts a triple, returns false when it was already present.
    /// Throws std::invalid_argument on a literal subject or non-IRI predicate.
    bool insert(Triple triple);

    bool contains(const Triple& triple) const;
    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }

    /// All triples matching the pattern, in term order. Uses the index keyed
    /// on the bound positions.
    std::vector<Triple> match(const TriplePattern& pattern) const;

    /// Number of matches without materializing them; used for join planning.
    std::size_t count(const TriplePattern& pattern) const;

    const std::set<Triple>& triples() const { return triples_; }

    void set_prefix(const std::string& prefix, const std::string& ns);
    const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

    /// Distinct blank node labels currently in use.
    const std::set<std::string>& blank_labels() const { return blank_labels_; }

    auto begin() const { return triples_.begin(); }
    auto end() const { return triples_.end(); }

private:
    using TermSet = std::set<Term>;
    using PairIndex = std::map<Term, std::map<Term, TermSet>>;

    std::set<Triple> triples_;
    PairIndex spo_;
    PairIndex pos_;
    PairIndex osp_;
    std::map<std::string, std::string> prefixes_;
    std::set<std::string> blank_labels_;
};

/// Union of both graphs. Source blank nodes are renamed "m<k>_<label>" with
/// the smallest k that collides with nothing in the target, so repeated and
/// nested merges stay deterministic. Target prefixes win conflicts.
Graph merge(const Graph& target, const Graph& source);

} // namespace m3
