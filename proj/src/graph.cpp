#include "m3/graph.hpp"

#include <stdexcept>

namespace m3 {

bool Graph::insert(Triple triple) {
    if (triple.subject.is_literal())
        throw std::invalid_argument("triple subject must not be a literal");
    if (!triple.predicate.is_iri())
        throw std::invalid_argument("triple predicate must be an IRI");
    auto [it, inserted] = triples_.insert(triple);
    if (!inserted)
        return false;
    spo_[it->subject][it->predicate].insert(it->object);
    pos_[it->predicate][it->object].insert(it->subject);
    osp_[it->object][it->subject].insert(it->predicate);
    if (it->subject.is_blank())
        blank_labels_.insert(it->subject.value());
    if (it->object.is_blank())
        blank_labels_.insert(it->object.value());
    return true;
}

bool Graph::contains(const Triple& triple) const {
    return triples_.count(triple) > 0;
}

namespace {

// Walks one pair index, fixing up the original triple positions via `remap`,
// which converts (first key, second key, set element) back into a Triple.
template <typename Remap>
void collect(const std::map<Term, std::map<Term, std::set<Term>>>& index,
             const std::optional<Term>& first, const std::optional<Term>& second,
             std::vector<m3::Triple>& out, Remap remap) {
    auto scan_inner = [&](const Term& a, const std::map<Term, std::set<Term>>& inner) {
        if (second) {
            auto it = inner.find(*second);
            if (it == inner.end())
                return;
            for (const Term& c : it->second)
                out.push_back(remap(a, *second, c));
        } else {
            for (const auto& [b, terms] : inner)
                for (const Term& c : terms)
                    out.push_back(remap(a, b, c));
        }
    };
    if (first) {
        auto it = index.find(*first);
        if (it != index.end())
            scan_inner(*first, it->second);
    } else {
        for (const auto& [a, inner] : index)
            scan_inner(a, inner);
    }
}

} // namespace

std::vector<Triple> Graph::match(const TriplePattern& p) const {
    std::vector<Triple> out;
    const bool s = p.subject.has_value();
    const bool pr = p.predicate.has_value();
    const bool o = p.object.has_value();

    if (s && pr && o) {
        Triple t{*p.subject, *p.predicate, *p.object};
        if (contains(t))
            out.push_back(std::move(t));
    } else if (s) {
        // SPO serves (s,*,*) and (s,p,*); OSP serves (s,*,o) keyed on object.
        if (o && !pr)
            collect(osp_, p.object, p.subject, out,
                    [](const Term& obj, const Term& sub, const Term& pred) { return Triple{sub, pred, obj}; });
        else
            collect(spo_, p.subject, p.predicate, out,
                    [](const Term& sub, const Term& pred, const Term& obj) { return Triple{sub, pred, obj}; });
    } else if (pr) {
        collect(pos_, p.predicate, p.object, out,
                [](const Term& pred, const Term& obj, const Term& sub) { return Triple{sub, pred, obj}; });
    } else if (o) {
        collect(osp_, p.object, std::nullopt, out,
                [](const Term& obj, const Term& sub, const Term& pred) { return Triple{sub, pred, obj}; });
    } else {
        out.assign(triples_.begin(), triples_.end());
        return out;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Graph::count(const TriplePattern& p) const {
    if (!p.subject && !p.predicate && !p.object)
        return size();
    return match(p).size();
}

void Graph::set_prefix(const std::string& prefix, const std::string& ns) {
    prefixes_[prefix] = ns;
}

Graph merge(const Graph& target, const Graph& source) {
    Graph out = target;
    for (const auto& [prefix, ns] : source.prefixes())
        if (!out.prefixes().count(prefix))
            out.set_prefix(prefix, ns);

    // Pick the smallest rename tag whose labels cannot capture anything
    // already in the target, then rewrite source blanks under it.
    int tag = 1;
    for (;; ++tag) {
        const std::string candidate = "m" + std::to_string(tag) + "_";
        bool clash = false;
        for (const std::string& label : target.blank_labels())
            if (label.rfind(candidate, 0) == 0) {
                clash = true;
                break;
            }
        if (!clash)
            break;
    }
    const std::string stem = "m" + std::to_string(tag) + "_";
    auto rename = [&](const Term& t) {
        return t.is_blank() ? Term::blank(stem + t.value()) : t;
    };
    for (const Triple& t : source)
        out.insert(Triple{rename(t.subject), t.predicate, rename(t.object)});
    return out;
}

} // namespace m3
