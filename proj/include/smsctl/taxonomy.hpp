#pragma once

// Lexical taxonomy: a hypernym DAG over synsets with a lemma index.
//
// Stands in for WordNet. Loaded from a tab-separated file, one synset per line:
//
//   synset_id <TAB> lemma1,lemma2 <TAB> hypernym_id1,hypernym_id2 <TAB> gloss
//
// An empty hypernym field marks a root. Lines starting with '#' are comments.
// The graph is immutable after construction.

#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace smsctl::taxonomy {

struct SynsetId {
    std::string value;

    friend auto operator<=>(const SynsetId&, const SynsetId&) = default;
};

struct Synset {
    SynsetId id;
    std::set<std::string> lemmas;
    std::vector<SynsetId> hypernym_ids;
    std::string gloss;
};

class TaxonomyGraph {
public:
    TaxonomyGraph() = default;

    // Validates invariants (non-empty lowercase lemmas, no dangling ids, acyclic).
    // Throws StructuralError or ParseError.
    explicit TaxonomyGraph(std::vector<Synset> synsets);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept;
    bool contains(const SynsetId& id) const;

    const Synset& synset(const SynsetId& id) const;
    const std::map<SynsetId, Synset>& synsets() const noexcept { return synsets_; }
    const std::map<std::string, std::set<SynsetId>>& lemma_index() const noexcept { return lemma_index_; }
    const std::set<SynsetId>& root_ids() const noexcept { return roots_; }

    // Senses of a lemma in id order; empty when unknown.
    std::vector<SynsetId> synsets_of(std::string_view lemma) const;

    // Nodes on the shortest undirected hypernym path, endpoints included.
    // nullopt when disconnected.
    std::optional<std::size_t> path_length(const SynsetId& a, const SynsetId& b) const;

    // Deepest common (reflexive) ancestor, ties to the smallest id.
    std::optional<SynsetId> lso(const SynsetId& a, const SynsetId& b) const;

    // Minimum node count from any root to s; roots have depth 1.
    std::size_t depth(const SynsetId& s) const;

    std::set<std::string> synonyms(const SynsetId& s) const;
    std::set<std::string> hypernyms(const SynsetId& s) const;

    // Reflexive ancestor set.
    std::set<SynsetId> ancestors(const SynsetId& s) const;

private:
    std::size_t index_of(const SynsetId& id) const;
    std::vector<std::size_t> ancestor_indices(std::size_t i) const;

    std::map<SynsetId, Synset> synsets_;
    std::map<std::string, std::set<SynsetId>> lemma_index_;
    std::set<SynsetId> roots_;

    // Dense view in id order for traversal.
    std::vector<SynsetId> nodes_;
    std::map<SynsetId, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> neighbours_;
    std::vector<std::size_t> depth_;
};

TaxonomyGraph load_taxonomy(std::istream& in);
TaxonomyGraph load_taxonomy_file(const std::string& path);

} // namespace smsctl::taxonomy
