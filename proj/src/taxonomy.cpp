#include "smsctl/taxonomy.hpp"

#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <limits>

namespace smsctl::taxonomy {

namespace {

constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();

bool valid_lemma(const std::string& lemma)
{
    if (lemma.empty())
        return false;
    return std::none_of(lemma.begin(), lemma.end(), [](unsigned char c) {
        return std::isspace(c) || std::isupper(c);
    });
}

} // namespace

TaxonomyGraph::TaxonomyGraph(std::vector<Synset> synsets)
{
    for (auto& s : synsets) {
        if (s.id.value.empty())
            throw StructuralError("synset with empty id");
        if (s.lemmas.empty())
            throw StructuralError("synset " + s.id.value + " has no lemmas");
        for (const auto& l : s.lemmas) {
            if (!valid_lemma(l))
                throw StructuralError("synset " + s.id.value + " has invalid lemma '" + l + "'");
        }
        const auto id = s.id;
        if (!synsets_.emplace(id, std::move(s)).second)
            throw StructuralError("duplicate synset id " + id.value);
    }

    for (const auto& [id, s] : synsets_) {
        index_.emplace(id, nodes_.size());
        nodes_.push_back(id);
        for (const auto& l : s.lemmas)
            lemma_index_[l].insert(id);
        if (s.hypernym_ids.empty())
            roots_.insert(id);
    }

    parents_.resize(nodes_.size());
    neighbours_.resize(nodes_.size());
    for (const auto& [id, s] : synsets_) {
        const auto child = index_.at(id);
        for (const auto& h : s.hypernym_ids) {
            auto it = index_.find(h);
            if (it == index_.end())
                throw StructuralError("synset " + id.value + " references unknown hypernym " + h.value);
            if (std::find(parents_[child].begin(), parents_[child].end(), it->second) != parents_[child].end())
                continue;
            parents_[child].push_back(it->second);
            neighbours_[child].push_back(it->second);
            neighbours_[it->second].push_back(child);
        }
    }

    // Cycle check: iterative DFS over hypernym edges with three colours.
    std::vector<int> colour(nodes_.size(), 0);
    for (std::size_t start = 0; start < nodes_.size(); ++start) {
        if (colour[start] != 0)
            continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
        colour[start] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            if (next < parents_[node].size()) {
                const auto parent = parents_[node][next++];
                if (colour[parent] == 1)
                    throw StructuralError("hypernym cycle through edge " + nodes_[node].value + " -> " +
                                          nodes_[parent].value);
                if (colour[parent] == 0) {
                    colour[parent] = 1;
                    stack.emplace_back(parent, 0);
                }
            } else {
                colour[node] = 2;
                stack.pop_back();
            }
        }
    }

    // Depth: multi-source BFS from the roots downwards.
    std::vector<std::vector<std::size_t>> children(nodes_.size());
    for (std::size_t c = 0; c < nodes_.size(); ++c)
        for (auto p : parents_[c])
            children[p].push_back(c);
    depth_.assign(nodes_.size(), unvisited);
    std::deque<std::size_t> queue;
    for (const auto& r : roots_) {
        const auto i = index_.at(r);
        depth_[i] = 1;
        queue.push_back(i);
    }
    while (!queue.empty()) {
        const auto n = queue.front();
        queue.pop_front();
        for (auto c : children[n]) {
            if (depth_[c] == unvisited) {
                depth_[c] = depth_[n] + 1;
                queue.push_back(c);
            }
        }
    }
}

std::size_t TaxonomyGraph::edge_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& p : parents_)
        n += p.size();
    return n;
}

bool TaxonomyGraph::contains(const SynsetId& id) const
{
    return index_.count(id) != 0;
}

std::size_t TaxonomyGraph::index_of(const SynsetId& id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw LookupError("unknown synset id " + id.value);
    return it->second;
}

const Synset& TaxonomyGraph::synset(const SynsetId& id) const
{
    auto it = synsets_.find(id);
    if (it == synsets_.end())
        throw LookupError("unknown synset id " + id.value);
    return it->second;
}

std::vector<SynsetId> TaxonomyGraph::synsets_of(std::string_view lemma) const
{
    auto it = lemma_index_.find(std::string(lemma));
    if (it == lemma_index_.end())
        return {};
    return {it->second.begin(), it->second.end()};
}

std::optional<std::size_t> TaxonomyGraph::path_length(const SynsetId& a, const SynsetId& b) const
{
    const auto from = index_of(a);
    const auto to = index_of(b);
    if (from == to)
        return 1;
    std::vector<std::size_t> dist(nodes_.size(), unvisited);
    std::deque<std::size_t> queue{from};
    dist[from] = 1;
    while (!queue.empty()) {
        const auto n = queue.front();
        queue.pop_front();
        for (auto m : neighbours_[n]) {
            if (dist[m] != unvisited)
                continue;
            dist[m] = dist[n] + 1;
            if (m == to)
                return dist[m];
            queue.push_back(m);
        }
    }
    return std::nullopt;
}

std::vector<std::size_t> TaxonomyGraph::ancestor_indices(std::size_t i) const
{
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
        const auto n = stack.back();
        stack.pop_back();
        out.push_back(n);
        for (auto p : parents_[n]) {
            if (!seen[p]) {
                seen[p] = 1;
                stack.push_back(p);
            }
        }
    }
    return out;
}

std::set<SynsetId> TaxonomyGraph::ancestors(const SynsetId& s) const
{
    std::set<SynsetId> out;
    for (auto i : ancestor_indices(index_of(s)))
        out.insert(nodes_[i]);
    return out;
}

std::optional<SynsetId> TaxonomyGraph::lso(const SynsetId& a, const SynsetId& b) const
{
    const auto ia = index_of(a);
    const auto ib = index_of(b);
    if (ia == ib)
        return a;
    std::vector<char> in_a(nodes_.size(), 0);
    for (auto i : ancestor_indices(ia))
        in_a[i] = 1;
    std::optional<std::size_t> best;
    for (auto i : ancestor_indices(ib)) {
        if (!in_a[i])
            continue;
        // nodes_ is id-sorted, so the smaller index is the smaller id.
        if (!best || depth_[i] > depth_[*best] || (depth_[i] == depth_[*best] && i < *best))
            best = i;
    }
    if (!best)
        return std::nullopt;
    return nodes_[*best];
}

std::size_t TaxonomyGraph::depth(const SynsetId& s) const
{
    return depth_[index_of(s)];
}

std::set<std::string> TaxonomyGraph::synonyms(const SynsetId& s) const
{
    return synset(s).lemmas;
}

std::set<std::string> TaxonomyGraph::hypernyms(const SynsetId& s) const
{
    std::set<std::string> out;
    for (const auto& h : synset(s).hypernym_ids) {
        const auto& lemmas = synset(h).lemmas;
        out.insert(lemmas.begin(), lemmas.end());
    }
    return out;
}

TaxonomyGraph load_taxonomy(std::istream& in)
{
    std::vector<Synset> synsets;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (text::trim(line).empty() || line.front() == '#')
            continue;
        auto fields = text::split(line, '\t');
        if (fields.size() < 2 || fields.size() > 4)
            throw ParseError(lineno, "expected 2-4 tab-separated fields, got " + std::to_string(fields.size()));
        Synset s;
        s.id.value = std::string(text::trim(fields[0]));
        if (s.id.value.empty())
            throw ParseError(lineno, "empty synset id");
        if (!seen.insert(s.id.value).second)
            throw ParseError(lineno, "duplicate synset id " + s.id.value);
        for (auto& l : text::split_list(fields[1], ','))
            s.lemmas.insert(l);
        if (s.lemmas.empty())
            throw ParseError(lineno, "synset " + s.id.value + " has no lemmas");
        for (const auto& l : s.lemmas) {
            if (!valid_lemma(l))
                throw ParseError(lineno, "invalid lemma '" + l + "'");
        }
        if (fields.size() > 2) {
            for (auto& h : text::split_list(fields[2], ','))
                s.hypernym_ids.push_back(SynsetId{h});
        }
        if (fields.size() > 3)
            s.gloss = fields[3];
        synsets.push_back(std::move(s));
    }
    return TaxonomyGraph(std::move(synsets));
}

TaxonomyGraph load_taxonomy_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open taxonomy file " + path);
    return load_taxonomy(in);
}

} // namespace smsctl::taxonomy
