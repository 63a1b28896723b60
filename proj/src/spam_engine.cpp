#include "smsctl/spam_engine.hpp"

#include "smsctl/error.hpp"

#include <limits>
#include <map>
#include <set>
#include <utility>

namespace smsctl::spam {

char to_char(MatchLabel label) noexcept
{
    switch (label) {
    case MatchLabel::O: return 'O';
    case MatchLabel::S: return 'S';
    case MatchLabel::H: return 'H';
    }
    return '?';
}

void EngineConfig::validate() const
{
    if (!(theta > 0.0))
        throw ConfigError("theta must be positive");
    if (h < 1)
        throw ConfigError("h must be at least 1");
    if (weights.original < 0 || weights.synonym < 0 || weights.hypernym < 0)
        throw ConfigError("label weights must be non-negative");
}

std::vector<Concept> disambiguate(const preprocess::KeywordList& keywords, const TaxonomyGraph& graph)
{
    const auto& words = keywords.keywords;
    std::vector<std::vector<SynsetId>> senses;
    senses.reserve(words.size());
    for (const auto& w : words)
        senses.push_back(graph.synsets_of(w));

    const std::size_t penalty = graph.size() + 1;
    std::map<std::pair<SynsetId, SynsetId>, std::size_t> cache;
    auto distance = [&](const SynsetId& a, const SynsetId& b) {
        auto key = a < b ? std::pair{a, b} : std::pair{b, a};
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
        const auto d = graph.path_length(a, b).value_or(penalty);
        cache.emplace(std::move(key), d);
        return d;
    };

    std::vector<Concept> out;
    out.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        Concept c{words[i], std::nullopt, ConceptOrigin::OriginalKeyword};
        std::size_t best_cost = std::numeric_limits<std::size_t>::max();
        for (const auto& s : senses[i]) {
            std::size_t cost = 0;
            for (std::size_t j = 0; j < words.size(); ++j) {
                if (j == i || senses[j].empty())
                    continue;
                std::size_t nearest = std::numeric_limits<std::size_t>::max();
                for (const auto& t : senses[j])
                    nearest = std::min(nearest, distance(s, t));
                cost += nearest;
            }
            // Senses arrive id-sorted, so strict < keeps the smallest id on ties.
            if (cost < best_cost) {
                best_cost = cost;
                c.sense = s;
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Concept> build_concept_set(const std::vector<Concept>& concepts, const TaxonomyGraph& graph,
                                       const EngineConfig& cfg)
{
    std::vector<Concept> out;
    std::set<std::pair<std::string, std::optional<SynsetId>>> seen;
    auto emit = [&](Concept c) {
        if (seen.emplace(c.surface, c.sense).second)
            out.push_back(std::move(c));
    };

    for (const auto& c : concepts)
        emit(c);

    for (std::size_t i = 0; i < concepts.size(); ++i) {
        if (!concepts[i].sense)
            continue;
        for (std::size_t j = i + 1; j < concepts.size(); ++j) {
            if (!concepts[j].sense)
                continue;
            auto l = graph.lso(*concepts[i].sense, *concepts[j].sense);
            if (!l || graph.depth(*l) < cfg.h)
                continue;
            emit(Concept{*graph.synset(*l).lemmas.begin(), *l, ConceptOrigin::LsoNode});
        }
    }
    return out;
}

std::vector<MatchResult> match_concepts(const std::vector<Concept>& cset, const SpamOntology& ontology,
                                        const LabelWeights& weights)
{
    std::vector<MatchResult> out;
    if (ontology.empty())
        return out;
    for (const auto& c : cset) {
        std::optional<std::pair<MatchLabel, const std::string*>> best;
        if (const auto* hit = ontology.find(c.surface)) {
            best = {MatchLabel::O, &hit->keyword};
        } else {
            // Keyword-sorted scan; the first synonym hit beats every hypernym hit.
            for (const auto& [keyword, sc] : ontology.concepts()) {
                if (sc.synonyms.count(c.surface)) {
                    best = {MatchLabel::S, &keyword};
                    break;
                }
                if (!best && sc.hypernyms.count(c.surface))
                    best = {MatchLabel::H, &keyword};
            }
        }
        if (best)
            out.push_back(MatchResult{c, *best->second, best->first, weights.of(best->first)});
    }
    return out;
}

double collective_score(const std::vector<MatchResult>& matches)
{
    double sum = 0.0;
    for (const auto& m : matches)
        sum += m.score;
    return sum;
}

std::vector<Concept> analyze(std::string_view body, const Lexicon& lexicon, const EngineConfig& cfg)
{
    const auto keywords = preprocess::extract_keywords(body, lexicon.stoplist, lexicon.homogeneous);
    return build_concept_set(disambiguate(keywords, lexicon.graph), lexicon.graph, cfg);
}

Verdict classify(const SmsMessage& msg, const Lexicon& lexicon, const SpamOntology& ontology,
                 const preprocess::SpamPrefilterConfig& prefilter, const EngineConfig& cfg)
{
    Verdict v;
    v.observed_at = msg.timestamp;
    if (preprocess::prefilter_sender(msg, prefilter) == preprocess::PrefilterResult::SpamNoAnalysis) {
        v.prefiltered = true;
        v.classification = Classification::Spam;
        return v;
    }
    v.concepts = analyze(msg.body, lexicon, cfg);
    v.matches = match_concepts(v.concepts, ontology, cfg.weights);
    v.collective_score = collective_score(v.matches);
    v.classification = v.collective_score >= cfg.theta ? Classification::Spam : Classification::Legitimate;
    return v;
}

SpamConcept to_spam_concept(const Concept& c, const TaxonomyGraph& graph, Timestamp at, ConceptSource source)
{
    SpamConcept sc;
    sc.keyword = c.surface;
    sc.added_at = at;
    sc.source = source;
    if (c.sense) {
        sc.synonyms = graph.synonyms(*c.sense);
        sc.synonyms.erase(c.surface);
        sc.hypernyms = graph.hypernyms(*c.sense);
    }
    return sc;
}

namespace {

std::vector<SpamConcept> enhancement_batch(const std::vector<Concept>& concepts, const TaxonomyGraph& graph,
                                           Timestamp at)
{
    std::vector<SpamConcept> batch;
    batch.reserve(concepts.size());
    for (const auto& c : concepts)
        batch.push_back(to_spam_concept(c, graph, at, ConceptSource::Enhancement));
    return batch;
}

} // namespace

std::size_t enhance_ontology(SpamOntology& ontology, const Verdict& verdict, const TaxonomyGraph& graph)
{
    if (!verdict.is_spam() || verdict.prefiltered)
        throw ContractError("enhance_ontology requires an analysed spam verdict");
    return ontology.add(enhancement_batch(verdict.concepts, graph, verdict.observed_at));
}

SpamOntology::Outcome apply_feedback(SpamOntology& ontology, const SmsMessage& msg, Correction correction,
                                     const Lexicon& lexicon, const EngineConfig& cfg)
{
    const auto concepts = analyze(msg.body, lexicon, cfg);
    SpamOntology::Change change;
    if (correction == Correction::NotSpam) {
        for (const auto& m : match_concepts(concepts, ontology, cfg.weights)) {
            const auto* sc = ontology.find(m.matched_keyword);
            if (sc && sc->source == ConceptSource::Enhancement)
                change.removals.insert(m.matched_keyword);
        }
        change.suppress_removed = true;
    } else {
        for (const auto& c : concepts)
            change.lift.insert(c.surface);
        change.additions = enhancement_batch(concepts, lexicon.graph, msg.timestamp);
    }
    return ontology.apply(change);
}

SpamEngine::SpamEngine(std::shared_ptr<const Lexicon> lexicon, EngineConfig cfg)
    : lexicon_(std::move(lexicon)), cfg_(cfg)
{
    if (!lexicon_)
        throw ContractError("SpamEngine needs a lexicon");
    cfg_.validate();
}

Verdict SpamEngine::classify(const SmsMessage& msg, const SpamOntology& ontology,
                             const preprocess::SpamPrefilterConfig& prefilter) const
{
    return spam::classify(msg, *lexicon_, ontology, prefilter, cfg_);
}

std::size_t SpamEngine::enhance(SpamOntology& ontology, const Verdict& verdict) const
{
    return enhance_ontology(ontology, verdict, lexicon_->graph);
}

SpamOntology::Outcome SpamEngine::feedback(SpamOntology& ontology, const SmsMessage& msg, Correction correction) const
{
    return apply_feedback(ontology, msg, correction, *lexicon_, cfg_);
}

std::string format_matches(const std::vector<MatchResult>& matches)
{
    if (matches.empty())
        return "-";
    std::string out;
    for (const auto& m : matches) {
        if (!out.empty())
            out += ',';
        out += m.subject.surface;
        out += ':';
        out += to_char(m.label);
        out += ':';
        out += m.matched_keyword;
    }
    return out;
}

} // namespace smsctl::spam
