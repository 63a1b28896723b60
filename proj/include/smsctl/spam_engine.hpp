#pragma once

// Content analysis and classification: sense disambiguation, concept sets with
// LSO generalization, O/S/H matching against the spam ontology, collective
// scoring, threshold classification, enhancement and user feedback.

#include "smsctl/ontology.hpp"
#include "smsctl/preprocess.hpp"
#include "smsctl/taxonomy.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace smsctl::spam {

using taxonomy::SynsetId;
using taxonomy::TaxonomyGraph;

enum class ConceptOrigin { OriginalKeyword, LsoNode };

struct Concept {
    std::string surface;
    std::optional<SynsetId> sense; // nullopt: unresolved
    ConceptOrigin origin = ConceptOrigin::OriginalKeyword;

    friend bool operator==(const Concept&, const Concept&) = default;
};

enum class MatchLabel { O, S, H };

struct LabelWeights {
    double original = 1.0;
    double synonym = 0.50;
    double hypernym = 0.25;

    double of(MatchLabel label) const noexcept
    {
        switch (label) {
        case MatchLabel::O: return original;
        case MatchLabel::S: return synonym;
        case MatchLabel::H: return hypernym;
        }
        return 0.0;
    }
};

char to_char(MatchLabel label) noexcept;

struct MatchResult {
    Concept subject;
    std::string matched_keyword;
    MatchLabel label = MatchLabel::O;
    double score = 0.0;
};

enum class Classification { Spam, Legitimate };

struct Verdict {
    Classification classification = Classification::Legitimate;
    double collective_score = 0.0;
    std::vector<MatchResult> matches;
    bool prefiltered = false;
    std::vector<Concept> concepts; // the concept set the matches were drawn from
    Timestamp observed_at = 0;

    bool is_spam() const noexcept { return classification == Classification::Spam; }
};

struct EngineConfig {
    std::size_t h = 3;    // minimum LSO depth admitted into the concept set
    double theta = 1.0;   // spam iff collective score >= theta
    LabelWeights weights;

    // Throws ConfigError when theta <= 0, h < 1 or a weight is negative.
    void validate() const;
};

// Immutable text resources shared by every classification.
struct Lexicon {
    TaxonomyGraph graph;
    preprocess::Stoplist stoplist;
    preprocess::HomogeneousTable homogeneous;
};

std::vector<Concept> disambiguate(const preprocess::KeywordList& keywords, const TaxonomyGraph& graph);

std::vector<Concept> build_concept_set(const std::vector<Concept>& concepts, const TaxonomyGraph& graph,
                                       const EngineConfig& cfg);

std::vector<MatchResult> match_concepts(const std::vector<Concept>& cset, const SpamOntology& ontology,
                                        const LabelWeights& weights = {});

double collective_score(const std::vector<MatchResult>& matches);

// keywords -> concepts -> concept set, without prefiltering.
std::vector<Concept> analyze(std::string_view body, const Lexicon& lexicon, const EngineConfig& cfg);

// Full pipeline. Never mutates the ontology.
Verdict classify(const SmsMessage& msg, const Lexicon& lexicon, const SpamOntology& ontology,
                 const preprocess::SpamPrefilterConfig& prefilter, const EngineConfig& cfg);

// Concept -> SpamConcept with taxonomy-derived synonyms and hypernyms.
SpamConcept to_spam_concept(const Concept& c, const TaxonomyGraph& graph, Timestamp at, ConceptSource source);

// Requires a spam verdict that was not prefiltered (ContractError otherwise).
// Returns the number of concepts added.
std::size_t enhance_ontology(SpamOntology& ontology, const Verdict& verdict, const TaxonomyGraph& graph);

enum class Correction { NotSpam, IsSpam };

// NotSpam removes (and suppresses) the enhancement concepts the message matches;
// seed concepts stay. IsSpam lifts suppression for the message's concepts and
// enhances from them.
SpamOntology::Outcome apply_feedback(SpamOntology& ontology, const SmsMessage& msg, Correction correction,
                                     const Lexicon& lexicon, const EngineConfig& cfg);

// Convenience bundle for callers holding shared resources.
class SpamEngine {
public:
    SpamEngine(std::shared_ptr<const Lexicon> lexicon, EngineConfig cfg);

    Verdict classify(const SmsMessage& msg, const SpamOntology& ontology,
                     const preprocess::SpamPrefilterConfig& prefilter) const;
    std::size_t enhance(SpamOntology& ontology, const Verdict& verdict) const;
    SpamOntology::Outcome feedback(SpamOntology& ontology, const SmsMessage& msg, Correction correction) const;

    const Lexicon& lexicon() const noexcept { return *lexicon_; }
    const EngineConfig& config() const noexcept { return cfg_; }
    std::shared_ptr<const Lexicon> shared_lexicon() const noexcept { return lexicon_; }

private:
    std::shared_ptr<const Lexicon> lexicon_;
    EngineConfig cfg_;
};

// "surface:L:keyword,..." or "-" when empty.
std::string format_matches(const std::vector<MatchResult>& matches);

} // namespace smsctl::spam
