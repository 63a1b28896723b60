#pragma once

// Batch experiments over a labelled SMS corpus: seed ontology construction and
// the per-batch detection / false-positive table.

#include "smsctl/ontology.hpp"
#include "smsctl/spam_engine.hpp"

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace smsctl::bus {

using spam::SpamOntology;
using spam::SpamConcept;
using spam::ConceptSource;

struct LabeledSms {
    bool spam = false;
    SmsMessage msg;
};

// Lines "spam|ham<TAB>sender<TAB>body"; '#' comments. Throws ParseError.
std::vector<LabeledSms> load_corpus(std::istream& in);
std::vector<LabeledSms> load_corpus_file(const std::string& path);

// Every resolved concept of every message, as Seed concepts.
SpamOntology build_seed_ontology(const std::vector<SmsMessage>& spam_corpus, const spam::Lexicon& lexicon,
                                 const spam::EngineConfig& cfg);

struct BatchStats {
    std::size_t batch = 0; // 1-based
    std::size_t spam = 0;
    std::size_t ham = 0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;

    std::optional<double> detection_pct() const;
    std::optional<double> false_positive_pct() const;
};

struct ExperimentResult {
    std::vector<BatchStats> batches;
    SpamOntology ontology; // state after the last batch
};

// Splits the corpus into `batches` equal consecutive parts (the last one takes
// the remainder) and classifies them in order. True positives enhance the
// ontology; with feedback, false positives get a NotSpam correction.
// Throws ValidationError for an empty corpus, batches < 2 or an empty batch.
ExperimentResult run_spam_experiment(const std::vector<LabeledSms>& corpus, SpamOntology seed,
                                     std::size_t batches, bool feedback, const spam::Lexicon& lexicon,
                                     const spam::EngineConfig& cfg);

// "batch<TAB>detection_pct<TAB>false_positive_pct" header and rows; "n/a" when undefined.
std::string format_experiment_table(const ExperimentResult& result);

// Least-squares slope of the defined values over their batch numbers (0 when fewer than two).
double trend_slope(const std::vector<std::optional<double>>& values);

} // namespace smsctl::bus
