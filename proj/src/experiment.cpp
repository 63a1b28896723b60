#include "smsctl/experiment.hpp"

#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <cstdio>
#include <fstream>

namespace smsctl::bus {

std::vector<LabeledSms> load_corpus(std::istream& in)
{
    std::vector<LabeledSms> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        if (text::trim(raw).empty() || raw.front() == '#')
            continue;
        const auto fields = text::split(raw, '\t');
        if (fields.size() != 3)
            throw ParseError(line, "expected label<TAB>sender<TAB>body");
        LabeledSms item;
        if (fields[0] == "spam")
            item.spam = true;
        else if (fields[0] != "ham")
            throw ParseError(line, "label must be spam or ham");
        item.msg.sender = fields[1];
        item.msg.body = fields[2];
        item.msg.timestamp = static_cast<Timestamp>(out.size());
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<LabeledSms> load_corpus_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read corpus " + path);
    try {
        return load_corpus(in);
    } catch (const ParseError& e) {
        throw ParseError(0, path + ": " + e.what());
    }
}

SpamOntology build_seed_ontology(const std::vector<SmsMessage>& spam_corpus, const spam::Lexicon& lexicon,
                                 const spam::EngineConfig& cfg)
{
    std::vector<SpamConcept> batch;
    for (const auto& msg : spam_corpus)
        for (const auto& c : spam::analyze(msg.body, lexicon, cfg))
            if (c.sense)
                batch.push_back(spam::to_spam_concept(c, lexicon.graph, 0, ConceptSource::Seed));
    SpamOntology out;
    out.add(std::move(batch));
    return out;
}

std::optional<double> BatchStats::detection_pct() const
{
    if (spam == 0)
        return std::nullopt;
    return 100.0 * static_cast<double>(true_positives) / static_cast<double>(spam);
}

std::optional<double> BatchStats::false_positive_pct() const
{
    if (ham == 0)
        return std::nullopt;
    return 100.0 * static_cast<double>(false_positives) / static_cast<double>(ham);
}

ExperimentResult run_spam_experiment(const std::vector<LabeledSms>& corpus, SpamOntology seed, std::size_t batches,
                                     bool feedback, const spam::Lexicon& lexicon, const spam::EngineConfig& cfg)
{
    if (corpus.empty())
        throw ValidationError("empty corpus");
    if (batches < 2)
        throw ValidationError("at least two batches are needed");
    const std::size_t per = corpus.size() / batches;
    if (per == 0)
        throw ValidationError("corpus of " + std::to_string(corpus.size()) + " messages cannot fill " +
                              std::to_string(batches) + " batches");

    ExperimentResult result;
    result.ontology = std::move(seed);
    const preprocess::SpamPrefilterConfig no_prefilter;
    for (std::size_t b = 0; b < batches; ++b) {
        BatchStats stats;
        stats.batch = b + 1;
        const std::size_t begin = b * per;
        const std::size_t end = b + 1 == batches ? corpus.size() : begin + per;
        for (std::size_t i = begin; i < end; ++i) {
            const auto& item = corpus[i];
            const auto verdict = spam::classify(item.msg, lexicon, result.ontology, no_prefilter, cfg);
            if (item.spam) {
                ++stats.spam;
                if (verdict.is_spam()) {
                    ++stats.true_positives;
                    spam::enhance_ontology(result.ontology, verdict, lexicon.graph);
                }
            } else {
                ++stats.ham;
                if (verdict.is_spam()) {
                    ++stats.false_positives;
                    if (feedback)
                        spam::apply_feedback(result.ontology, item.msg, spam::Correction::NotSpam, lexicon, cfg);
                }
            }
        }
        result.batches.push_back(stats);
    }
    return result;
}

namespace {

std::string pct(const std::optional<double>& v)
{
    if (!v)
        return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return buf;
}

} // namespace

std::string format_experiment_table(const ExperimentResult& result)
{
    std::string out = "batch\tdetection_pct\tfalse_positive_pct\n";
    for (const auto& b : result.batches)
        out += std::to_string(b.batch) + "\t" + pct(b.detection_pct()) + "\t" + pct(b.false_positive_pct()) + "\n";
    return out;
}

double trend_slope(const std::vector<std::optional<double>>& values)
{
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i])
            continue;
        const double x = static_cast<double>(i + 1);
        const double y = *values[i];
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (n < 2 || denom == 0)
        return 0.0;
    return (n * sxy - sx * sy) / denom;
}

} // namespace smsctl::bus
