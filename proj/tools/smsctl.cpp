// smsctl: classify messages, manage the spam ontology, run experiments and
// simulator scenarios.

#include "smsctl/cli_config.hpp"
#include "smsctl/error.hpp"
#include "smsctl/experiment.hpp"
#include "smsctl/ontology.hpp"
#include "smsctl/sms_bus.hpp"
#include "smsctl/spam_engine.hpp"
#include "smsctl/text.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace smsctl;

struct Common {
    std::string config_path;
    std::optional<double> theta;
    std::optional<std::size_t> h;
    std::optional<std::uint64_t> seed;
};

CliConfig resolve_config(const Common& common)
{
    std::string path = common.config_path;
    if (path.empty())
        if (const char* env = std::getenv("SMS_CONTROLLER_CONFIG"); env && *env)
            path = env;
    if (path.empty() && std::filesystem::exists("smsctl.conf"))
        path = "smsctl.conf";
    if (path.empty())
        throw ConfigError("no config: pass --config or set SMS_CONTROLLER_CONFIG");
    auto cfg = load_cli_config(path);
    if (common.theta)
        cfg.engine.theta = *common.theta;
    if (common.h)
        cfg.engine.h = *common.h;
    if (common.seed)
        cfg.seed = *common.seed;
    cfg.engine.validate();
    return cfg;
}

std::vector<SmsMessage> spam_messages(const std::string& corpus_path)
{
    std::vector<SmsMessage> out;
    for (auto& item : bus::load_corpus_file(corpus_path))
        if (item.spam)
            out.push_back(std::move(item.msg));
    return out;
}

// Read-only commands start from the ontology file; without one, from the seed corpus.
spam::SpamOntology starting_ontology(const CliConfig& cfg, const spam::Lexicon& lexicon)
{
    if (cfg.seed_corpus.empty() || std::filesystem::exists(cfg.ontology))
        return spam::load_ontology_file(cfg.ontology);
    return bus::build_seed_ontology(spam_messages(cfg.seed_corpus), lexicon, cfg.engine);
}

int cmd_classify(const Common& common, const std::string& input)
{
    const auto cfg = resolve_config(common);
    const auto lexicon = load_lexicon(cfg);
    const auto ontology = starting_ontology(cfg, *lexicon);
    const auto device = load_classify_device(cfg);

    std::ifstream file;
    if (input != "-") {
        file.open(input);
        if (!file)
            throw ConfigError("cannot read " + input);
    }
    std::istream& in = input == "-" ? std::cin : file;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const auto tab = raw.find('\t');
        if (tab == std::string::npos) {
            std::cout << "ERROR\tline " << line << ": expected sender<TAB>body\n";
            continue;
        }
        const SmsMessage msg{raw.substr(0, tab), raw.substr(tab + 1), static_cast<Timestamp>(line), MessageKind::Normal};
        if (msg.body.size() > max_sms_body) {
            std::cout << "ERROR\tline " << line << ": body longer than " << max_sms_body << " bytes\n";
            continue;
        }
        const auto v = spam::classify(msg, *lexicon, ontology, device.prefilter, cfg.engine);
        std::cout << (v.is_spam() ? "SPAM" : "HAM") << '\t' << text::format_score(v.collective_score) << '\t'
                  << spam::format_matches(v.matches) << '\n';
    }
    return 0;
}

int cmd_experiment(const Common& common, const std::string& corpus_path, std::size_t batches, bool feedback,
                   const std::string& seed_corpus, bool save)
{
    const auto cfg = resolve_config(common);
    const auto lexicon = load_lexicon(cfg);
    const auto corpus = bus::load_corpus_file(corpus_path);
    const std::string seed_path = seed_corpus.empty() ? cfg.seed_corpus : seed_corpus;
    auto seed = seed_path.empty() ? spam::load_ontology_file(cfg.ontology)
                                  : bus::build_seed_ontology(spam_messages(seed_path), *lexicon, cfg.engine);
    const auto result = bus::run_spam_experiment(corpus, std::move(seed), batches, feedback, *lexicon, cfg.engine);
    std::cout << bus::format_experiment_table(result);
    if (save)
        spam::save_ontology_file(result.ontology, cfg.ontology);
    return 0;
}

int cmd_scenario(const Common& common, const std::string& path)
{
    const auto cfg = resolve_config(common);
    const auto lexicon = load_lexicon(cfg);
    bus::SimEnvironment env{lexicon, cfg.engine, starting_ontology(cfg, *lexicon)};
    const auto scenario = bus::load_scenario_file(path);
    const auto result = bus::run_scenario(scenario, env, cfg.seed);
    std::cout << result.render();
    return result.passed() ? 0 : 1;
}

void print_ontology(const spam::SpamOntology& ontology)
{
    std::cout << "keyword\tsynonyms\thypernyms\tsource\tadded_at\n";
    std::ostringstream body;
    spam::save_ontology(ontology, body);
    std::istringstream lines(body.str());
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty() && line.front() != '#')
            std::cout << line << '\n';
}

int cmd_ontology_show(const Common& common)
{
    const auto cfg = resolve_config(common);
    print_ontology(spam::load_ontology_file(cfg.ontology));
    return 0;
}

int cmd_ontology_seed(const Common& common, const std::string& corpus)
{
    const auto cfg = resolve_config(common);
    const std::string path = corpus.empty() ? cfg.seed_corpus : corpus;
    if (path.empty())
        throw ConfigError("no seed corpus: pass a path or set seed_corpus in the config");
    const auto lexicon = load_lexicon(cfg);
    const auto messages = spam_messages(path);
    if (messages.empty())
        throw ValidationError("seed corpus " + path + " holds no spam messages");
    const auto ontology = bus::build_seed_ontology(messages, *lexicon, cfg.engine);
    spam::save_ontology_file(ontology, cfg.ontology);
    std::cout << "seeded " << ontology.size() << " concepts from " << messages.size() << " messages\n";
    return 0;
}

int cmd_ontology_feedback(const Common& common, const std::string& kind, const std::string& sender,
                          const std::string& body)
{
    const auto cfg = resolve_config(common);
    const auto k = text::to_lower(kind);
    if (k != "notspam" && k != "isspam")
        throw ValidationError("feedback kind must be NOTSPAM or ISSPAM");
    const auto lexicon = load_lexicon(cfg);
    auto ontology = spam::load_ontology_file(cfg.ontology);
    const SmsMessage msg{sender, body, 0, MessageKind::Normal};
    const auto outcome = spam::apply_feedback(
        ontology, msg, k == "notspam" ? spam::Correction::NotSpam : spam::Correction::IsSpam, *lexicon, cfg.engine);
    if (!outcome.changed()) {
        std::cout << "no change\n";
        return 0;
    }
    spam::save_ontology_file(ontology, cfg.ontology);
    std::cout << "added=" << outcome.added << " removed=" << outcome.removed << " lifted=" << outcome.lifted
              << " revision=" << ontology.revision() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SMS controller: spam filtering, group chat and auto messaging"};
    app.require_subcommand(1);
    // "--h" is the generalization depth, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");
    Common common;
    app.add_option("--config", common.config_path, "Config file (default: $SMS_CONTROLLER_CONFIG, then ./smsctl.conf)");
    app.add_option("--theta", common.theta, "Spam threshold on the collective score");
    app.add_option("--h", common.h, "Minimum depth of an admitted generalization");
    app.add_option("--seed", common.seed, "Seed for chat codes");

    std::string input = "-";
    auto* classify = app.add_subcommand("classify", "Classify sender<TAB>body lines");
    classify->add_option("input", input, "Input file, '-' for standard input");

    std::string corpus, seed_corpus;
    std::size_t batches = 5;
    bool feedback = false, save = false;
    auto* experiment = app.add_subcommand("experiment", "Per-batch detection and false-positive table");
    experiment->add_option("corpus", corpus, "Labelled corpus (label<TAB>sender<TAB>body)")->required();
    experiment->add_option("--batches", batches, "Number of batches")->capture_default_str();
    experiment->add_flag("--feedback,!--no-feedback", feedback, "Correct false positives with NotSpam feedback");
    experiment->add_option("--seed-corpus", seed_corpus, "Build the starting ontology from this spam corpus");
    experiment->add_flag("--save", save, "Write the final ontology to the ontology file");

    std::string scenario_path;
    auto* scenario = app.add_subcommand("scenario", "Run a simulator scenario");
    scenario->add_option("path", scenario_path, "Scenario file")->required();

    auto* ontology = app.add_subcommand("ontology", "Inspect or change the spam ontology");
    ontology->require_subcommand(1);
    auto* show = ontology->add_subcommand("show", "Print the ontology sorted by keyword");
    std::string seed_path;
    auto* seed = ontology->add_subcommand("seed", "Rebuild the ontology from a spam corpus");
    seed->add_option("corpus", seed_path, "Corpus file (default: seed_corpus from the config)");
    std::string fb_kind, fb_sender, fb_body;
    auto* fb = ontology->add_subcommand("feedback", "Apply a user correction for one message");
    fb->add_option("kind", fb_kind, "NOTSPAM or ISSPAM")->required();
    fb->add_option("sender", fb_sender, "Sender address")->required();
    fb->add_option("body", fb_body, "Message body")->required();

    for (auto* sub : {classify, experiment, scenario, ontology})
        sub->fallthrough();
    for (auto* sub : {show, seed, fb})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify)
            return cmd_classify(common, input);
        if (*experiment)
            return cmd_experiment(common, corpus, batches, feedback, seed_corpus, save);
        if (*scenario)
            return cmd_scenario(common, scenario_path);
        if (*show)
            return cmd_ontology_show(common);
        if (*seed)
            return cmd_ontology_seed(common, seed_path);
        if (*fb)
            return cmd_ontology_feedback(common, fb_kind, fb_sender, fb_body);
    } catch (const std::exception& e) {
        std::cerr << "smsctl: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
