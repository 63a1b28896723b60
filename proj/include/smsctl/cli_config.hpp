#pragma once

// Settings shared by the command-line tools: a "key = value" file whose relative
// paths are resolved against the file's own directory.
//
//   taxonomy, stopwords, homogeneous   lexical resources (required)
//   ontology                           spam ontology file (missing file = empty store)
//   device_config                      prefilter settings for classify (optional)
//   seed_corpus                        spam corpus used to seed the ontology (optional)
//   theta, h, weight_o, weight_s, weight_h, seed

#include "smsctl/device_config.hpp"
#include "smsctl/spam_engine.hpp"

#include <cstdint>
#include <istream>
#include <memory>
#include <string>

namespace smsctl {

struct CliConfig {
    std::string taxonomy;
    std::string stopwords;
    std::string homogeneous;
    std::string ontology = "ontology.tsv";
    std::string device_config;
    std::string seed_corpus;
    spam::EngineConfig engine;
    std::uint64_t seed = 1;
};

// Throws ParseError or ConfigError.
CliConfig parse_cli_config(std::istream& in, const std::string& base_dir);
CliConfig load_cli_config(const std::string& path);

// Loads and checks every referenced resource. Throws ConfigError naming the file.
std::shared_ptr<const spam::Lexicon> load_lexicon(const CliConfig& cfg);
DeviceConfig load_classify_device(const CliConfig& cfg);

} // namespace smsctl
