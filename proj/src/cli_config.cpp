#include "smsctl/cli_config.hpp"

#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

namespace smsctl {

namespace {

double to_double(const std::string& v, const std::string& key, std::size_t line)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size())
            return d;
    } catch (const std::exception&) {
    }
    throw ParseError(line, key + " must be a number");
}

std::uint64_t to_unsigned(const std::string& v, const std::string& key, std::size_t line)
{
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ParseError(line, key + " must be a non-negative integer");
    return out;
}

std::string resolve(const std::string& base_dir, const std::string& p)
{
    if (p.empty())
        return p;
    std::filesystem::path path(p);
    if (path.is_relative())
        path = std::filesystem::path(base_dir) / path;
    return path.lexically_normal().string();
}

} // namespace

CliConfig parse_cli_config(std::istream& in, const std::string& base_dir)
{
    CliConfig cfg;
    cfg.ontology = resolve(base_dir, cfg.ontology);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto s = text::trim(raw);
        if (s.empty() || s.front() == '#')
            continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line, "expected 'key = value'");
        const std::string key(text::trim(s.substr(0, eq)));
        const std::string v(text::trim(s.substr(eq + 1)));
        if (key == "taxonomy")
            cfg.taxonomy = resolve(base_dir, v);
        else if (key == "stopwords")
            cfg.stopwords = resolve(base_dir, v);
        else if (key == "homogeneous")
            cfg.homogeneous = resolve(base_dir, v);
        else if (key == "ontology")
            cfg.ontology = resolve(base_dir, v);
        else if (key == "device_config")
            cfg.device_config = resolve(base_dir, v);
        else if (key == "seed_corpus")
            cfg.seed_corpus = resolve(base_dir, v);
        else if (key == "theta")
            cfg.engine.theta = to_double(v, key, line);
        else if (key == "h")
            cfg.engine.h = static_cast<std::size_t>(to_unsigned(v, key, line));
        else if (key == "weight_o")
            cfg.engine.weights.original = to_double(v, key, line);
        else if (key == "weight_s")
            cfg.engine.weights.synonym = to_double(v, key, line);
        else if (key == "weight_h")
            cfg.engine.weights.hypernym = to_double(v, key, line);
        else if (key == "seed")
            cfg.seed = to_unsigned(v, key, line);
        else
            throw ParseError(line, "unknown key '" + key + "'");
    }
    cfg.engine.validate();
    return cfg;
}

CliConfig load_cli_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config " + path);
    const auto dir = std::filesystem::path(path).parent_path();
    try {
        return parse_cli_config(in, dir.empty() ? std::string(".") : dir.string());
    } catch (const ParseError& e) {
        throw ParseError(0, path + ": " + e.what());
    }
}

std::shared_ptr<const spam::Lexicon> load_lexicon(const CliConfig& cfg)
{
    if (cfg.taxonomy.empty())
        throw ConfigError("config does not name a taxonomy file");
    auto lex = std::make_shared<spam::Lexicon>(spam::Lexicon{taxonomy::load_taxonomy_file(cfg.taxonomy), {}, {}});
    lex->stoplist = cfg.stopwords.empty() ? preprocess::minimal_stoplist() : preprocess::load_stoplist_file(cfg.stopwords);
    if (!cfg.homogeneous.empty())
        lex->homogeneous = preprocess::load_homogeneous_file(cfg.homogeneous);
    return lex;
}

DeviceConfig load_classify_device(const CliConfig& cfg)
{
    if (cfg.device_config.empty())
        return {};
    return load_device_config_file(cfg.device_config);
}

} // namespace smsctl
