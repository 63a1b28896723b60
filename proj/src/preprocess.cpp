#include "smsctl/preprocess.hpp"

#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

namespace smsctl {

std::string canonicalize_address(std::string_view address)
{
    std::string out;
    for (char c : text::trim(address)) {
        if (c == '-' || c == ' ' || c == '(' || c == ')')
            continue;
        out += c;
    }
    return out;
}

bool is_weird_address(std::string_view address)
{
    return std::any_of(address.begin(), address.end(), [](char c) {
        return !(std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == ' ' || c == '(' ||
                 c == ')');
    });
}

} // namespace smsctl

namespace smsctl::preprocess {

namespace {

std::set<std::string> canonical_set(const std::set<std::string>& in)
{
    std::set<std::string> out;
    for (const auto& a : in)
        out.insert(canonicalize_address(a));
    return out;
}

} // namespace

void SpamPrefilterConfig::canonicalize()
{
    blacklist = canonical_set(blacklist);
    spam_specific = canonical_set(spam_specific);
    contacts = canonical_set(contacts);
}

PrefilterResult prefilter_sender(const SmsMessage& msg, const SpamPrefilterConfig& cfg)
{
    const auto sender = canonicalize_address(msg.sender);
    if (cfg.blacklist.count(sender) || cfg.spam_specific.count(sender))
        return PrefilterResult::SpamNoAnalysis;
    if (cfg.spam_unknown && !cfg.contacts.count(sender))
        return PrefilterResult::SpamNoAnalysis;
    if (cfg.spam_weird && is_weird_address(msg.sender))
        return PrefilterResult::SpamNoAnalysis;
    return PrefilterResult::PassThrough;
}

std::vector<std::string> tokenize(std::string_view body)
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() &&
            !std::all_of(current.begin(), current.end(), [](unsigned char c) { return std::isdigit(c); }))
            tokens.push_back(current);
        current.clear();
    };
    for (char c : body) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x80 && std::isalnum(u))
            current += static_cast<char>(std::tolower(u));
        else
            flush();
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist)
{
    std::vector<std::string> out;
    std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(out),
                 [&](const std::string& t) { return !stoplist.count(t); });
    return out;
}

std::vector<std::string> normalize_homogeneous(const std::vector<std::string>& tokens, const HomogeneousTable& table)
{
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto it = table.find(t);
        out.push_back(it == table.end() ? t : it->second);
    }
    return out;
}

KeywordList dedupe(const std::vector<std::string>& tokens)
{
    KeywordList out;
    std::unordered_set<std::string> seen;
    for (const auto& t : tokens) {
        if (seen.insert(t).second)
            out.keywords.push_back(t);
    }
    return out;
}

KeywordList extract_keywords(std::string_view body, const Stoplist& stoplist, const HomogeneousTable& table)
{
    return dedupe(normalize_homogeneous(remove_stopwords(tokenize(body), stoplist), table));
}

Stoplist load_stoplist(std::istream& in)
{
    Stoplist out;
    std::string line;
    while (std::getline(in, line)) {
        auto word = text::trim(line);
        if (word.empty() || word.front() == '#')
            continue;
        out.insert(text::to_lower(word));
    }
    return out;
}

Stoplist load_stoplist_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open stopword file " + path);
    return load_stoplist(in);
}

HomogeneousTable load_homogeneous(std::istream& in)
{
    HomogeneousTable out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty() || text::trim(line).front() == '#')
            continue;
        auto fields = text::split(line, '\t');
        if (fields.size() != 2)
            throw ParseError(lineno, "expected form<TAB>canonical");
        auto form = text::to_lower(text::trim(fields[0]));
        auto canonical = text::to_lower(text::trim(fields[1]));
        if (form.empty() || canonical.empty())
            throw ParseError(lineno, "empty form or canonical word");
        out[form] = canonical;
    }
    // Canonical words map to themselves or are absent; chains are collapsed here.
    for (auto& entry : out) {
        auto& canonical = entry.second;
        for (std::size_t hops = 0; hops <= out.size(); ++hops) {
            auto it = out.find(canonical);
            if (it == out.end() || it->second == canonical)
                break;
            canonical = it->second;
        }
    }
    return out;
}

HomogeneousTable load_homogeneous_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open homogeneous table " + path);
    return load_homogeneous(in);
}

const Stoplist& minimal_stoplist()
{
    static const Stoplist words{"is", "the", "on", "and", "in", "with", "for", "by"};
    return words;
}

} // namespace smsctl::preprocess
