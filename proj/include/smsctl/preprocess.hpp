#pragma once

// Stage one of the spam pipeline: sender prefilter and keyword extraction.

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace smsctl {

using Timestamp = std::int64_t; // milliseconds since epoch, simulated clock

inline constexpr std::size_t max_sms_body = 4096;

enum class MessageKind { Normal, ChatWire };

struct SmsMessage {
    std::string sender;
    std::string body;
    Timestamp timestamp = 0;
    MessageKind kind = MessageKind::Normal;
};

// Strips '-', ' ', '(' and ')'. A leading '+' survives.
std::string canonicalize_address(std::string_view address);

// Alphanumeric sender ids and anything else outside digits, '+', '-', space and parentheses.
bool is_weird_address(std::string_view address);

} // namespace smsctl

namespace smsctl::preprocess {

struct SpamPrefilterConfig {
    std::set<std::string> blacklist;
    bool spam_unknown = false;
    bool spam_weird = false;
    std::set<std::string> spam_specific;
    std::set<std::string> contacts;

    // Canonicalizes every address in place.
    void canonicalize();
};

enum class PrefilterResult { PassThrough, SpamNoAnalysis };

PrefilterResult prefilter_sender(const SmsMessage& msg, const SpamPrefilterConfig& cfg);

using Stoplist = std::set<std::string>;
using HomogeneousTable = std::map<std::string, std::string>;

struct KeywordList {
    std::vector<std::string> keywords;

    friend bool operator==(const KeywordList&, const KeywordList&) = default;
};

std::vector<std::string> tokenize(std::string_view body);
std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist);
std::vector<std::string> normalize_homogeneous(const std::vector<std::string>& tokens, const HomogeneousTable& table);
KeywordList dedupe(const std::vector<std::string>& tokens);

// tokenize -> remove_stopwords -> normalize_homogeneous -> dedupe
KeywordList extract_keywords(std::string_view body, const Stoplist& stoplist, const HomogeneousTable& table);

// One word per line, '#' comments.
Stoplist load_stoplist(std::istream& in);
Stoplist load_stoplist_file(const std::string& path);

// form<TAB>canonical per line, '#' comments.
HomogeneousTable load_homogeneous(std::istream& in);
HomogeneousTable load_homogeneous_file(const std::string& path);

// The stop words quoted in the original method description; the bundled fixture extends it.
const Stoplist& minimal_stoplist();

} // namespace smsctl::preprocess
