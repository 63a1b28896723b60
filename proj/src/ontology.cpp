#include "smsctl/ontology.hpp"

#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace smsctl::spam {

namespace {

constexpr const char* revision_tag = "# revision ";

std::set<std::string> parse_word_set(const std::string& field)
{
    std::set<std::string> out;
    for (auto& w : text::split_list(field, ','))
        out.insert(text::to_lower(w));
    return out;
}

std::string join_set(const std::set<std::string>& words)
{
    return text::join(std::vector<std::string>(words.begin(), words.end()), ",");
}

void normalize(SpamConcept& c)
{
    c.synonyms.erase(c.keyword);
}

} // namespace

std::string to_string(ConceptSource source)
{
    return source == ConceptSource::Seed ? "seed" : "enhancement";
}

const SpamConcept* SpamOntology::find(const std::string& keyword) const
{
    auto it = concepts_.find(keyword);
    return it == concepts_.end() ? nullptr : &it->second;
}

SpamOntology::Outcome SpamOntology::apply(const Change& change)
{
    Outcome out;
    for (const auto& k : change.lift)
        out.lifted += suppressed_.erase(k);
    for (auto c : change.additions) {
        if (c.keyword.empty() || concepts_.count(c.keyword) || suppressed_.count(c.keyword))
            continue;
        normalize(c);
        auto key = c.keyword;
        concepts_.emplace(std::move(key), std::move(c));
        ++out.added;
    }
    for (const auto& k : change.removals) {
        if (concepts_.erase(k)) {
            ++out.removed;
            if (change.suppress_removed)
                suppressed_.insert(k);
        }
    }
    if (out.changed())
        ++revision_;
    return out;
}

std::size_t SpamOntology::add(std::vector<SpamConcept> batch)
{
    Change change;
    change.additions = std::move(batch);
    return apply(change).added;
}

std::size_t SpamOntology::remove(std::set<std::string> keywords, bool suppress)
{
    Change change;
    change.removals = std::move(keywords);
    change.suppress_removed = suppress;
    return apply(change).removed;
}

SpamOntology load_ontology(std::istream& in)
{
    SpamOntology onto;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (text::starts_with(line, revision_tag)) {
            const auto digits = line.substr(std::char_traits<char>::length(revision_tag));
            auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), onto.revision_);
            if (ec != std::errc{})
                throw ParseError(lineno, "bad revision comment");
            continue;
        }
        if (text::trim(line).empty() || line.front() == '#')
            continue;
        auto fields = text::split(line, '\t');
        if (fields.size() != 5)
            throw ParseError(lineno, "expected 5 tab-separated fields");
        const auto keyword = text::to_lower(text::trim(fields[0]));
        if (keyword.empty())
            throw ParseError(lineno, "empty keyword");
        const auto source = text::trim(fields[3]);
        if (source == "suppressed") {
            onto.suppressed_.insert(keyword);
            continue;
        }
        SpamConcept c;
        c.keyword = keyword;
        c.synonyms = parse_word_set(fields[1]);
        c.hypernyms = parse_word_set(fields[2]);
        if (source == "seed")
            c.source = ConceptSource::Seed;
        else if (source == "enhancement")
            c.source = ConceptSource::Enhancement;
        else
            throw ParseError(lineno, "unknown source '" + std::string(source) + "'");
        const auto ts = text::trim(fields[4]);
        auto [p, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), c.added_at);
        if (ec != std::errc{} || p != ts.data() + ts.size())
            throw ParseError(lineno, "bad added_at timestamp");
        normalize(c);
        if (!onto.concepts_.emplace(keyword, std::move(c)).second)
            throw ParseError(lineno, "duplicate keyword '" + keyword + "'");
    }
    return onto;
}

void save_ontology(const SpamOntology& ontology, std::ostream& out)
{
    out << "# keyword\tsynonyms\thypernyms\tsource\tadded_at\n";
    out << revision_tag << ontology.revision() << '\n';
    for (const auto& [k, c] : ontology.concepts()) {
        out << k << '\t' << join_set(c.synonyms) << '\t' << join_set(c.hypernyms) << '\t' << to_string(c.source)
            << '\t' << c.added_at << '\n';
    }
    for (const auto& k : ontology.suppressed())
        out << k << "\t\t\tsuppressed\t0\n";
}

SpamOntology load_ontology_file(const std::string& path)
{
    if (!std::filesystem::exists(path))
        return {};
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open ontology file " + path);
    return load_ontology(in);
}

void save_ontology_file(const SpamOntology& ontology, const std::string& path)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out)
            throw ConfigError("cannot write " + tmp);
        save_ontology(ontology, out);
        out.flush();
        if (!out)
            throw ConfigError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace smsctl::spam
