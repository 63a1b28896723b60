// Acceptance harness: one PASS/FAIL line per criterion.
// usage: acceptance <fixtures-dir> <smsctl-binary>

#include "../oracles.hpp"

#include "smsctl/chat_protocol.hpp"
#include "smsctl/error.hpp"
#include "smsctl/experiment.hpp"
#include "smsctl/rules_events.hpp"
#include "smsctl/sms_bus.hpp"
#include "smsctl/spam_engine.hpp"
#include "smsctl/text.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace smsctl;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double seed_detection_target = 100.0;
constexpr double seed_detection_tolerance = 0.0;
constexpr double seed_budget_s = 5.0;
constexpr double trend_budget_s = 30.0;
constexpr std::size_t experiment_batches = 5;
constexpr int taxonomy_dags = 200;
constexpr std::size_t taxonomy_max_nodes = 50;
constexpr int disambiguation_messages = 100;
constexpr int scoring_rounds = 10000;
constexpr int chat_scenarios = 50;
constexpr int codec_round_trips = 10000;
constexpr int rules_rounds = 40;

struct Report {
    int failed = 0;

    void line(const std::string& name, bool ok, const std::string& detail)
    {
        std::cout << (ok ? "PASS" : "FAIL") << '\t' << name << '\t' << detail << '\n';
        if (!ok)
            ++failed;
    }
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::shared_ptr<const spam::Lexicon> load_fixture_lexicon(const fs::path& dir)
{
    auto l = std::make_shared<spam::Lexicon>();
    l->graph = taxonomy::load_taxonomy_file((dir / "taxonomy-small.tsv").string());
    l->stoplist = preprocess::load_stoplist_file((dir / "stopwords.txt").string());
    l->homogeneous = preprocess::load_homogeneous_file((dir / "homogeneous.tsv").string());
    return l;
}

std::vector<SmsMessage> spam_of(const std::vector<bus::LabeledSms>& corpus)
{
    std::vector<SmsMessage> out;
    for (const auto& c : corpus)
        if (c.spam)
            out.push_back(c.msg);
    return out;
}

std::vector<std::optional<double>> column(const bus::ExperimentResult& r, bool detection)
{
    std::vector<std::optional<double>> out;
    for (const auto& b : r.batches)
        out.push_back(detection ? b.detection_pct() : b.false_positive_pct());
    return out;
}

std::string pct(const std::optional<double>& v) { return v ? fmt("%.2f", *v) : "n/a"; }

// Seed ontology re-classifying its own corpus.
void seed_self_recognition(Report& rep, const fs::path& dir, const spam::Lexicon& lex)
{
    const auto start = std::chrono::steady_clock::now();
    const auto seed = spam_of(bus::load_corpus_file((dir / "spam-seed-100.tsv").string()));
    spam::EngineConfig cfg;
    cfg.theta = 1.0;
    const auto ontology = bus::build_seed_ontology(seed, lex, cfg);
    std::size_t detected = 0;
    for (const auto& m : seed)
        if (spam::classify(m, lex, ontology, {}, cfg).is_spam())
            ++detected;
    const double elapsed = seconds_since(start);
    const double detection = seed.empty() ? 0.0 : 100.0 * static_cast<double>(detected) / static_cast<double>(seed.size());
    const bool ok = seed.size() == 100 && std::abs(detection - seed_detection_target) <= seed_detection_tolerance &&
                    elapsed < seed_budget_s;
    rep.line("seed-self-recognition", ok,
             std::to_string(detected) + "/" + std::to_string(seed.size()) + " detected, " + fmt("%.3f s", elapsed));
}

// Detection and false-positive trends over consecutive batches.
void experiment_trends(Report& rep, const fs::path& dir, const spam::Lexicon& lex)
{
    spam::EngineConfig cfg;
    const auto corpus = bus::load_corpus_file((dir / "corpus-500.tsv").string());
    const auto seed = bus::build_seed_ontology(spam_of(bus::load_corpus_file((dir / "spam-seed-100.tsv").string())),
                                               lex, cfg);

    auto start = std::chrono::steady_clock::now();
    const auto off = bus::run_spam_experiment(corpus, seed, experiment_batches, false, lex, cfg);
    const double off_s = seconds_since(start);
    start = std::chrono::steady_clock::now();
    const auto on = bus::run_spam_experiment(corpus, seed, experiment_batches, true, lex, cfg);
    const double on_s = seconds_since(start);

    const auto det = column(off, true);
    const double slope = bus::trend_slope(det);
    const bool det_ok = det.front() && det.back() && slope >= 0.0 && *det.back() >= *det.front() && off_s < trend_budget_s;
    std::string series;
    for (const auto& v : det)
        series += (series.empty() ? "" : ",") + pct(v);
    rep.line("detection-trend", det_ok,
             "detection% " + series + " slope " + fmt("%.3f", slope) + ", " + fmt("%.3f s", off_s));

    const auto fp_on = column(on, false);
    const auto fp_off = column(off, false);
    const bool fp_ok = fp_on.front() && fp_on.back() && fp_off.back() && *fp_on.back() <= *fp_on.front() &&
                       *fp_off.back() >= *fp_on.back() && on_s < trend_budget_s;
    std::string on_series, off_series;
    for (std::size_t i = 0; i < fp_on.size(); ++i) {
        on_series += (i ? "," : "") + pct(fp_on[i]);
        off_series += (i ? "," : "") + pct(fp_off[i]);
    }
    rep.line("false-positive-trend", fp_ok, "fp% feedback on " + on_series + "; off " + off_series);
}

void taxonomy_oracle(Report& rep)
{
    std::mt19937_64 rng(20130701);
    std::size_t pairs = 0, mismatches = 0;
    for (int round = 0; round < taxonomy_dags; ++round) {
        const auto synsets = oracle::random_dag(rng, taxonomy_max_nodes);
        const oracle::Reference ref(synsets);
        const taxonomy::TaxonomyGraph g(synsets);
        for (const auto& a : ref.ids) {
            if (g.depth(a) != ref.depth(a))
                ++mismatches;
            for (const auto& b : ref.ids) {
                ++pairs;
                if (g.path_length(a, b) != ref.path_length(a, b) || g.lso(a, b) != ref.lso(a, b))
                    ++mismatches;
            }
        }
    }
    rep.line("taxonomy-oracle", mismatches == 0,
             std::to_string(taxonomy_dags) + " DAGs, " + std::to_string(pairs) + " pairs, " +
                 std::to_string(mismatches) + " mismatches");
}

void disambiguation_oracle(Report& rep)
{
    std::mt19937_64 rng(4242);
    int done = 0, mismatches = 0;
    while (done < disambiguation_messages) {
        const auto synsets = oracle::random_dag(rng, 30, 10);
        const taxonomy::TaxonomyGraph g(synsets);
        const oracle::Reference ref(synsets);
        std::vector<std::string> pool;
        for (const auto& [lemma, ids] : g.lemma_index())
            if (ids.size() <= 4)
                pool.push_back(lemma);
        pool.push_back("unknownword");
        const auto n = 1 + rng() % 5;
        preprocess::KeywordList kw;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& w = pool[rng() % pool.size()];
            if (std::find(kw.keywords.begin(), kw.keywords.end(), w) == kw.keywords.end())
                kw.keywords.push_back(w);
        }
        std::vector<std::vector<taxonomy::SynsetId>> senses;
        for (const auto& w : kw.keywords)
            senses.push_back(g.synsets_of(w));
        const auto expected = oracle::exhaustive_senses(senses, ref, g.size() + 1);
        const auto got = spam::disambiguate(kw, g);
        bool same = got.size() == expected.size();
        for (std::size_t i = 0; same && i < got.size(); ++i)
            same = got[i].sense == expected[i];
        if (!same)
            ++mismatches;
        ++done;
    }
    rep.line("disambiguation-oracle", mismatches == 0,
             std::to_string(done) + " messages, " + std::to_string(mismatches) + " mismatches");
}

void scoring_exactness(Report& rep)
{
    const spam::LabelWeights w;
    const bool weights_ok = w.of(spam::MatchLabel::O) == 1.0 && w.of(spam::MatchLabel::S) == 0.5 &&
                            w.of(spam::MatchLabel::H) == 0.25;
    std::mt19937_64 rng(77);
    int mismatches = 0;
    for (int round = 0; round < scoring_rounds; ++round) {
        std::vector<spam::MatchResult> ms;
        std::uint64_t quarters = 0; // the exact sum, in units of 1/4
        const auto n = rng() % 300;
        for (std::size_t i = 0; i < n; ++i) {
            const auto l = static_cast<spam::MatchLabel>(rng() % 3);
            ms.push_back({{}, "k", l, w.of(l)});
            quarters += l == spam::MatchLabel::O ? 4 : l == spam::MatchLabel::S ? 2 : 1;
        }
        if (spam::collective_score(ms) * 4.0 != static_cast<double>(quarters))
            ++mismatches;
    }
    rep.line("scoring-exactness", weights_ok && mismatches == 0,
             std::string("weights ") + (weights_ok ? "1/0.5/0.25" : "wrong") + ", " +
                 std::to_string(scoring_rounds) + " lists, " + std::to_string(mismatches) + " mismatches");
}

std::string address(std::size_t i) { return "+4477009" + std::to_string(10000 + i); }

// Random chat: one initiator, answers, talk, late invites and leaves, with
// several devices acting at the same instant.
std::string random_chat_scenario(std::mt19937_64& rng)
{
    const std::size_t n = 3 + rng() % 4;
    std::ostringstream s;
    for (std::size_t i = 0; i < n; ++i)
        s << "DEVICE " << address(i) << " p" << i << "\n";
    std::vector<std::size_t> invited, rest;
    for (std::size_t i = 1; i < n; ++i)
        (rng() % 3 ? invited : rest).push_back(i);
    if (invited.empty()) {
        invited.push_back(rest.back());
        rest.pop_back();
    }
    s << "AT 0 CHAT " << address(0) << " START p0";
    for (auto i : invited)
        s << ' ' << address(i);
    s << "\n";
    for (auto i : invited)
        s << "AT 10 USER " << address(i) << (rng() % 5 ? " ACCEPT" : " REJECT") << " *\n";
    std::multimap<Timestamp, std::string> script; // equal times keep insertion order
    int words = 0;
    for (Timestamp t = 20; t <= 120; t += 10) {
        const auto actions = 1 + rng() % 3;
        for (std::size_t k = 0; k < actions; ++k) {
            const auto who = address(rng() % n);
            switch (rng() % 8) {
            case 0:
                if (!rest.empty()) {
                    const auto j = rest.back();
                    rest.pop_back();
                    script.emplace(t, "CHAT " + who + " INVITE * " + address(j));
                    script.emplace(t + 5, "USER " + address(j) + " ACCEPT *");
                }
                break;
            case 1:
                script.emplace(t, "CHAT " + who + " LEAVE *");
                break;
            default:
                script.emplace(t, "CHAT " + who + " SAY * \"w" + std::to_string(words++) + "\"");
                break;
            }
        }
    }
    for (const auto& [t, action] : script)
        s << "AT " << t << ' ' << action << "\n";
    s << "ASSERT CONVERGED\nASSERT CONSERVATION\n";
    return s.str();
}

std::string random_text(std::mt19937_64& rng, std::size_t max_len)
{
    static const std::string alphabet = "abcXYZ019 |,~\\#-\t\xc3\xa9";
    std::string out;
    for (std::size_t i = rng() % (max_len + 1); i > 0; --i)
        out += alphabet[rng() % alphabet.size()];
    return out;
}

std::string random_nick(std::mt19937_64& rng)
{
    std::string out;
    for (std::size_t i = rng() % (chat::max_nick_chars + 1); i > 0; --i)
        out += rng() % 5 == 0 ? std::string("\xc3\xa9") : std::string(1, "ab|,~\\Z9"[rng() % 8]);
    return out;
}

chat::ChatCode random_code(std::mt19937_64& rng)
{
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string s;
    for (std::size_t i = 0; i < chat::ChatCode::length; ++i)
        s += alphabet[rng() % alphabet.size()];
    return chat::ChatCode(s);
}

void chat_convergence(Report& rep, const bus::SimEnvironment& env)
{
    std::mt19937_64 rng(0xC4A7);
    int diverged = 0, sessions = 0;
    std::string first_problem;
    for (int round = 0; round < chat_scenarios; ++round) {
        std::istringstream in(random_chat_scenario(rng));
        const auto result = bus::run_scenario(bus::parse_scenario(in), env, static_cast<std::uint64_t>(round));
        const auto problems = bus::check_convergence(result.devices);
        for (const auto& [addr, d] : result.devices)
            sessions += static_cast<int>(d.chat().session_order().size());
        if (!problems.empty() || !result.passed()) {
            ++diverged;
            if (first_problem.empty())
                first_problem = problems.empty() ? "assertion failed" : problems.front();
        }
    }
    rep.line("chat-convergence", diverged == 0,
             std::to_string(chat_scenarios) + " scenarios, " + std::to_string(sessions) + " sessions, " +
                 std::to_string(diverged) + " diverged" + (first_problem.empty() ? "" : ": " + first_problem));

    const chat::WireKind kinds[] = {chat::WireKind::Invite, chat::WireKind::Accept, chat::WireKind::Reject,
                                    chat::WireKind::Chat, chat::WireKind::MemberUpdate, chat::WireKind::Leave};
    int bad = 0, oversize = 0;
    for (int i = 0; i < codec_round_trips; ++i) {
        chat::WireChatMessage m;
        m.code = random_code(rng);
        m.kind = kinds[rng() % 6];
        m.sender_nick = random_nick(rng);
        m.payload = random_text(rng, 120);
        if (chat::carries_members(m.kind)) {
            std::vector<chat::Member> members(rng() % 5);
            for (auto& mem : members)
                mem = chat::Member{random_text(rng, 12), random_nick(rng)};
            m.members = members;
        }
        std::string body;
        try {
            body = chat::encode(m);
        } catch (const SizeError&) {
            ++oversize; // too long for one SMS: rejected by contract, not a round-trip failure
            continue;
        }
        const auto back = chat::decode(body);
        if (!back || !(*back == m))
            ++bad;
    }
    rep.line("codec-round-trip", bad == 0,
             std::to_string(codec_round_trips - oversize) + " round trips, " + std::to_string(oversize) +
                 " oversize rejected, " + std::to_string(bad) + " mismatches");
}

// Fields of a transcript line after the timestamp.
std::vector<std::string> fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string::npos)
            break;
        start = tab + 1;
    }
    return out;
}

bool is_auto_cause(const std::string& c) { return c == "auto-reply" || c == "event" || c == "birthday"; }

void rules_suite(Report& rep, const bus::SimEnvironment& env)
{
    std::mt19937_64 rng(0x5EED);
    const std::string self = "+447700900001";
    const char* ham[] = {"see you at dinner tonight", "are you home", "call me after school", "nice film"};
    const char* spam[] = {"WIN a free prize now", "claim your jackpot money", "free ringtone reward"};
    int reply_errors = 0, normal = 0, spam_sent = 0, wires = 0, conservation_errors = 0, auto_sent = 0;

    for (int round = 0; round < rules_rounds; ++round) {
        std::ostringstream s;
        s << "CLOCK 2026-03-01T08:00\n";
        s << "DEVICE " << self << " me\n  [autoreply]\n  enabled = true\n";
        s << "  [group g]\n  members = +447700900002\n";
        s << "  [contact +447700900002]\n  birthday = 1970-03-0" << 1 + rng() % 3 << "\n";
        s << "  [event e]\n  at = 2026-03-01T1" << rng() % 6 << ":00\n  groups = g\n  numbers = +447700900003\n"
          << "  message = reminder\n";
        s << "DEVICE +447700900002 two\nDEVICE +447700900003 three\n";
        // Distinct external senders, one message each, so damping never applies.
        std::map<std::string, int> kind_of; // sender -> 0 ham, 1 spam, 2 chat wire
        std::multimap<unsigned, std::string> sends; // minute after 08:00 -> action
        const auto messages = 5 + rng() % 20;
        for (std::size_t i = 0; i < messages; ++i) {
            const auto sender = "+44790" + std::to_string(1000000 + round * 100 + i);
            const int kind = static_cast<int>(rng() % 3);
            kind_of[sender] = kind;
            std::string body;
            if (kind == 0)
                body = ham[rng() % 4];
            else if (kind == 1)
                body = spam[rng() % 3];
            else {
                chat::WireChatMessage w;
                w.code = random_code(rng);
                w.kind = chat::WireKind::Chat;
                w.sender_nick = "x";
                w.payload = "hello there";
                body = chat::encode(w);
            }
            sends.emplace(static_cast<unsigned>(rng() % 600), "SEND " + sender + ' ' + self + ' ' + text::quote(body));
        }
        for (const auto& [minute, action] : sends) {
            char at[32];
            std::snprintf(at, sizeof at, "2026-03-01T%02u:%02u", 8 + minute / 60, minute % 60);
            s << "AT " << at << ' ' << action << "\n";
        }
        // Two ticks at the same instant must not send anything twice.
        s << "AT 2026-03-03T10:00 TICK\nAT 2026-03-03T10:00 TICK\n";
        std::istringstream in(s.str());
        const auto result = bus::run_scenario(bus::parse_scenario(in), env, 1);

        std::map<std::string, int> replies;
        std::vector<std::array<std::string, 3>> sent; // to, cause, body
        for (const auto& line : result.transcript) {
            const auto f = fields(line);
            if (f.size() >= 7 && f[1] == "SEND" && f[3] == self && is_auto_cause(f[5])) {
                sent.push_back({f[4], f[5], text::unquote(f[6])});
                if (f[5] == "auto-reply")
                    ++replies[f[4]];
            }
        }
        for (const auto& [sender, kind] : kind_of) {
            const int got = replies.count(sender) ? replies[sender] : 0;
            if (got != (kind == 0 ? 1 : 0))
                ++reply_errors;
            (kind == 0 ? normal : kind == 1 ? spam_sent : wires)++;
        }
        // Each automatic SEND matches one report entry and vice versa.
        auto entries = result.devices.at(self).rules().report.entries();
        auto_sent += static_cast<int>(sent.size());
        if (entries.size() != sent.size())
            ++conservation_errors;
        for (const auto& [to, cause, body] : sent) {
            auto it = std::find_if(entries.begin(), entries.end(), [&](const rules::ReportEntry& e) {
                return e.recipient == to && rules::to_string(e.cause) == cause && e.text == body;
            });
            if (it == entries.end())
                ++conservation_errors;
            else
                entries.erase(it);
        }
    }

    // Tick idempotence at a fixed clock, directly on the rules layer.
    int tick_errors = 0;
    for (int round = 0; round < rules_rounds; ++round) {
        rules::EventStore events;
        rules::GroupStore groups{{"g", rules::Group{"g", {"+1", "+2"}}}};
        const Timestamp start = 1000;
        const auto count = 1 + rng() % 6;
        for (std::size_t i = 0; i < count; ++i) {
            rules::EventSpec e;
            e.title = "e" + std::to_string(i);
            e.fire_at = start + 1 + static_cast<Timestamp>(rng() % 100000);
            e.message = "m";
            e.group_titles = {"g"};
            e.extra_numbers = {"+2", "+3"};
            rules::add_event(events, e, start);
        }
        rules::AutoMessageReport report;
        const Timestamp now = start + static_cast<Timestamp>(rng() % 120000);
        const auto first = rules::tick(now, events, groups, report);
        const auto size = report.size();
        const auto again = rules::tick(now, events, groups, report);
        if (!again.empty() || report.size() != size || first.size() != size)
            ++tick_errors;
    }

    const bool ok = reply_errors == 0 && conservation_errors == 0 && tick_errors == 0;
    rep.line("rules", ok,
             std::to_string(normal) + " normal, " + std::to_string(spam_sent) + " spam, " + std::to_string(wires) +
                 " chat wires; " + std::to_string(reply_errors) + " reply errors; " + std::to_string(auto_sent) +
                 " auto sends, " + std::to_string(conservation_errors) + " report mismatches; " +
                 std::to_string(tick_errors) + " tick errors");
}

std::string capture(const std::string& command)
{
    std::string out;
    FILE* p = popen(command.c_str(), "r");
    if (!p)
        return out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0)
        out.append(buf.data(), n);
    const int status = pclose(p);
    out += "\nexit " + std::to_string(status);
    return out;
}

void cli_determinism(Report& rep, const fs::path& dir, const std::string& smsctl)
{
    const auto work = fs::temp_directory_path() / ("smsctl-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(work);
    const auto conf = work / "smsctl.conf";
    {
        std::ofstream c(conf);
        c << "taxonomy = " << (dir / "taxonomy-small.tsv").string() << "\n"
          << "stopwords = " << (dir / "stopwords.txt").string() << "\n"
          << "homogeneous = " << (dir / "homogeneous.tsv").string() << "\n"
          << "ontology = " << (work / "ontology.tsv").string() << "\n"
          << "seed_corpus = " << (dir / "spam-seed-100.tsv").string() << "\n"
          << "seed = 7\n";
    }
    const std::string base = "'" + smsctl + "' --config '" + conf.string() + "' ";
    const std::string cmds[] = {
        base + "scenario '" + (dir / "scenarios" / "office-day.scn").string() + "'",
        base + "scenario '" + (dir / "scenarios" / "chat-convergence.scn").string() + "'",
        base + "experiment '" + (dir / "corpus-500.tsv").string() + "' --batches 5 --feedback",
    };
    int differ = 0, empty = 0;
    for (const auto& cmd : cmds) {
        const auto a = capture(cmd);
        const auto b = capture(cmd);
        if (a != b)
            ++differ;
        if (a.size() < 16)
            ++empty;
    }
    fs::remove_all(work);
    rep.line("cli-determinism", differ == 0 && empty == 0,
             "3 commands run twice, " + std::to_string(differ) + " differ, " + std::to_string(empty) + " empty");
}

} // namespace

int main(int argc, char** argv)
{
    if (argc != 3) {
        std::cerr << "usage: acceptance <fixtures-dir> <smsctl>\n";
        return 2;
    }
    const fs::path dir = fs::absolute(argv[1]);
    const std::string smsctl = argv[2];
    Report rep;
    try {
        const auto lexicon = load_fixture_lexicon(dir);
        spam::EngineConfig cfg;
        const auto seed_ontology = bus::build_seed_ontology(
            spam_of(bus::load_corpus_file((dir / "spam-seed-100.tsv").string())), *lexicon, cfg);
        const bus::SimEnvironment env{lexicon, cfg, seed_ontology};

        seed_self_recognition(rep, dir, *lexicon);
        experiment_trends(rep, dir, *lexicon);
        taxonomy_oracle(rep);
        disambiguation_oracle(rep);
        scoring_exactness(rep);
        chat_convergence(rep, env);
        rules_suite(rep, env);
        cli_determinism(rep, dir, smsctl);
    } catch (const std::exception& e) {
        std::cout << "FAIL\tharness\t" << e.what() << '\n';
        return 1;
    }
    std::cout << (rep.failed ? std::to_string(rep.failed) + " criteria failed\n" : "all criteria passed\n");
    return rep.failed ? 1 : 0;
}
