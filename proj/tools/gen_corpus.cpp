// Writes the synthetic experiment corpora:
//   spam-seed-100.tsv  100 known spam messages that seed the ontology
//   corpus-500.tsv     250 spam + 250 ham, shuffled
//
// Spam is composed from spam-domain taxonomy words plus filler noise. The seed
// set uses a small "known" vocabulary; the large corpus mixes it with words the
// seed never saw, so the ontology has something to learn. A handful of neutral
// words (today, phone, ticket, ...) occur in both spam and ham, which is where
// false positives come from.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

using Pool = std::vector<std::string>;

const Pool known_spam = {"free", "prize", "cash", "win", "winner", "claim", "offer", "urgent", "ringtone", "award",
                         "reward", "jackpot", "prizes", "winners", "won"};
const Pool novel_spam = {"loan",   "credit",     "mortgage", "debt",     "voucher",  "coupon",   "discount", "sale",
                         "cheap",  "subscribe",  "download", "investment", "transfer", "percent", "promo",   "deal",
                         "money",  "purchase",   "bonus",    "loans",    "vouchers", "advertising", "subscription"};
const Pool shared = {"today", "tonight", "phone", "mobile", "ticket", "week",  "weekend", "news",
                     "text",  "call",    "visit", "game",   "movie",  "tomorrow", "evening"};
const Pool ham_words = {"dinner", "lunch",  "meeting", "mom",   "dad",  "friend", "home",     "office",  "school",
                        "birthday", "party", "hello",  "reply", "family", "car",  "house",    "work",    "film",
                        "celebration", "meal", "mother", "father", "buddy", "friends", "parties", "meetings"};
const Pool spam_filler = {"now", "guaranteed", "exclusive", "limited", "txt", "stop", "asap", "congratulations",
                          "selected", "valid", "only", "hurry", "apply", "expires"};
const Pool ham_filler = {"lol", "thanks", "see", "soon", "love", "later", "hey", "sure", "yes", "maybe", "late",
                         "coming", "bring", "okay", "remember", "pick"};
const Pool glue = {"you", "your", "the", "to", "for", "a", "is", "at", "with", "and"};

class Composer {
public:
    explicit Composer(std::uint64_t seed) : rng_(seed) {}

    std::size_t uniform(std::size_t lo, std::size_t hi)
    {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    void take(std::vector<std::string>& out, const Pool& pool, std::size_t n)
    {
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(pool[uniform(0, pool.size() - 1)]);
    }

    std::string render(std::vector<std::string> words, bool spam)
    {
        take(words, glue, uniform(1, 3));
        std::shuffle(words.begin(), words.end(), rng_);
        std::string body;
        for (std::size_t i = 0; i < words.size(); ++i) {
            auto w = words[i];
            if (spam && chance(0.15))
                std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            if (i == 0)
                w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
            if (!body.empty())
                body += ' ';
            body += w;
        }
        if (spam && chance(0.5))
            body += " txt 0" + std::to_string(uniform(7000000000, 7999999999));
        body += spam ? "!" : ".";
        return body;
    }

    std::string sender()
    {
        return "+4479" + std::to_string(uniform(10000000, 99999999));
    }

    std::string seed_spam()
    {
        std::vector<std::string> w;
        take(w, known_spam, uniform(1, 3));
        take(w, spam_filler, uniform(0, 2));
        return render(std::move(w), true);
    }

    std::string corpus_spam()
    {
        std::vector<std::string> w;
        if (chance(0.4))
            take(w, known_spam, 1);
        take(w, novel_spam, uniform(1, 3));
        if (chance(0.5))
            take(w, shared, uniform(1, 2));
        take(w, spam_filler, uniform(1, 2));
        return render(std::move(w), true);
    }

    std::string ham()
    {
        std::vector<std::string> w;
        take(w, ham_words, uniform(1, 3));
        if (chance(0.5))
            take(w, shared, uniform(1, 2));
        take(w, ham_filler, uniform(1, 3));
        return render(std::move(w), false);
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Generate the synthetic spam corpora"};
    std::string out_dir = ".";
    std::uint64_t seed = 20130701;
    app.add_option("out_dir", out_dir, "Directory receiving the .tsv files");
    app.add_option("--seed", seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);

    Composer gen(seed);
    std::ofstream seed_out(out_dir + "/spam-seed-100.tsv");
    seed_out << "# label<TAB>sender<TAB>body; generated by gen_corpus --seed " << seed << "\n";
    for (int i = 0; i < 100; ++i)
        seed_out << "spam\t" << gen.sender() << '\t' << gen.seed_spam() << '\n';

    std::vector<std::pair<bool, std::string>> items;
    for (int i = 0; i < 250; ++i)
        items.emplace_back(true, gen.corpus_spam());
    for (int i = 0; i < 250; ++i)
        items.emplace_back(false, gen.ham());
    std::shuffle(items.begin(), items.end(), gen.rng());

    std::ofstream corpus_out(out_dir + "/corpus-500.tsv");
    corpus_out << "# label<TAB>sender<TAB>body; generated by gen_corpus --seed " << seed << "\n";
    for (const auto& [spam, body] : items)
        corpus_out << (spam ? "spam" : "ham") << '\t' << gen.sender() << '\t' << body << '\n';

    if (!seed_out || !corpus_out) {
        std::cerr << "gen_corpus: write failed\n";
        return 1;
    }
    return 0;
}
