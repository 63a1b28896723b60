#pragma once

// Spam ontology: the persistent knowledge base of spam concepts.

#include "smsctl/preprocess.hpp"

#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace smsctl::spam {

enum class ConceptSource { Seed, Enhancement };

struct SpamConcept {
    std::string keyword;
    std::set<std::string> synonyms;
    std::set<std::string> hypernyms;
    Timestamp added_at = 0;
    ConceptSource source = ConceptSource::Seed;

    friend bool operator==(const SpamConcept&, const SpamConcept&) = default;
};

// Keyword-keyed concept map with a revision counter.
//
// Every mutating call that changes the store bumps the revision by exactly one.
// Keywords withdrawn through user feedback are remembered as suppressed so that
// later enhancement does not re-learn them; an explicit spam correction lifts it.
class SpamOntology {
public:
    const std::map<std::string, SpamConcept>& concepts() const noexcept { return concepts_; }
    const std::set<std::string>& suppressed() const noexcept { return suppressed_; }
    std::uint64_t revision() const noexcept { return revision_; }
    std::size_t size() const noexcept { return concepts_.size(); }
    bool empty() const noexcept { return concepts_.empty(); }

    bool contains(const std::string& keyword) const { return concepts_.count(keyword) != 0; }
    const SpamConcept* find(const std::string& keyword) const;

    struct Change {
        std::set<std::string> lift;              // unsuppress first
        std::vector<SpamConcept> additions;      // skipped when present or suppressed
        std::set<std::string> removals;
        bool suppress_removed = false;
    };

    struct Outcome {
        std::size_t added = 0;
        std::size_t removed = 0;
        std::size_t lifted = 0;
        bool changed() const noexcept { return added || removed || lifted; }
    };

    // One mutating operation: bumps the revision once if anything changed.
    Outcome apply(const Change& change);

    // Adds concepts whose keyword is neither present nor suppressed; existing entries
    // are never overwritten. Returns the number added.
    std::size_t add(std::vector<SpamConcept> batch);

    std::size_t remove(std::set<std::string> keywords, bool suppress);

    friend bool operator==(const SpamOntology&, const SpamOntology&) = default;

private:
    friend SpamOntology load_ontology(std::istream& in);

    std::map<std::string, SpamConcept> concepts_;
    std::set<std::string> suppressed_;
    std::uint64_t revision_ = 0;
};

// Line format: keyword <TAB> syn1,syn2 <TAB> hyp1,hyp2 <TAB> source <TAB> added_at
// Suppressed keywords are stored as records with source "suppressed".
// A "# revision <n>" comment carries the revision counter.
SpamOntology load_ontology(std::istream& in);
void save_ontology(const SpamOntology& ontology, std::ostream& out);

// Missing file yields an empty ontology.
SpamOntology load_ontology_file(const std::string& path);

// Writes to a temporary sibling and renames over the target.
void save_ontology_file(const SpamOntology& ontology, const std::string& path);

std::string to_string(ConceptSource source);

// Readers take consistent snapshots; writers are serialized and publish a new snapshot.
class OntologyStore {
public:
    OntologyStore() : current_(std::make_shared<const SpamOntology>()) {}
    explicit OntologyStore(SpamOntology initial) : current_(std::make_shared<const SpamOntology>(std::move(initial))) {}

    std::shared_ptr<const SpamOntology> snapshot() const
    {
        std::shared_lock lock(mutex_);
        return current_;
    }

    template <typename Fn>
    std::uint64_t update(Fn&& fn)
    {
        std::lock_guard writer(write_mutex_);
        auto next = std::make_shared<SpamOntology>(*snapshot());
        fn(*next);
        std::unique_lock lock(mutex_);
        current_ = std::move(next);
        return current_->revision();
    }

private:
    mutable std::shared_mutex mutex_;
    std::mutex write_mutex_;
    std::shared_ptr<const SpamOntology> current_;
};

} // namespace smsctl::spam
