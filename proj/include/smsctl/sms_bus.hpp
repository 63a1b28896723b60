#pragma once

// Deterministic in-process SMS network of virtual devices, each running the
// whole controller: chat decoding, spam classification with learning, folder
// routing and automatic replies. Scenario files drive it; see docs/formats.md.

#include "smsctl/chat_protocol.hpp"
#include "smsctl/device_config.hpp"
#include "smsctl/ontology.hpp"
#include "smsctl/rules_events.hpp"
#include "smsctl/spam_engine.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace smsctl::bus {

using spam::SpamOntology;
using spam::SpamConcept;
using spam::ConceptSource;

// Shared, read-only inputs of a run. Every device starts from its own copy of
// the ontology.
struct SimEnvironment {
    std::shared_ptr<const spam::Lexicon> lexicon;
    spam::EngineConfig engine;
    SpamOntology ontology;
};

struct DeviceSpec {
    std::string address;
    std::string nick;
    DeviceConfig config;
};

struct Action {
    enum class Kind { Send, User, ChatStart, ChatSay, ChatInvite, ChatLeave, Feedback, Tick };

    Kind kind = Kind::Tick;
    Timestamp at = 0;
    std::size_t line = 0;
    std::string source;                  // the script line, for diagnostics
    std::string device;                  // acting device; for Send the sender
    std::string to;                      // Send: recipient
    std::string code;                    // chat code or "*"; Feedback: message id
    std::string text;                    // Send body, chat text, nick
    std::vector<std::string> addresses;  // ChatStart / ChatInvite
    bool accept = true;                  // User: ACCEPT vs REJECT; Feedback: NOTSPAM vs ISSPAM
};

struct Assertion {
    std::size_t line = 0;
    std::string source;
    std::string device;                // empty for CONVERGED / CONSERVATION
    std::string what;                  // INBOX SPAM OUTBOX REPORT SESSIONS PENDING MEMBERS TRANSCRIPT
                                       // ONTOLOGY_HAS ONTOLOGY_LACKS CONVERGED CONSERVATION
    std::string arg;                   // code or keyword
    std::vector<std::string> list;     // MEMBERS
    long long count = 0;
};

struct Scenario {
    Timestamp clock = 0;
    std::vector<DeviceSpec> devices;
    std::vector<Action> script;
    std::vector<Assertion> assertions;
};

// base_dir resolves DEVICE config=<path>. Throws ParseError.
Scenario parse_scenario(std::istream& in, const std::string& base_dir = ".");
Scenario load_scenario_file(const std::string& path);

// Throws ValidationError for references to undeclared devices, duplicate
// devices or timestamps running backwards.
void validate_scenario(const Scenario& scenario);

struct StoredSms {
    std::string id;
    std::string peer; // sender for received messages, recipient for sent ones
    std::string body;
    Timestamp at = 0;
};

class VirtualDevice {
public:
    VirtualDevice(const DeviceSpec& spec, const SimEnvironment& env, std::uint64_t seed);

    const std::string& address() const noexcept { return address_; }
    const std::string& nick() const noexcept { return nick_; }
    const std::vector<StoredSms>& inbox() const noexcept { return inbox_; }
    const std::vector<StoredSms>& spam_folder() const noexcept { return spam_; }
    const std::vector<StoredSms>& chat_wires() const noexcept { return chat_wires_; }
    const std::vector<StoredSms>& outbox() const noexcept { return outbox_; }
    const SpamOntology& ontology() const noexcept { return ontology_; }
    const chat::ChatAgent& chat() const noexcept { return chat_; }
    const rules::RulesState& rules() const noexcept { return rules_; }

private:
    friend class Bus;

    std::string address_;
    std::string nick_;
    bool learn_ = true;
    preprocess::SpamPrefilterConfig prefilter_;
    SpamOntology ontology_;
    chat::ChatAgent chat_;
    rules::RulesState rules_;
    std::vector<StoredSms> inbox_, spam_, chat_wires_, outbox_;
};

struct AssertionResult {
    std::size_t line = 0;
    std::string source;
    bool passed = false;
    std::string detail;
};

struct RunResult {
    std::vector<std::string> transcript;
    std::vector<AssertionResult> assertions;
    std::map<std::string, VirtualDevice> devices;

    bool passed() const;
    // Transcript, assertion lines and a summary line.
    std::string render() const;
};

// Deterministic for a given (scenario, environment, seed).
RunResult run_scenario(const Scenario& scenario, const SimEnvironment& env, std::uint64_t seed);

// Roster of one chat as seen by a device: every member including itself.
std::map<std::string, std::string> full_roster(const VirtualDevice& device, const chat::ChatSession& session);

// Empty when all devices agree; otherwise one line per disagreement. Active
// sessions of one code must share the roster, and every received chat line must
// follow the order in which its sender wrote it.
std::vector<std::string> check_convergence(const std::map<std::string, VirtualDevice>& devices);

} // namespace smsctl::bus
