#pragma once

// Auto reply and scheduled messaging: profile/group driven replies, calendar
// events, birthday greetings and the auto-message report.

#include "smsctl/preprocess.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace smsctl::rules {

struct Group {
    std::string title;
    std::set<std::string> members; // canonical addresses
};

struct Profile {
    std::string title;
    std::string reply_text;
};

using GroupStore = std::map<std::string, Group>;
using ProfileStore = std::map<std::string, Profile>;

inline constexpr const char* default_auto_reply = "I can't answer right now, I will get back to you later.";
inline constexpr const char* default_birthday_wish = "Happy birthday! Have a great day.";

struct AutoReplyState {
    bool enabled = false;
    std::optional<std::string> active_profile;
    std::map<std::string, std::string> group_bindings; // group title -> profile title
    std::string default_reply = default_auto_reply;
    Timestamp reply_window = 10 * 60 * 1000;            // per-sender damping
};

// Throws ConfigError when a binding or the active profile names a missing entry.
void validate(const AutoReplyState& state, const GroupStore& groups, const ProfileStore& profiles);

enum class Recurrence { Once, Yearly };
enum class ReportCause { AutoReply, Event, Birthday };

std::string to_string(ReportCause cause);

struct EventSpec {
    std::string title;
    Timestamp fire_at = 0;
    std::string message;
    std::set<std::string> group_titles;
    std::set<std::string> extra_numbers;
    Recurrence recurrence = Recurrence::Once;
    ReportCause cause = ReportCause::Event;
    std::optional<std::chrono::month_day> anniversary; // Yearly events recur on this day
    bool fired = false;

    friend bool operator==(const EventSpec&, const EventSpec&) = default;
};

using EventStore = std::map<std::string, EventSpec>;

// Throws ValidationError unless fire_at > now and a recipient source is set.
void add_event(EventStore& events, EventSpec spec, Timestamp now);

struct ReportEntry {
    Timestamp at = 0;
    std::string recipient;
    std::string text;
    ReportCause cause = ReportCause::AutoReply;

    friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

// Append-only log of every automatically sent SMS.
class AutoMessageReport {
public:
    void append(ReportEntry e) { entries_.push_back(std::move(e)); }
    const std::vector<ReportEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<ReportEntry> entries_;
};

struct OutgoingSms {
    std::string to;
    std::string body;
    ReportCause cause = ReportCause::AutoReply;
};

struct Contact {
    std::string address;
    std::string name;
    std::optional<std::chrono::month_day> birthday;
};

inline constexpr int birthday_hour = 9;

// Reply for a sender: none when disabled; the bound profile of the sender's group
// (smallest title wins); the active profile; the default reply.
std::optional<std::string> resolve_auto_reply(const std::string& sender, const AutoReplyState& state,
                                              const GroupStore& groups, const ProfileStore& profiles);

// One Yearly birthday event per contact with a birthday, titled "birthday:<address>".
void sync_birthdays(const std::vector<Contact>& contacts, EventStore& events,
                    const std::optional<std::string>& birthday_message, Timestamp now);

// Dispatches every due, unfired event to the union of its recipients.
std::vector<OutgoingSms> tick(Timestamp now, EventStore& events, const GroupStore& groups,
                              AutoMessageReport& report);

// Header plus one "timestamp<TAB>recipient<TAB>cause<TAB>text" line per entry in
// [from, to], sorted by time.
std::string generate_report(const AutoMessageReport& report, Timestamp from, Timestamp to);

// Auto-reply bookkeeping for one device.
struct RulesState {
    AutoReplyState auto_reply;
    GroupStore groups;
    ProfileStore profiles;
    EventStore events;
    std::vector<Contact> contacts;
    std::optional<std::string> birthday_message;
    AutoMessageReport report;
    std::map<std::string, Timestamp> last_reply; // sender -> time of our last auto reply

    // Texts this device sends automatically; incoming copies of them are never answered.
    bool is_own_reply_text(const std::string& body) const;
};

// At most one reply per incoming normal SMS. Spam gets none, neither do our own
// reply texts or a sender answered within the damping window.
std::vector<OutgoingSms> on_incoming(const SmsMessage& msg, bool classified_spam, RulesState& state, Timestamp now);

} // namespace smsctl::rules
