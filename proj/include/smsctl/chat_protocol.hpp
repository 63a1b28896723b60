#pragma once

// Group chat carried over SMS.
//
// Wire grammar (one SMS body):
//
//   #GSC1|<code>|<KIND>|<nick>|<payload>[|<member-list>]
//
// KIND is one of INV ACC REJ CHT MUP LVE; the member list (address~nick pairs
// joined by ',') is present exactly for INV, ACC and MUP. Inside fields '|', ',',
// '~' and '\' are written as \p, \c, \t and \\. In INV and MUP lists the first
// member is the membership authority of the chat.

#include "smsctl/preprocess.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace smsctl::chat {

class ChatCode {
public:
    static constexpr std::size_t length = 8;

    ChatCode() = default;
    // Throws ParseError unless value is 8 characters of [A-Z0-9].
    explicit ChatCode(std::string value);

    static bool is_valid(std::string_view value) noexcept;

    const std::string& str() const noexcept { return value_; }

    friend auto operator<=>(const ChatCode&, const ChatCode&) = default;

private:
    std::string value_;
};

enum class WireKind { Invite, Accept, Reject, Chat, MemberUpdate, Leave };

std::string_view to_tag(WireKind kind) noexcept;
bool carries_members(WireKind kind) noexcept;

struct Member {
    std::string address;
    std::string nick;

    friend bool operator==(const Member&, const Member&) = default;
};

inline constexpr std::size_t max_nick_chars = 16;
inline constexpr std::string_view wire_prefix = "#GSC1";

struct WireChatMessage {
    ChatCode code;
    WireKind kind = WireKind::Chat;
    std::string sender_nick;
    std::string payload;
    std::optional<std::vector<Member>> members;

    friend bool operator==(const WireChatMessage&, const WireChatMessage&) = default;
};

// Throws ContractError for invariant violations (nick length, member presence)
// and SizeError when the body would exceed one SMS.
std::string encode(const WireChatMessage& msg);

// nullopt: not a chat wire (no prefix or a different protocol version).
// Throws ParseError for a prefixed but malformed body.
std::optional<WireChatMessage> decode(std::string_view body);

std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

enum class SessionState { InvitePending, Active, Closed };
std::string_view to_string(SessionState state) noexcept;

struct TranscriptEntry {
    std::string sender_nick;
    std::string text;
    Timestamp at = 0;
    std::string sender_address;
};

struct ChatSession {
    ChatCode code;
    std::string self_nick;
    std::map<std::string, std::string> members; // remote address -> nick
    SessionState state = SessionState::InvitePending;
    std::vector<TranscriptEntry> transcript;
    std::string authority;                       // address that broadcasts member updates
    std::set<std::string> pending_invitees;
    std::string successor;                       // after leaving: where to relay late accepts
};

struct PendingInvite {
    ChatCode code;
    std::string inviter;
    std::vector<Member> members;
    Timestamp received_at = 0;
};

struct Outgoing {
    std::string to;
    WireChatMessage wire;
};

enum class Decision { Accept, Reject };

// Chat state of one device. All calls are expected from that device's single event loop.
class ChatAgent {
public:
    ChatAgent(std::string self_address, std::string default_nick, std::uint64_t seed);

    struct Started {
        ChatCode code;
        std::vector<Outgoing> wires;
    };

    // New session in InvitePending with one Invite per invitee.
    Started start_chat(const std::vector<std::string>& invitees, const std::string& self_nick);

    std::vector<Outgoing> invite_more(const ChatCode& code, const std::vector<std::string>& invitees);

    // A decision is only meaningful for an Invite (ContractError otherwise).
    // Without one, an Invite is queued for the user.
    std::vector<Outgoing> handle_incoming(const std::string& from, const WireChatMessage& wire,
                                          std::optional<Decision> decision, Timestamp now);

    // Answers a queued invite. Throws StateError when no such invite is pending.
    std::vector<Outgoing> respond(const ChatCode& code, Decision decision, std::optional<std::string> nick,
                                  Timestamp now);

    // Throws StateError unless the session is Active.
    std::vector<Outgoing> send_chat(const ChatCode& code, const std::string& text, Timestamp now);

    std::vector<Outgoing> leave(const ChatCode& code);

    const std::string& address() const noexcept { return address_; }
    const std::string& default_nick() const noexcept { return default_nick_; }
    const std::map<ChatCode, ChatSession>& sessions() const noexcept { return sessions_; }
    const ChatSession* session(const ChatCode& code) const;
    const std::deque<PendingInvite>& pending_invites() const noexcept { return invites_; }

    // Sessions in creation/join order.
    const std::vector<ChatCode>& session_order() const noexcept { return order_; }

    // Full roster including this device, authority first then by address.
    std::vector<Member> roster(const ChatSession& s) const;

    // Diagnostics for dropped or ignored wires; drained by the owner.
    std::vector<std::string> take_log();

    ChatCode generate_code();

private:
    ChatSession& session_ref(const ChatCode& code);
    std::vector<Outgoing> broadcast_update(const ChatSession& s) const;
    std::vector<Outgoing> on_accept(const std::string& from, const WireChatMessage& wire);
    std::vector<Outgoing> on_leave(const std::string& from, ChatSession& s);
    void note(std::string line) { log_.push_back(std::move(line)); }

    std::string address_;
    std::string default_nick_;
    std::mt19937_64 rng_;
    std::set<ChatCode> issued_;
    std::map<ChatCode, ChatSession> sessions_;
    std::vector<ChatCode> order_;
    std::deque<PendingInvite> invites_;
    std::vector<std::string> log_;
};

} // namespace smsctl::chat
