#include "smsctl/chat_protocol.hpp"

#include "smsctl/error.hpp"

#include <algorithm>

namespace smsctl::chat {

namespace {

constexpr std::string_view code_alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
constexpr std::string_view invite_text = "join group chat";

WireChatMessage make_wire(const ChatCode& code, WireKind kind, std::string nick, std::string payload = {},
                          std::optional<std::vector<Member>> members = std::nullopt)
{
    return WireChatMessage{code, kind, std::move(nick), std::move(payload), std::move(members)};
}

} // namespace

std::string_view to_string(SessionState state) noexcept
{
    switch (state) {
    case SessionState::InvitePending: return "pending";
    case SessionState::Active: return "active";
    case SessionState::Closed: return "closed";
    }
    return "?";
}

ChatAgent::ChatAgent(std::string self_address, std::string default_nick, std::uint64_t seed)
    : address_(std::move(self_address)), default_nick_(std::move(default_nick)), rng_(seed)
{
}

ChatCode ChatAgent::generate_code()
{
    while (true) {
        std::string s;
        for (std::size_t i = 0; i < ChatCode::length; ++i)
            s += code_alphabet[rng_() % code_alphabet.size()];
        ChatCode code(std::move(s));
        if (!sessions_.count(code) && issued_.insert(code).second)
            return code;
    }
}

const ChatSession* ChatAgent::session(const ChatCode& code) const
{
    auto it = sessions_.find(code);
    return it == sessions_.end() ? nullptr : &it->second;
}

ChatSession& ChatAgent::session_ref(const ChatCode& code)
{
    auto it = sessions_.find(code);
    if (it == sessions_.end())
        throw StateError("no chat session " + code.str());
    return it->second;
}

std::vector<Member> ChatAgent::roster(const ChatSession& s) const
{
    std::map<std::string, std::string> all = s.members;
    all[address_] = s.self_nick;
    std::vector<Member> out;
    if (auto it = all.find(s.authority); it != all.end()) {
        out.push_back(Member{it->first, it->second});
        all.erase(it);
    }
    for (const auto& [addr, nick] : all)
        out.push_back(Member{addr, nick});
    return out;
}

std::vector<std::string> ChatAgent::take_log()
{
    return std::exchange(log_, {});
}

ChatAgent::Started ChatAgent::start_chat(const std::vector<std::string>& invitees, const std::string& self_nick)
{
    if (invitees.empty())
        throw ContractError("start_chat needs at least one invitee");
    Started out;
    out.code = generate_code();
    ChatSession s;
    s.code = out.code;
    s.self_nick = self_nick.empty() ? default_nick_ : self_nick;
    s.authority = address_;
    sessions_.emplace(out.code, std::move(s));
    order_.push_back(out.code);
    out.wires = invite_more(out.code, invitees);
    return out;
}

std::vector<Outgoing> ChatAgent::invite_more(const ChatCode& code, const std::vector<std::string>& invitees)
{
    auto& s = session_ref(code);
    if (s.state == SessionState::Closed)
        throw StateError("chat " + code.str() + " is closed");
    std::vector<Outgoing> out;
    const auto members = roster(s);
    for (const auto& to : invitees) {
        if (to == address_ || s.members.count(to))
            continue;
        s.pending_invitees.insert(to);
        out.push_back({to, make_wire(code, WireKind::Invite, s.self_nick, std::string(invite_text), members)});
    }
    return out;
}

std::vector<Outgoing> ChatAgent::broadcast_update(const ChatSession& s) const
{
    std::vector<Outgoing> out;
    const auto members = roster(s);
    for (const auto& [addr, nick] : s.members)
        out.push_back({addr, make_wire(s.code, WireKind::MemberUpdate, s.self_nick, {}, members)});
    return out;
}

std::vector<Outgoing> ChatAgent::handle_incoming(const std::string& from, const WireChatMessage& wire,
                                                 std::optional<Decision> decision, Timestamp now)
{
    if (decision && wire.kind != WireKind::Invite)
        throw ContractError("user decision supplied for a non-invite wire");

    auto it = sessions_.find(wire.code);
    switch (wire.kind) {
    case WireKind::Invite: {
        if (it != sessions_.end() && it->second.state != SessionState::Closed) {
            note("ignored invite for joined chat " + wire.code.str());
            return {};
        }
        const bool queued = std::any_of(invites_.begin(), invites_.end(),
                                        [&](const PendingInvite& p) { return p.code == wire.code; });
        if (!queued)
            invites_.push_back(PendingInvite{wire.code, from, wire.members.value_or(std::vector<Member>{}), now});
        if (decision)
            return respond(wire.code, *decision, std::nullopt, now);
        return {};
    }
    case WireKind::Accept:
        return on_accept(from, wire);
    default:
        break;
    }

    if (it == sessions_.end()) {
        note("dropped " + std::string(to_tag(wire.kind)) + " for unknown chat " + wire.code.str() + " from " + from);
        return {};
    }
    auto& s = it->second;
    if (s.state == SessionState::Closed) {
        note("dropped " + std::string(to_tag(wire.kind)) + " for closed chat " + wire.code.str() + " from " + from);
        return {};
    }

    switch (wire.kind) {
    case WireKind::Reject:
        s.pending_invitees.erase(from);
        return {};
    case WireKind::Chat:
        s.transcript.push_back(TranscriptEntry{wire.sender_nick, wire.payload, now, from});
        return {};
    case WireKind::MemberUpdate: {
        const auto& list = *wire.members;
        const bool includes_self = std::any_of(list.begin(), list.end(),
                                               [&](const Member& m) { return m.address == address_; });
        if (list.empty() || !includes_self) {
            note("ignored member update without this device for chat " + wire.code.str());
            return {};
        }
        s.authority = list.front().address;
        s.members.clear();
        for (const auto& m : list) {
            if (m.address == address_)
                continue;
            s.members[m.address] = m.nick;
            s.pending_invitees.erase(m.address);
        }
        s.state = s.members.empty() ? SessionState::InvitePending : SessionState::Active;
        return {};
    }
    case WireKind::Leave:
        return on_leave(from, s);
    default:
        return {};
    }
}

std::vector<Outgoing> ChatAgent::on_accept(const std::string& from, const WireChatMessage& wire)
{
    auto it = sessions_.find(wire.code);
    if (it == sessions_.end()) {
        note("dropped ACC for unknown chat " + wire.code.str() + " from " + from);
        return {};
    }
    auto& s = it->second;
    if (wire.members->empty()) {
        note("dropped ACC without joiner for chat " + wire.code.str());
        return {};
    }
    const auto joiner = wire.members->front();
    s.pending_invitees.erase(joiner.address);

    if (s.state == SessionState::Closed) {
        if (s.successor.empty() || s.successor == address_) {
            note("dropped ACC for closed chat " + wire.code.str());
            return {};
        }
        return {{s.successor, wire}};
    }
    if (s.authority != address_)
        return {{s.authority, wire}};

    if (joiner.address != address_)
        s.members[joiner.address] = joiner.nick;
    if (!s.members.empty())
        s.state = SessionState::Active;
    return broadcast_update(s);
}

std::vector<Outgoing> ChatAgent::on_leave(const std::string& from, ChatSession& s)
{
    s.members.erase(from);
    s.pending_invitees.erase(from);
    bool broadcast = s.authority == address_;
    if (from == s.authority) {
        // Deterministic hand-over: the smallest remaining address takes over.
        std::string next = address_;
        for (const auto& [addr, nick] : s.members)
            next = std::min(next, addr);
        s.authority = next;
        broadcast = next == address_;
    }
    if (s.members.empty())
        s.state = SessionState::InvitePending;
    if (broadcast)
        return broadcast_update(s);
    return {};
}

std::vector<Outgoing> ChatAgent::respond(const ChatCode& code, Decision decision, std::optional<std::string> nick,
                                         Timestamp)
{
    auto it = std::find_if(invites_.begin(), invites_.end(), [&](const PendingInvite& p) { return p.code == code; });
    if (it == invites_.end())
        throw StateError("no pending invitation for chat " + code.str());
    const PendingInvite invite = *it;
    invites_.erase(it);

    const std::string self_nick = nick && !nick->empty() ? *nick : default_nick_;
    if (decision == Decision::Reject)
        return {{invite.inviter, make_wire(code, WireKind::Reject, self_nick)}};

    ChatSession s;
    s.code = code;
    s.self_nick = self_nick;
    s.authority = invite.members.empty() ? invite.inviter : invite.members.front().address;
    for (const auto& m : invite.members)
        if (m.address != address_)
            s.members[m.address] = m.nick;
    if (!s.members.count(invite.inviter))
        s.members[invite.inviter] = "";
    s.state = SessionState::Active;

    auto existing = sessions_.find(code);
    if (existing != sessions_.end()) {
        // Rejoining a chat this device left earlier keeps the old transcript.
        s.transcript = std::move(existing->second.transcript);
        existing->second = std::move(s);
    } else {
        sessions_.emplace(code, std::move(s));
        order_.push_back(code);
    }
    issued_.insert(code);
    return {{invite.inviter, make_wire(code, WireKind::Accept, self_nick, {},
                                       std::vector<Member>{{address_, self_nick}})}};
}

std::vector<Outgoing> ChatAgent::send_chat(const ChatCode& code, const std::string& text, Timestamp now)
{
    auto& s = session_ref(code);
    if (s.state != SessionState::Active)
        throw StateError("chat " + code.str() + " is " + std::string(to_string(s.state)));
    std::vector<Outgoing> out;
    for (const auto& [addr, nick] : s.members)
        out.push_back({addr, make_wire(code, WireKind::Chat, s.self_nick, text)});
    s.transcript.push_back(TranscriptEntry{s.self_nick, text, now, address_});
    return out;
}

std::vector<Outgoing> ChatAgent::leave(const ChatCode& code)
{
    auto& s = session_ref(code);
    if (s.state == SessionState::Closed)
        throw StateError("chat " + code.str() + " already closed");
    std::vector<Outgoing> out;
    for (const auto& [addr, nick] : s.members)
        out.push_back({addr, make_wire(code, WireKind::Leave, s.self_nick)});
    if (s.authority != address_) {
        s.successor = s.authority;
    } else {
        s.successor.clear();
        for (const auto& [addr, nick] : s.members)
            if (s.successor.empty() || addr < s.successor)
                s.successor = addr;
    }
    s.state = SessionState::Closed;
    return out;
}

} // namespace smsctl::chat
