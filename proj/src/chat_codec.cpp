#include "smsctl/chat_protocol.hpp"

#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <algorithm>
#include <array>

namespace smsctl::chat {

namespace {

struct KindTag {
    WireKind kind;
    std::string_view tag;
};

constexpr std::array<KindTag, 6> kind_tags{{
    {WireKind::Invite, "INV"},
    {WireKind::Accept, "ACC"},
    {WireKind::Reject, "REJ"},
    {WireKind::Chat, "CHT"},
    {WireKind::MemberUpdate, "MUP"},
    {WireKind::Leave, "LVE"},
}};

std::size_t utf8_length(std::string_view s)
{
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

} // namespace

ChatCode::ChatCode(std::string value) : value_(std::move(value))
{
    if (!is_valid(value_))
        throw ParseError(0, "invalid chat code '" + value_ + "'");
}

bool ChatCode::is_valid(std::string_view value) noexcept
{
    return value.size() == length && std::all_of(value.begin(), value.end(), [](char c) {
               return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
           });
}

std::string_view to_tag(WireKind kind) noexcept
{
    for (const auto& k : kind_tags)
        if (k.kind == kind)
            return k.tag;
    return "???";
}

bool carries_members(WireKind kind) noexcept
{
    return kind == WireKind::Invite || kind == WireKind::Accept || kind == WireKind::MemberUpdate;
}

std::string escape_field(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '|': out += "\\p"; break;
        case ',': out += "\\c"; break;
        case '~': out += "\\t"; break;
        default: out += c; break;
        }
    }
    return out;
}

std::string unescape_field(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i == s.size())
            throw ParseError(0, "dangling escape");
        switch (s[i]) {
        case '\\': out += '\\'; break;
        case 'p': out += '|'; break;
        case 'c': out += ','; break;
        case 't': out += '~'; break;
        default: throw ParseError(0, std::string("unknown escape \\") + s[i]);
        }
    }
    return out;
}

std::string encode(const WireChatMessage& msg)
{
    if (!ChatCode::is_valid(msg.code.str()))
        throw ContractError("wire has no valid chat code");
    if (utf8_length(msg.sender_nick) > max_nick_chars)
        throw ContractError("nick longer than 16 characters");
    if (carries_members(msg.kind) != msg.members.has_value())
        throw ContractError("member list presence does not match kind " + std::string(to_tag(msg.kind)));

    std::string out(wire_prefix);
    out += '|';
    out += msg.code.str();
    out += '|';
    out += to_tag(msg.kind);
    out += '|';
    out += escape_field(msg.sender_nick);
    out += '|';
    out += escape_field(msg.payload);
    if (msg.members) {
        out += '|';
        bool first = true;
        for (const auto& m : *msg.members) {
            if (!first)
                out += ',';
            first = false;
            out += escape_field(m.address);
            out += '~';
            out += escape_field(m.nick);
        }
    }
    if (out.size() > max_sms_body)
        throw SizeError("encoded chat wire is " + std::to_string(out.size()) + " bytes, limit " +
                        std::to_string(max_sms_body));
    return out;
}

std::optional<WireChatMessage> decode(std::string_view body)
{
    const auto bar = body.find('|');
    const auto version = body.substr(0, bar);
    if (version != wire_prefix)
        return std::nullopt;
    if (bar == std::string_view::npos)
        throw ParseError(0, "truncated chat frame");

    const auto fields = text::split(body, '|');
    if (fields.size() < 5)
        throw ParseError(0, "truncated chat frame");

    WireChatMessage msg;
    if (!ChatCode::is_valid(fields[1]))
        throw ParseError(0, "bad chat code '" + fields[1] + "'");
    msg.code = ChatCode(fields[1]);

    const auto tag = std::find_if(kind_tags.begin(), kind_tags.end(), [&](const KindTag& k) { return k.tag == fields[2]; });
    if (tag == kind_tags.end())
        throw ParseError(0, "unknown chat kind '" + fields[2] + "'");
    msg.kind = tag->kind;

    const std::size_t expected = carries_members(msg.kind) ? 6 : 5;
    if (fields.size() != expected)
        throw ParseError(0, "chat kind " + fields[2] + " expects " + std::to_string(expected) + " fields");

    msg.sender_nick = unescape_field(fields[3]);
    if (utf8_length(msg.sender_nick) > max_nick_chars)
        throw ParseError(0, "nick longer than 16 characters");
    msg.payload = unescape_field(fields[4]);
    if (expected == 6) {
        std::vector<Member> members;
        if (!fields[5].empty()) {
            for (const auto& pair : text::split(fields[5], ',')) {
                const auto parts = text::split(pair, '~');
                if (parts.size() != 2)
                    throw ParseError(0, "bad member entry '" + pair + "'");
                members.push_back(Member{unescape_field(parts[0]), unescape_field(parts[1])});
            }
        }
        msg.members = std::move(members);
    }
    return msg;
}

} // namespace smsctl::chat
