#include "doctest.h"

#include "smsctl/chat_protocol.hpp"
#include "smsctl/error.hpp"

#include <deque>
#include <map>
#include <memory>
#include <random>
#include <set>

using namespace smsctl;
using namespace smsctl::chat;

namespace {

std::string random_text(std::mt19937_64& rng, std::size_t max_len)
{
    static const std::string alphabet = "abcXYZ019 |,~\\#-\t\xc3\xa9";
    const auto n = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
    std::string s;
    for (std::size_t i = 0; i < n; ++i)
        s += alphabet[rng() % alphabet.size()];
    return s;
}

// Short random nick measured in code points: ASCII plus the two-byte "é".
std::string random_nick(std::mt19937_64& rng)
{
    const auto n = std::uniform_int_distribution<std::size_t>(0, max_nick_chars)(rng);
    std::string s;
    for (std::size_t i = 0; i < n; ++i)
        s += (rng() % 5 == 0) ? std::string("\xc3\xa9") : std::string(1, "ab|,~\\Z9"[rng() % 8]);
    return s;
}

ChatCode random_code(std::mt19937_64& rng)
{
    static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string s;
    for (std::size_t i = 0; i < ChatCode::length; ++i)
        s += alphabet[rng() % alphabet.size()];
    return ChatCode(s);
}

// FIFO delivery between agents; the user accepts or rejects invites on arrival.
struct Net {
    std::map<std::string, std::unique_ptr<ChatAgent>> agents;
    std::deque<std::pair<std::string, Outgoing>> queue; // (from, outgoing)
    std::map<std::string, Decision> answer;           // invitee -> decision
    Timestamp now = 0;

    ChatAgent& add(const std::string& addr, const std::string& nick, std::uint64_t seed)
    {
        auto& a = agents[addr];
        a = std::make_unique<ChatAgent>(addr, nick, seed);
        return *a;
    }

    void post(const std::string& from, const std::vector<Outgoing>& out)
    {
        for (const auto& o : out) {
            // Everything travels through the codec as it would over SMS.
            auto wire = decode(encode(o.wire));
            REQUIRE(wire);
            queue.emplace_back(from, Outgoing{o.to, *wire});
        }
    }

    void run()
    {
        while (!queue.empty()) {
            auto [from, o] = queue.front();
            queue.pop_front();
            auto it = agents.find(o.to);
            if (it == agents.end())
                continue;
            std::optional<Decision> d;
            if (o.wire.kind == WireKind::Invite) {
                auto a = answer.find(o.to);
                d = a == answer.end() ? Decision::Accept : a->second;
            }
            post(o.to, it->second->handle_incoming(from, o.wire, d, ++now));
        }
    }

    std::set<std::string> roster(const std::string& addr, const ChatCode& code)
    {
        std::set<std::string> out;
        const auto* s = agents.at(addr)->session(code);
        if (!s)
            return out;
        for (const auto& m : agents.at(addr)->roster(*s))
            out.insert(m.address);
        return out;
    }
};

} // namespace

TEST_CASE("chat codes are 8 characters of [A-Z0-9]")
{
    CHECK(ChatCode::is_valid("AB12CD34"));
    CHECK_FALSE(ChatCode::is_valid("ab12cd34"));
    CHECK_FALSE(ChatCode::is_valid("AB12CD3"));
    CHECK_THROWS_AS(ChatCode("AB-2CD34"), ParseError);
}

TEST_CASE("encode layout and escaping")
{
    WireChatMessage m{ChatCode("K7Q2M9XA"), WireKind::Chat, "bo|b", "hi, all ~ \\o/", std::nullopt};
    CHECK(encode(m) == "#GSC1|K7Q2M9XA|CHT|bo\\pb|hi\\c all \\t \\\\o/");
    WireChatMessage inv{ChatCode("K7Q2M9XA"), WireKind::Invite, "ann", "join group chat",
                        std::vector<Member>{{"+111", "ann"}, {"+222", "b,c"}}};
    CHECK(encode(inv) == "#GSC1|K7Q2M9XA|INV|ann|join group chat|+111~ann,+222~b\\cc");
}

TEST_CASE("encode contract checks")
{
    WireChatMessage m{ChatCode("K7Q2M9XA"), WireKind::Chat, "nick", "x", std::nullopt};
    m.sender_nick = std::string(17, 'n');
    CHECK_THROWS_AS(encode(m), ContractError);
    m.sender_nick = "";
    for (int i = 0; i < 16; ++i)
        m.sender_nick += "\xc3\xa9"; // 16 code points, 32 bytes
    CHECK_NOTHROW(encode(m));
    m.members = std::vector<Member>{};
    CHECK_THROWS_AS(encode(m), ContractError);
    m.members.reset();
    m.payload = std::string(max_sms_body, 'x');
    CHECK_THROWS_AS(encode(m), SizeError);
    WireChatMessage acc{ChatCode("K7Q2M9XA"), WireKind::Accept, "n", "", std::nullopt};
    CHECK_THROWS_AS(encode(acc), ContractError);
}

TEST_CASE("decode rejects malformed frames and ignores foreign text")
{
    CHECK_FALSE(decode("hello there"));
    CHECK_FALSE(decode("#GSC2|K7Q2M9XA|CHT|a|b"));
    CHECK_FALSE(decode(""));
    CHECK_THROWS_AS(decode("#GSC1"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|K7Q2M9XA|CHT|a"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|k7q2m9xa|CHT|a|b"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|K7Q2M9XA|XXX|a|b"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|K7Q2M9XA|CHT|a|b|c"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|K7Q2M9XA|MUP|a|b"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|K7Q2M9XA|MUP|a|b|+1"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|K7Q2M9XA|CHT|a|b\\q"), ParseError);
    CHECK_THROWS_AS(decode("#GSC1|K7Q2M9XA|CHT|a|b\\"), ParseError);
}

TEST_CASE("codec round trip on random wires")
{
    std::mt19937_64 rng(0xC0DEC);
    const WireKind kinds[] = {WireKind::Invite, WireKind::Accept, WireKind::Reject,
                              WireKind::Chat, WireKind::MemberUpdate, WireKind::Leave};
    for (int i = 0; i < 10000; ++i) {
        WireChatMessage m;
        m.code = random_code(rng);
        m.kind = kinds[rng() % 6];
        m.sender_nick = random_nick(rng);
        m.payload = random_text(rng, 120);
        if (carries_members(m.kind)) {
            std::vector<Member> members(rng() % 5);
            for (auto& mem : members)
                mem = Member{random_text(rng, 12), random_nick(rng)};
            m.members = members;
        }
        const auto body = encode(m);
        const auto back = decode(body);
        REQUIRE(back);
        REQUIRE(*back == m);
        CHECK(escape_field(unescape_field(escape_field(m.payload))) == escape_field(m.payload));
    }
}

TEST_CASE("generated codes are unique per device")
{
    ChatAgent a("+1", "a", 99);
    std::set<ChatCode> seen;
    for (int i = 0; i < 10000; ++i)
        REQUIRE(seen.insert(a.generate_code()).second);
}

TEST_CASE("three-way chat converges")
{
    Net net;
    net.add("+1", "ann", 1);
    net.add("+2", "bob", 2);
    net.add("+3", "cy", 3);
    auto started = net.agents["+1"]->start_chat({"+2", "+3"}, "");
    CHECK(net.agents["+1"]->session(started.code)->state == SessionState::InvitePending);
    net.post("+1", started.wires);
    net.run();

    const auto code = started.code;
    const std::set<std::string> all = {"+1", "+2", "+3"};
    for (const auto& addr : all) {
        const auto* s = net.agents[addr]->session(code);
        REQUIRE(s);
        CHECK(s->state == SessionState::Active);
        CHECK(s->authority == "+1");
        CHECK(net.roster(addr, code) == all);
    }
    CHECK(net.agents["+2"]->session(code)->members.at("+3") == "cy");

    net.post("+2", net.agents["+2"]->send_chat(code, "hello", net.now));
    net.post("+3", net.agents["+3"]->send_chat(code, "hey", net.now));
    net.run();
    for (const auto& addr : all)
        CHECK(net.agents[addr]->session(code)->transcript.size() == 2);
    CHECK(net.agents["+1"]->session(code)->transcript[0].sender_nick == "bob");
}

TEST_CASE("reject leaves the rest of the chat intact")
{
    Net net;
    net.add("+1", "ann", 1);
    net.add("+2", "bob", 2);
    net.add("+3", "cy", 3);
    net.answer["+3"] = Decision::Reject;
    auto started = net.agents["+1"]->start_chat({"+2", "+3"}, "ann");
    net.post("+1", started.wires);
    net.run();
    CHECK(net.roster("+1", started.code) == std::set<std::string>{"+1", "+2"});
    CHECK(net.roster("+2", started.code) == std::set<std::string>{"+1", "+2"});
    CHECK(net.agents["+3"]->session(started.code) == nullptr);
    CHECK(net.agents["+1"]->session(started.code)->pending_invitees.empty());
}

TEST_CASE("authority hand-over when the initiator leaves")
{
    Net net;
    for (const auto* a : {"+1", "+2", "+3", "+4"})
        net.add(a, std::string("n") + a, std::hash<std::string>{}(a));
    auto started = net.agents["+1"]->start_chat({"+2", "+3", "+4"}, "");
    net.post("+1", started.wires);
    net.run();
    const auto code = started.code;

    net.post("+1", net.agents["+1"]->leave(code));
    net.run();
    CHECK(net.agents["+1"]->session(code)->state == SessionState::Closed);
    for (const auto* a : {"+2", "+3", "+4"}) {
        CHECK(net.agents[a]->session(code)->authority == "+2");
        CHECK(net.roster(a, code) == std::set<std::string>{"+2", "+3", "+4"});
    }

    // A non-authority member invites a newcomer; the accept reaches the new authority.
    net.add("+5", "eve", 5);
    net.post("+4", net.agents["+4"]->invite_more(code, {"+5"}));
    net.run();
    for (const auto* a : {"+2", "+3", "+4", "+5"})
        CHECK(net.roster(a, code) == std::set<std::string>{"+2", "+3", "+4", "+5"});
    CHECK(net.agents["+5"]->session(code)->transcript.empty());
}

TEST_CASE("last remaining member falls back to pending")
{
    Net net;
    net.add("+1", "ann", 1);
    net.add("+2", "bob", 2);
    auto started = net.agents["+1"]->start_chat({"+2"}, "");
    net.post("+1", started.wires);
    net.run();
    net.post("+2", net.agents["+2"]->leave(started.code));
    net.run();
    const auto* s = net.agents["+1"]->session(started.code);
    CHECK(s->state == SessionState::InvitePending);
    CHECK(s->members.empty());
    CHECK_THROWS_AS(net.agents["+1"]->send_chat(started.code, "anyone?", 0), StateError);
}

TEST_CASE("queued invites and user responses")
{
    ChatAgent host("+1", "ann", 1);
    ChatAgent guest("+2", "bob", 2);
    auto started = host.start_chat({"+2"}, "");
    REQUIRE(started.wires.size() == 1);
    CHECK(guest.handle_incoming("+1", started.wires[0].wire, std::nullopt, 10).empty());
    REQUIRE(guest.pending_invites().size() == 1);
    CHECK(guest.pending_invites().front().inviter == "+1");
    CHECK_THROWS_AS(guest.respond(ChatCode("ZZZZZZZZ"), Decision::Accept, std::nullopt, 11), StateError);

    auto reply = guest.respond(started.code, Decision::Accept, std::string("bobby"), 11);
    REQUIRE(reply.size() == 1);
    CHECK(reply[0].to == "+1");
    CHECK(reply[0].wire.kind == WireKind::Accept);
    CHECK(reply[0].wire.members->front() == Member{"+2", "bobby"});
    CHECK(guest.pending_invites().empty());

    CHECK_THROWS_AS(guest.handle_incoming("+1", reply[0].wire, Decision::Accept, 12), ContractError);
}

TEST_CASE("wires for unknown chats are dropped with a note")
{
    ChatAgent a("+1", "ann", 1);
    WireChatMessage m{ChatCode("AAAAAAAA"), WireKind::Chat, "x", "hi", std::nullopt};
    CHECK(a.handle_incoming("+9", m, std::nullopt, 0).empty());
    const auto log = a.take_log();
    REQUIRE(log.size() == 1);
    CHECK(log[0].find("unknown chat") != std::string::npos);
    CHECK(a.take_log().empty());
}

TEST_CASE("member update without this device is ignored")
{
    Net net;
    net.add("+1", "ann", 1);
    net.add("+2", "bob", 2);
    auto started = net.agents["+1"]->start_chat({"+2"}, "");
    net.post("+1", started.wires);
    net.run();
    WireChatMessage bogus{started.code, WireKind::MemberUpdate, "ann", "", std::vector<Member>{{"+1", "ann"}, {"+7", "x"}}};
    net.agents["+2"]->handle_incoming("+1", bogus, std::nullopt, 0);
    CHECK(net.roster("+2", started.code) == std::set<std::string>{"+1", "+2"});
}
