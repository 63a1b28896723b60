#include "smsctl/sms_bus.hpp"

#include "smsctl/calendar.hpp"
#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <tuple>

namespace smsctl::bus {

namespace {

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string line_of(Timestamp at, std::initializer_list<std::string_view> fields)
{
    std::string out = calendar::format_iso_ms(at);
    for (auto f : fields) {
        out += '\t';
        out += f;
    }
    return out;
}

const chat::ChatSession* latest_session(const chat::ChatAgent& agent, bool open_only)
{
    const auto& order = agent.session_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto* s = agent.session(*it);
        if (s && (!open_only || s->state != chat::SessionState::Closed))
            return s;
    }
    return nullptr;
}

} // namespace

VirtualDevice::VirtualDevice(const DeviceSpec& spec, const SimEnvironment& env, std::uint64_t seed)
    : address_(spec.address), nick_(spec.nick.empty() ? spec.config.nick.value_or(spec.address) : spec.nick),
      learn_(spec.config.learn), prefilter_(spec.config.prefilter), ontology_(env.ontology),
      chat_(spec.address, nick_, seed * 0x9E3779B97F4A7C15ULL + fnv1a(spec.address))
{
    rules_.auto_reply = spec.config.auto_reply;
    rules_.groups = spec.config.groups;
    rules_.profiles = spec.config.profiles;
    rules_.contacts = spec.config.contacts;
    rules_.birthday_message = spec.config.birthday_message;
}

class Bus {
public:
    Bus(const Scenario& sc, const SimEnvironment& env, std::uint64_t seed) : sc_(sc), env_(env)
    {
        validate_scenario(sc);
        for (const auto& spec : sc.devices) {
            VirtualDevice d(spec, env, seed);
            for (const auto& e : spec.config.events) {
                try {
                    rules::add_event(d.rules_.events, e, sc.clock);
                } catch (const ValidationError& err) {
                    throw ValidationError("device " + spec.address + ": " + err.what());
                }
            }
            rules::sync_birthdays(d.rules_.contacts, d.rules_.events, d.rules_.birthday_message, sc.clock);
            result_.devices.emplace(spec.address, std::move(d));
        }
        for (std::size_t i = 0; i < sc.script.size(); ++i)
            queue_.push(Event{sc.script[i].at, seq_++, i, {}, {}, {}, {}});
    }

    RunResult run()
    {
        while (!queue_.empty()) {
            const Event e = queue_.top();
            queue_.pop();
            if (e.action != npos)
                perform(sc_.script[e.action]);
            else
                deliver(e);
        }
        for (const auto& a : sc_.assertions)
            result_.assertions.push_back(evaluate(a));
        return std::move(result_);
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    struct Event {
        Timestamp at;
        std::uint64_t seq;
        std::size_t action; // index into the script, npos for a delivery
        std::string id, from, to, body;
    };

    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return std::tie(a.at, a.seq) > std::tie(b.at, b.seq);
        }
    };

    void log(std::string line) { result_.transcript.push_back(std::move(line)); }

    void skip(const Action& a, const std::string& why)
    {
        log(line_of(a.at, {"SKIP", "line " + std::to_string(a.line), why}));
    }

    VirtualDevice* device(const std::string& address)
    {
        auto it = result_.devices.find(address);
        return it == result_.devices.end() ? nullptr : &it->second;
    }

    void send(const std::string& from, const std::string& to, const std::string& body, std::string_view cause,
              Timestamp now)
    {
        const auto id = "m" + std::to_string(++next_id_);
        log(line_of(now, {"SEND", id, from, to, cause, text::quote(body)}));
        if (auto* d = device(from))
            d->outbox_.push_back(StoredSms{id, to, body, now});
        if (!device(to)) {
            log(line_of(now, {"UNROUTED", id, to}));
            return;
        }
        sent_to_[to].push_back(id);
        queue_.push(Event{now, seq_++, npos, id, from, to, body});
    }

    void dispatch(VirtualDevice& d, const std::vector<chat::Outgoing>& wires, Timestamp now)
    {
        for (const auto& o : wires) {
            std::string body;
            try {
                body = chat::encode(o.wire);
            } catch (const Error& e) {
                log(line_of(now, {"DROP", d.address_, o.to, e.what()}));
                continue;
            }
            send(d.address_, o.to, body, "chat", now);
        }
    }

    void dispatch(VirtualDevice& d, const std::vector<rules::OutgoingSms>& out, Timestamp now)
    {
        for (const auto& o : out)
            send(d.address_, o.to, o.body, rules::to_string(o.cause), now);
    }

    void drain_chat_log(VirtualDevice& d, Timestamp now)
    {
        for (auto& note : d.chat_.take_log())
            log(line_of(now, {"NOTE", d.address_, note}));
    }

    void deliver(const Event& e)
    {
        auto& d = *device(e.to);
        const StoredSms stored{e.id, e.from, e.body, e.at};

        std::optional<chat::WireChatMessage> wire;
        try {
            wire = chat::decode(e.body);
        } catch (const ParseError& err) {
            log(line_of(e.at, {"NOTE", d.address_, std::string("malformed chat wire treated as SMS: ") + err.what()}));
        }
        if (wire) {
            d.chat_wires_.push_back(stored);
            log(line_of(e.at, {"DELIVER", e.id, d.address_, "chat", chat::to_tag(wire->kind), wire->code.str()}));
            auto out = d.chat_.handle_incoming(e.from, *wire, std::nullopt, e.at);
            drain_chat_log(d, e.at);
            dispatch(d, out, e.at);
            return;
        }

        const SmsMessage msg{e.from, e.body, e.at, MessageKind::Normal};
        const auto verdict = spam::classify(msg, *env_.lexicon, d.ontology_, d.prefilter_, env_.engine);
        const auto score = verdict.prefiltered ? std::string("prefiltered") : text::format_score(verdict.collective_score);
        if (verdict.is_spam()) {
            d.spam_.push_back(stored);
            log(line_of(e.at, {"DELIVER", e.id, d.address_, "spam", score, spam::format_matches(verdict.matches)}));
            if (d.learn_ && !verdict.prefiltered) {
                const auto added = spam::enhance_ontology(d.ontology_, verdict, env_.lexicon->graph);
                if (added)
                    log(line_of(e.at, {"LEARN", d.address_, std::to_string(added)}));
            }
        } else {
            d.inbox_.push_back(stored);
            log(line_of(e.at, {"DELIVER", e.id, d.address_, "inbox", score, spam::format_matches(verdict.matches)}));
        }
        dispatch(d, rules::on_incoming(msg, verdict.is_spam(), d.rules_, e.at), e.at);
    }

    std::optional<chat::ChatCode> explicit_code(const Action& a)
    {
        if (!chat::ChatCode::is_valid(a.code)) {
            skip(a, "invalid chat code '" + a.code + "'");
            return std::nullopt;
        }
        return chat::ChatCode(a.code);
    }

    std::optional<chat::ChatCode> session_code(const Action& a, const VirtualDevice& d)
    {
        if (a.code != "*")
            return explicit_code(a);
        if (const auto* s = latest_session(d.chat_, true))
            return s->code;
        skip(a, "no open chat on " + d.address_);
        return std::nullopt;
    }

    void perform(const Action& a)
    {
        using Kind = Action::Kind;
        const Timestamp now = a.at;
        if (a.kind == Kind::Tick) {
            for (auto& [addr, d] : result_.devices)
                dispatch(d, rules::tick(now, d.rules_.events, d.rules_.groups, d.rules_.report), now);
            return;
        }
        if (a.kind == Kind::Send) {
            send(a.device, a.to, a.text, "sms", now);
            return;
        }
        auto& d = *device(a.device);
        try {
            switch (a.kind) {
            case Kind::User: {
                std::optional<chat::ChatCode> code;
                if (a.code == "*") {
                    if (d.chat_.pending_invites().empty())
                        return skip(a, "no pending invitation on " + d.address_);
                    code = d.chat_.pending_invites().front().code;
                } else if (!(code = explicit_code(a))) {
                    return;
                }
                log(line_of(now, {"USER", d.address_, a.accept ? "ACCEPT" : "REJECT", code->str()}));
                auto out = d.chat_.respond(*code, a.accept ? chat::Decision::Accept : chat::Decision::Reject,
                                           a.text.empty() ? std::nullopt : std::optional<std::string>(a.text), now);
                dispatch(d, out, now);
                break;
            }
            case Kind::ChatStart: {
                auto started = d.chat_.start_chat(a.addresses, a.text);
                log(line_of(now, {"CHAT", d.address_, "START", started.code.str()}));
                dispatch(d, started.wires, now);
                break;
            }
            case Kind::ChatSay:
                if (auto code = session_code(a, d))
                    dispatch(d, d.chat_.send_chat(*code, a.text, now), now);
                break;
            case Kind::ChatInvite:
                if (auto code = session_code(a, d))
                    dispatch(d, d.chat_.invite_more(*code, a.addresses), now);
                break;
            case Kind::ChatLeave:
                if (auto code = session_code(a, d)) {
                    log(line_of(now, {"CHAT", d.address_, "LEAVE", code->str()}));
                    dispatch(d, d.chat_.leave(*code), now);
                }
                break;
            case Kind::Feedback: {
                const StoredSms* found = nullptr;
                for (const auto* folder : {&d.inbox_, &d.spam_})
                    for (const auto& m : *folder)
                        if (m.id == a.code)
                            found = &m;
                if (!found)
                    return skip(a, "no message " + a.code + " on " + d.address_);
                const SmsMessage msg{found->peer, found->body, found->at, MessageKind::Normal};
                const auto outcome =
                    spam::apply_feedback(d.ontology_, msg, a.accept ? spam::Correction::NotSpam : spam::Correction::IsSpam,
                                         *env_.lexicon, env_.engine);
                log(line_of(now, {"FEEDBACK", d.address_, a.code, a.accept ? "NOTSPAM" : "ISSPAM",
                                  "added=" + std::to_string(outcome.added), "removed=" + std::to_string(outcome.removed)}));
                break;
            }
            default:
                break;
            }
        } catch (const Error& e) {
            skip(a, e.what());
        }
        drain_chat_log(d, now);
    }

    AssertionResult evaluate(const Assertion& a)
    {
        AssertionResult r{a.line, a.source, false, {}};
        auto count_check = [&](std::size_t got) {
            r.passed = static_cast<long long>(got) == a.count;
            if (!r.passed)
                r.detail = "expected " + std::to_string(a.count) + ", got " + std::to_string(got);
        };
        if (a.what == "CONVERGED") {
            const auto issues = check_convergence(result_.devices);
            r.passed = issues.empty();
            if (!r.passed)
                r.detail = issues.front();
            return r;
        }
        if (a.what == "CONSERVATION") {
            r.passed = true;
            for (const auto& [addr, ids] : sent_to_) {
                const auto& d = result_.devices.at(addr);
                std::map<std::string, int> seen;
                for (const auto* folder : {&d.inbox_, &d.spam_, &d.chat_wires_})
                    for (const auto& m : *folder)
                        ++seen[m.id];
                for (const auto& id : ids) {
                    if (seen[id] != 1) {
                        r.passed = false;
                        r.detail = id + " stored " + std::to_string(seen[id]) + " times on " + addr;
                        return r;
                    }
                }
                if (seen.size() != ids.size()) {
                    r.passed = false;
                    r.detail = "unexpected messages on " + addr;
                    return r;
                }
            }
            return r;
        }

        const auto& d = result_.devices.at(a.device);
        if (a.what == "INBOX")
            count_check(d.inbox_.size());
        else if (a.what == "SPAM")
            count_check(d.spam_.size());
        else if (a.what == "OUTBOX")
            count_check(d.outbox_.size());
        else if (a.what == "REPORT")
            count_check(d.rules_.report.size());
        else if (a.what == "PENDING")
            count_check(d.chat_.pending_invites().size());
        else if (a.what == "SESSIONS")
            count_check(std::count_if(d.chat_.sessions().begin(), d.chat_.sessions().end(),
                                      [](const auto& kv) { return kv.second.state == chat::SessionState::Active; }));
        else if (a.what == "ONTOLOGY_HAS" || a.what == "ONTOLOGY_LACKS") {
            const bool has = d.ontology_.contains(a.arg);
            r.passed = has == (a.what == "ONTOLOGY_HAS");
            if (!r.passed)
                r.detail = has ? "present" : "absent";
        } else if (a.what == "MEMBERS" || a.what == "TRANSCRIPT") {
            const chat::ChatSession* s = nullptr;
            if (a.arg == "*")
                s = latest_session(d.chat_, false);
            else if (chat::ChatCode::is_valid(a.arg))
                s = d.chat_.session(chat::ChatCode(a.arg));
            if (!s) {
                r.detail = "no such chat on " + d.address_;
                return r;
            }
            if (a.what == "TRANSCRIPT") {
                count_check(s->transcript.size());
            } else {
                std::set<std::string> want(a.list.begin(), a.list.end());
                std::set<std::string> got;
                for (const auto& [addr, nick] : full_roster(d, *s))
                    got.insert(addr);
                r.passed = want == got;
                if (!r.passed)
                    r.detail = "got " + text::join(std::vector<std::string>(got.begin(), got.end()), ",");
            }
        }
        return r;
    }

    const Scenario& sc_;
    const SimEnvironment& env_;
    RunResult result_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::uint64_t next_id_ = 0;
    std::map<std::string, std::vector<std::string>> sent_to_;
};

bool RunResult::passed() const
{
    return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

std::string RunResult::render() const
{
    std::string out;
    for (const auto& line : transcript)
        out += line + "\n";
    std::size_t failed = 0;
    for (const auto& a : assertions) {
        out += a.passed ? "PASS\t" : "FAIL\t";
        out += "line " + std::to_string(a.line) + "\t" + a.source;
        if (!a.passed) {
            ++failed;
            out += "\t" + a.detail;
        }
        out += "\n";
    }
    out += "assertions: " + std::to_string(assertions.size() - failed) + " passed, " + std::to_string(failed) +
           " failed\n";
    return out;
}

RunResult run_scenario(const Scenario& scenario, const SimEnvironment& env, std::uint64_t seed)
{
    return Bus(scenario, env, seed).run();
}

std::map<std::string, std::string> full_roster(const VirtualDevice& device, const chat::ChatSession& session)
{
    auto all = session.members;
    all[device.address()] = session.self_nick;
    return all;
}

std::vector<std::string> check_convergence(const std::map<std::string, VirtualDevice>& devices)
{
    std::vector<std::string> issues;
    std::set<chat::ChatCode> codes;
    for (const auto& [addr, d] : devices)
        for (const auto& [code, s] : d.chat().sessions())
            codes.insert(code);

    for (const auto& code : codes) {
        const VirtualDevice* first = nullptr;
        std::map<std::string, std::string> roster;
        for (const auto& [addr, d] : devices) {
            const auto* s = d.chat().session(code);
            if (!s || s->state != chat::SessionState::Active)
                continue;
            auto r = full_roster(d, *s);
            if (!first) {
                first = &d;
                roster = std::move(r);
            } else if (r != roster) {
                issues.push_back("chat " + code.str() + ": roster on " + addr + " differs from " + first->address());
            }
        }

        // Per-sender order: what a device received from S is a subsequence of what S wrote.
        for (const auto& [addr, d] : devices) {
            const auto* s = d.chat().session(code);
            if (!s)
                continue;
            std::map<std::string, std::vector<std::string>> received;
            for (const auto& t : s->transcript)
                if (t.sender_address != addr)
                    received[t.sender_address].push_back(t.text);
            for (const auto& [sender, texts] : received) {
                auto it = devices.find(sender);
                if (it == devices.end())
                    continue;
                const auto* origin = it->second.chat().session(code);
                std::vector<std::string> written;
                if (origin)
                    for (const auto& t : origin->transcript)
                        if (t.sender_address == sender)
                            written.push_back(t.text);
                std::size_t k = 0;
                for (const auto& w : written)
                    if (k < texts.size() && texts[k] == w)
                        ++k;
                if (k != texts.size())
                    issues.push_back("chat " + code.str() + ": messages from " + sender + " out of order on " + addr);
            }
        }
    }
    return issues;
}

} // namespace smsctl::bus
