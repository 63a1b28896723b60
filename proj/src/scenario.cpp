#include "smsctl/sms_bus.hpp"

#include "smsctl/calendar.hpp"
#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace smsctl::bus {

namespace {

using Kind = Action::Kind;

long long parse_count(const std::string& s, std::size_t line)
{
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used == s.size() && v >= 0)
            return v;
    } catch (const std::exception&) {
    }
    throw ParseError(line, "expected a non-negative count, got '" + s + "'");
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct PendingDevice {
    DeviceSpec spec;
    std::string config_text;
    std::size_t line = 0;
};

void expect_words(const std::vector<std::string>& w, std::size_t min, std::size_t max, std::size_t line)
{
    if (w.size() < min || w.size() > max)
        throw ParseError(line, "wrong number of words");
}

Action parse_action(const std::vector<std::string>& w, std::size_t line)
{
    // w[0] == "AT", w[1] == time, w[2] == verb
    if (w.size() < 3)
        throw ParseError(line, "AT needs a time and an action");
    Action a;
    a.line = line;
    try {
        a.at = calendar::parse_time(w[1]);
    } catch (const ParseError& e) {
        throw ParseError(line, e.what());
    }
    const auto& verb = w[2];
    if (verb == "SEND") {
        expect_words(w, 6, 6, line);
        a.kind = Kind::Send;
        a.device = canonicalize_address(w[3]);
        a.to = canonicalize_address(w[4]);
        a.text = w[5];
    } else if (verb == "TICK") {
        expect_words(w, 3, 3, line);
        a.kind = Kind::Tick;
    } else if (verb == "USER") {
        expect_words(w, 6, 7, line);
        a.kind = Kind::User;
        a.device = canonicalize_address(w[3]);
        if (w[4] != "ACCEPT" && w[4] != "REJECT")
            throw ParseError(line, "USER takes ACCEPT or REJECT");
        a.accept = w[4] == "ACCEPT";
        a.code = w[5];
        if (w.size() == 7)
            a.text = w[6];
    } else if (verb == "FEEDBACK") {
        expect_words(w, 6, 6, line);
        a.kind = Kind::Feedback;
        a.device = canonicalize_address(w[3]);
        if (w[4] != "NOTSPAM" && w[4] != "ISSPAM")
            throw ParseError(line, "FEEDBACK takes NOTSPAM or ISSPAM");
        a.accept = w[4] == "NOTSPAM";
        a.code = w[5];
    } else if (verb == "CHAT") {
        if (w.size() < 5)
            throw ParseError(line, "CHAT needs a device and a command");
        a.device = canonicalize_address(w[3]);
        const auto& cmd = w[4];
        if (cmd == "START") {
            if (w.size() < 7)
                throw ParseError(line, "CHAT START needs a nick and at least one invitee");
            a.kind = Kind::ChatStart;
            a.text = w[5];
            for (std::size_t i = 6; i < w.size(); ++i)
                a.addresses.push_back(canonicalize_address(w[i]));
        } else if (cmd == "SAY") {
            expect_words(w, 7, 7, line);
            a.kind = Kind::ChatSay;
            a.code = w[5];
            a.text = w[6];
        } else if (cmd == "INVITE") {
            if (w.size() < 7)
                throw ParseError(line, "CHAT INVITE needs at least one invitee");
            a.kind = Kind::ChatInvite;
            a.code = w[5];
            for (std::size_t i = 6; i < w.size(); ++i)
                a.addresses.push_back(canonicalize_address(w[i]));
        } else if (cmd == "LEAVE") {
            expect_words(w, 6, 6, line);
            a.kind = Kind::ChatLeave;
            a.code = w[5];
        } else {
            throw ParseError(line, "unknown CHAT command '" + cmd + "'");
        }
    } else {
        throw ParseError(line, "unknown action '" + verb + "'");
    }
    return a;
}

Assertion parse_assertion(const std::vector<std::string>& w, std::size_t line)
{
    Assertion a;
    a.line = line;
    if (w.size() == 2 && (w[1] == "CONVERGED" || w[1] == "CONSERVATION")) {
        a.what = w[1];
        return a;
    }
    if (w.size() < 4)
        throw ParseError(line, "ASSERT needs a device, a property and a value");
    a.device = canonicalize_address(w[1]);
    a.what = w[2];
    static const std::set<std::string> counts = {"INBOX", "SPAM", "OUTBOX", "REPORT", "SESSIONS", "PENDING"};
    if (counts.count(a.what)) {
        expect_words(w, 4, 4, line);
        a.count = parse_count(w[3], line);
    } else if (a.what == "TRANSCRIPT") {
        expect_words(w, 5, 5, line);
        a.arg = w[3];
        a.count = parse_count(w[4], line);
    } else if (a.what == "MEMBERS") {
        a.arg = w[3];
        for (std::size_t i = 4; i < w.size(); ++i)
            for (const auto& item : text::split_list(w[i], ','))
                a.list.push_back(canonicalize_address(item));
    } else if (a.what == "ONTOLOGY_HAS" || a.what == "ONTOLOGY_LACKS") {
        expect_words(w, 4, 4, line);
        a.arg = text::to_lower(w[3]);
    } else {
        throw ParseError(line, "unknown assertion '" + a.what + "'");
    }
    return a;
}

} // namespace

Scenario parse_scenario(std::istream& in, const std::string& base_dir)
{
    Scenario sc;
    std::vector<PendingDevice> devices;
    std::string raw;
    std::size_t line = 0;
    bool in_device_block = false;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const auto trimmed = text::trim(raw);
        const bool indented = !raw.empty() && (raw.front() == ' ' || raw.front() == '\t');
        if (indented && in_device_block) {
            // Inline device configuration.
            devices.back().config_text += std::string(trimmed) + "\n";
            continue;
        }
        if (trimmed.empty() || trimmed.front() == '#')
            continue;
        in_device_block = false;

        std::vector<std::string> w;
        try {
            w = text::shell_words(trimmed);
        } catch (const ParseError& e) {
            throw ParseError(line, e.what());
        }
        const auto& head = w.front();
        if (head == "DEVICE") {
            if (w.size() < 3 || w.size() > 4)
                throw ParseError(line, "DEVICE <address> <nick> [config=<path>]");
            PendingDevice d;
            d.line = line;
            d.spec.address = canonicalize_address(w[1]);
            d.spec.nick = w[2];
            if (d.spec.address.empty())
                throw ParseError(line, "empty device address");
            if (w.size() == 4) {
                if (!text::starts_with(w[3], "config="))
                    throw ParseError(line, "expected config=<path>");
                std::filesystem::path p = w[3].substr(7);
                if (p.is_relative())
                    p = std::filesystem::path(base_dir) / p;
                d.config_text = read_file(p.string()) + "\n";
            }
            devices.push_back(std::move(d));
            in_device_block = true;
        } else if (head == "CLOCK") {
            expect_words(w, 2, 2, line);
            try {
                sc.clock = calendar::parse_time(w[1]);
            } catch (const ParseError& e) {
                throw ParseError(line, e.what());
            }
        } else if (head == "AT") {
            auto a = parse_action(w, line);
            a.source = std::string(trimmed);
            sc.script.push_back(std::move(a));
        } else if (head == "ASSERT") {
            auto a = parse_assertion(w, line);
            a.source = std::string(trimmed);
            sc.assertions.push_back(std::move(a));
        } else {
            throw ParseError(line, "unknown directive '" + head + "'");
        }
    }
    for (auto& d : devices) {
        std::istringstream cfg(d.config_text);
        try {
            d.spec.config = parse_device_config(cfg);
        } catch (const ParseError& e) {
            throw ParseError(d.line, "config of device " + d.spec.address + ": " + e.what());
        } catch (const ConfigError& e) {
            throw ParseError(d.line, "config of device " + d.spec.address + ": " + e.what());
        }
        if (d.spec.config.nick && d.spec.nick.empty())
            d.spec.nick = *d.spec.config.nick;
        sc.devices.push_back(std::move(d.spec));
    }
    return sc;
}

Scenario load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read scenario " + path);
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_scenario(in, dir.empty() ? std::string(".") : dir.string());
}

void validate_scenario(const Scenario& sc)
{
    std::set<std::string> known;
    for (const auto& d : sc.devices)
        if (!known.insert(d.address).second)
            throw ValidationError("device " + d.address + " declared twice");
    auto need = [&](const std::string& addr, std::size_t line) {
        if (!known.count(addr))
            throw ValidationError("line " + std::to_string(line) + ": unknown device '" + addr + "'");
    };
    Timestamp last = sc.clock;
    for (const auto& a : sc.script) {
        if (a.at < last)
            throw ValidationError("line " + std::to_string(a.line) + ": time runs backwards");
        last = a.at;
        switch (a.kind) {
        case Kind::Tick:
            break;
        case Kind::Send:
            // The sender may be outside the simulated network.
            need(a.to, a.line);
            break;
        case Kind::ChatStart:
        case Kind::ChatInvite:
            need(a.device, a.line);
            for (const auto& x : a.addresses)
                need(x, a.line);
            break;
        default:
            need(a.device, a.line);
        }
    }
    for (const auto& a : sc.assertions)
        if (!a.device.empty())
            need(a.device, a.line);
}

} // namespace smsctl::bus
