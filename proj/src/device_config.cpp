#include "smsctl/device_config.hpp"

#include "smsctl/calendar.hpp"
#include "smsctl/error.hpp"
#include "smsctl/text.hpp"

#include <fstream>

namespace smsctl {

namespace {

struct Section {
    std::string kind;
    std::string name;
};

std::string value_of(std::string_view raw, std::size_t line)
{
    if (!raw.empty() && raw.front() == '"') {
        try {
            return text::unquote(raw);
        } catch (const ParseError& e) {
            throw ParseError(line, e.what());
        }
    }
    return std::string(raw);
}

bool parse_flag(const std::string& v, std::size_t line)
{
    const auto s = text::to_lower(v);
    if (s == "true" || s == "yes" || s == "on" || s == "1")
        return true;
    if (s == "false" || s == "no" || s == "off" || s == "0")
        return false;
    throw ParseError(line, "expected a boolean, got '" + v + "'");
}

std::set<std::string> address_set(const std::string& v)
{
    std::set<std::string> out;
    for (const auto& item : text::split_list(v, ','))
        if (auto a = canonicalize_address(text::trim(item)); !a.empty())
            out.insert(a);
    return out;
}

std::set<std::string> title_set(const std::string& v)
{
    std::set<std::string> out;
    for (const auto& item : text::split_list(v, ','))
        if (auto t = text::trim(item); !t.empty())
            out.emplace(t);
    return out;
}

[[noreturn]] void unknown_key(const Section& s, const std::string& key, std::size_t line)
{
    throw ParseError(line, "unknown key '" + key + "' in [" + s.kind + "]");
}

} // namespace

DeviceConfig parse_device_config(std::istream& in)
{
    DeviceConfig cfg;
    Section section;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const auto s = text::trim(raw);
        if (s.empty() || s.front() == '#' || s.front() == ';')
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ParseError(line, "unterminated section header");
            const auto inner = text::trim(s.substr(1, s.size() - 2));
            const auto sp = inner.find_first_of(" \t");
            section.kind = std::string(inner.substr(0, sp));
            section.name = sp == std::string_view::npos ? std::string() : std::string(text::trim(inner.substr(sp)));
            const bool named = section.kind == "profile" || section.kind == "group" || section.kind == "contact" ||
                               section.kind == "event";
            const bool plain = section.kind == "device" || section.kind == "spam" || section.kind == "autoreply" ||
                               section.kind == "birthday";
            if (!named && !plain)
                throw ParseError(line, "unknown section [" + section.kind + "]");
            if (named && section.name.empty())
                throw ParseError(line, "[" + section.kind + "] needs a title");
            if (plain && !section.name.empty())
                throw ParseError(line, "[" + section.kind + "] takes no title");
            if (section.kind == "profile") {
                if (cfg.profiles.count(section.name))
                    throw ParseError(line, "duplicate profile '" + section.name + "'");
                cfg.profiles[section.name] = rules::Profile{section.name, {}};
            } else if (section.kind == "group") {
                if (cfg.groups.count(section.name))
                    throw ParseError(line, "duplicate group '" + section.name + "'");
                cfg.groups[section.name] = rules::Group{section.name, {}};
            } else if (section.kind == "contact") {
                cfg.contacts.push_back(rules::Contact{canonicalize_address(section.name), {}, std::nullopt});
            } else if (section.kind == "event") {
                for (const auto& e : cfg.events)
                    if (e.title == section.name)
                        throw ParseError(line, "duplicate event '" + section.name + "'");
                rules::EventSpec e;
                e.title = section.name;
                e.fire_at = -1;
                cfg.events.push_back(std::move(e));
            }
            continue;
        }
        if (section.kind.empty())
            throw ParseError(line, "entry outside of a section");
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line, "expected 'key = value'");
        const std::string key(text::trim(s.substr(0, eq)));
        const std::string v = value_of(text::trim(s.substr(eq + 1)), line);

        if (section.kind == "device") {
            if (key == "nick")
                cfg.nick = v;
            else if (key == "learn")
                cfg.learn = parse_flag(v, line);
            else
                unknown_key(section, key, line);
        } else if (section.kind == "spam") {
            if (key == "blacklist")
                cfg.prefilter.blacklist = address_set(v);
            else if (key == "specific")
                cfg.prefilter.spam_specific = address_set(v);
            else if (key == "unknown")
                cfg.prefilter.spam_unknown = parse_flag(v, line);
            else if (key == "weird")
                cfg.prefilter.spam_weird = parse_flag(v, line);
            else
                unknown_key(section, key, line);
        } else if (section.kind == "autoreply") {
            if (key == "enabled") {
                cfg.auto_reply.enabled = parse_flag(v, line);
            } else if (key == "default_reply") {
                cfg.auto_reply.default_reply = v;
            } else if (key == "active_profile") {
                if (v.empty())
                    cfg.auto_reply.active_profile.reset();
                else
                    cfg.auto_reply.active_profile = v;
            } else if (key == "window_minutes") {
                try {
                    std::size_t used = 0;
                    const long long minutes = std::stoll(v, &used);
                    if (used != v.size() || minutes < 0)
                        throw std::invalid_argument(v);
                    cfg.auto_reply.reply_window = minutes * calendar::ms_per_minute;
                } catch (const std::exception&) {
                    throw ParseError(line, "window_minutes must be a non-negative integer");
                }
            } else {
                unknown_key(section, key, line);
            }
        } else if (section.kind == "profile") {
            if (key == "reply")
                cfg.profiles[section.name].reply_text = v;
            else
                unknown_key(section, key, line);
        } else if (section.kind == "group") {
            if (key == "members")
                cfg.groups[section.name].members = address_set(v);
            else if (key == "profile")
                cfg.auto_reply.group_bindings[section.name] = v;
            else
                unknown_key(section, key, line);
        } else if (section.kind == "contact") {
            auto& c = cfg.contacts.back();
            if (key == "name") {
                c.name = v;
            } else if (key == "birthday") {
                try {
                    c.birthday = calendar::parse_month_day(v);
                } catch (const ParseError& e) {
                    throw ParseError(line, e.what());
                }
            } else {
                unknown_key(section, key, line);
            }
        } else if (section.kind == "birthday") {
            if (key == "message")
                cfg.birthday_message = v;
            else
                unknown_key(section, key, line);
        } else if (section.kind == "event") {
            auto& e = cfg.events.back();
            if (key == "at") {
                try {
                    e.fire_at = calendar::parse_time(v);
                } catch (const ParseError& err) {
                    throw ParseError(line, err.what());
                }
            } else if (key == "recurrence") {
                const auto r = text::to_lower(v);
                if (r == "once")
                    e.recurrence = rules::Recurrence::Once;
                else if (r == "yearly")
                    e.recurrence = rules::Recurrence::Yearly;
                else
                    throw ParseError(line, "recurrence must be once or yearly");
            } else if (key == "groups") {
                e.group_titles = title_set(v);
            } else if (key == "numbers") {
                e.extra_numbers = address_set(v);
            } else if (key == "message") {
                e.message = v;
            } else {
                unknown_key(section, key, line);
            }
        } else {
            unknown_key(section, key, line);
        }
    }

    cfg.prefilter.canonicalize();
    for (const auto& c : cfg.contacts)
        cfg.prefilter.contacts.insert(c.address);
    rules::validate(cfg.auto_reply, cfg.groups, cfg.profiles);
    for (const auto& e : cfg.events) {
        if (e.fire_at < 0)
            throw ConfigError("event '" + e.title + "' has no 'at' time");
        for (const auto& g : e.group_titles)
            if (!cfg.groups.count(g))
                throw ConfigError("event '" + e.title + "' names unknown group '" + g + "'");
    }
    return cfg;
}

DeviceConfig load_device_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read device config " + path);
    try {
        return parse_device_config(in);
    } catch (const ParseError& e) {
        throw ParseError(0, path + ": " + e.what());
    }
}

} // namespace smsctl
