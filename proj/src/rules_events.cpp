#include "smsctl/rules_events.hpp"

#include "smsctl/calendar.hpp"
#include "smsctl/error.hpp"

#include <algorithm>

namespace smsctl::rules {

std::string to_string(ReportCause cause)
{
    switch (cause) {
    case ReportCause::AutoReply: return "auto-reply";
    case ReportCause::Event: return "event";
    case ReportCause::Birthday: return "birthday";
    }
    return "?";
}

void validate(const AutoReplyState& state, const GroupStore& groups, const ProfileStore& profiles)
{
    for (const auto& [group, profile] : state.group_bindings) {
        if (!groups.count(group))
            throw ConfigError("auto-reply binding names unknown group '" + group + "'");
        if (!profiles.count(profile))
            throw ConfigError("group '" + group + "' is bound to unknown profile '" + profile + "'");
    }
    if (state.active_profile && !profiles.count(*state.active_profile))
        throw ConfigError("active profile '" + *state.active_profile + "' does not exist");
}

void add_event(EventStore& events, EventSpec spec, Timestamp now)
{
    if (spec.fire_at <= now)
        throw ValidationError("event '" + spec.title + "' is not in the future");
    if (spec.group_titles.empty() && spec.extra_numbers.empty())
        throw ValidationError("event '" + spec.title + "' has no recipients");
    if (events.count(spec.title))
        throw ValidationError("duplicate event '" + spec.title + "'");
    if (spec.recurrence == Recurrence::Yearly && !spec.anniversary) {
        const auto d = calendar::date_of(spec.fire_at);
        spec.anniversary = std::chrono::month_day{d.month(), d.day()};
    }
    auto key = spec.title;
    events.emplace(std::move(key), std::move(spec));
}

std::optional<std::string> resolve_auto_reply(const std::string& sender, const AutoReplyState& state,
                                              const GroupStore& groups, const ProfileStore& profiles)
{
    if (!state.enabled)
        return std::nullopt;
    const auto who = canonicalize_address(sender);
    // group_bindings is title-ordered, so the first hit is the smallest title.
    for (const auto& [group, profile] : state.group_bindings) {
        auto g = groups.find(group);
        if (g != groups.end() && g->second.members.count(who)) {
            if (auto p = profiles.find(profile); p != profiles.end())
                return p->second.reply_text;
        }
    }
    if (state.active_profile) {
        if (auto p = profiles.find(*state.active_profile); p != profiles.end())
            return p->second.reply_text;
    }
    return state.default_reply;
}

void sync_birthdays(const std::vector<Contact>& contacts, EventStore& events,
                    const std::optional<std::string>& birthday_message, Timestamp now)
{
    const std::string message = birthday_message.value_or(default_birthday_wish);
    const auto tod = birthday_hour * calendar::ms_per_hour;
    for (const auto& c : contacts) {
        if (!c.birthday)
            continue;
        const auto title = "birthday:" + canonicalize_address(c.address);
        auto it = events.find(title);
        if (it != events.end()) {
            auto& e = it->second;
            e.message = message;
            if (e.anniversary != c.birthday) {
                e.anniversary = c.birthday;
                e.fire_at = calendar::next_anniversary(*c.birthday, tod, now);
            }
            continue;
        }
        EventSpec e;
        e.title = title;
        e.fire_at = calendar::next_anniversary(*c.birthday, tod, now);
        e.message = message;
        e.extra_numbers = {canonicalize_address(c.address)};
        e.recurrence = Recurrence::Yearly;
        e.cause = ReportCause::Birthday;
        e.anniversary = c.birthday;
        events.emplace(title, std::move(e));
    }
}

std::vector<OutgoingSms> tick(Timestamp now, EventStore& events, const GroupStore& groups, AutoMessageReport& report)
{
    std::vector<OutgoingSms> out;
    for (auto& [title, e] : events) {
        if (e.fired || e.fire_at > now)
            continue;
        std::set<std::string> recipients;
        for (const auto& g : e.group_titles) {
            if (auto it = groups.find(g); it != groups.end())
                recipients.insert(it->second.members.begin(), it->second.members.end());
        }
        for (const auto& n : e.extra_numbers)
            recipients.insert(canonicalize_address(n));
        for (const auto& to : recipients) {
            out.push_back(OutgoingSms{to, e.message, e.cause});
            report.append(ReportEntry{now, to, e.message, e.cause});
        }
        if (e.recurrence == Recurrence::Once) {
            e.fired = true;
        } else {
            // Missed years are skipped; one dispatch per tick.
            const auto md = e.anniversary.value_or(std::chrono::month_day{calendar::date_of(e.fire_at).month(),
                                                                          calendar::date_of(e.fire_at).day()});
            e.fire_at = calendar::next_anniversary(md, calendar::time_of_day(e.fire_at), now);
        }
    }
    return out;
}

namespace {

std::string one_line(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '\t')
            out += "\\t";
        else if (c == '\n')
            out += "\\n";
        else
            out += c;
    }
    return out;
}

} // namespace

std::string generate_report(const AutoMessageReport& report, Timestamp from, Timestamp to)
{
    std::vector<const ReportEntry*> rows;
    for (const auto& e : report.entries())
        if (e.at >= from && e.at <= to)
            rows.push_back(&e);
    std::stable_sort(rows.begin(), rows.end(), [](const ReportEntry* a, const ReportEntry* b) { return a->at < b->at; });
    std::string out = "timestamp\trecipient\tcause\ttext\n";
    for (const auto* e : rows) {
        out += calendar::format_iso(e->at);
        out += '\t';
        out += e->recipient;
        out += '\t';
        out += to_string(e->cause);
        out += '\t';
        out += one_line(e->text);
        out += '\n';
    }
    return out;
}

bool RulesState::is_own_reply_text(const std::string& body) const
{
    if (body == auto_reply.default_reply)
        return true;
    return std::any_of(profiles.begin(), profiles.end(),
                       [&](const auto& p) { return p.second.reply_text == body; });
}

std::vector<OutgoingSms> on_incoming(const SmsMessage& msg, bool classified_spam, RulesState& state, Timestamp now)
{
    if (msg.kind != MessageKind::Normal || classified_spam)
        return {};
    if (state.is_own_reply_text(msg.body))
        return {};
    const auto sender = canonicalize_address(msg.sender);
    if (auto it = state.last_reply.find(sender);
        it != state.last_reply.end() && now - it->second < state.auto_reply.reply_window)
        return {};
    auto reply = resolve_auto_reply(sender, state.auto_reply, state.groups, state.profiles);
    if (!reply)
        return {};
    state.last_reply[sender] = now;
    state.report.append(ReportEntry{now, sender, *reply, ReportCause::AutoReply});
    return {OutgoingSms{sender, *reply, ReportCause::AutoReply}};
}

} // namespace smsctl::rules
