#pragma once

// Per-device settings file: spam prefilter, auto-reply profiles and groups,
// contacts with birthdays and scheduled events.
//
//   # comment
//   [device]            nick, learn
//   [spam]              blacklist, specific, unknown, weird
//   [autoreply]         enabled, default_reply, active_profile, window_minutes
//   [profile <title>]   reply
//   [group <title>]     members, profile
//   [contact <address>] name, birthday (YYYY-MM-DD or MM-DD)
//   [birthday]          message
//   [event <title>]     at, recurrence (once|yearly), groups, numbers, message
//
// Entries are "key = value"; lists are comma separated; a value in double quotes
// keeps surrounding spaces and may use \" \\ \n \t escapes.

#include "smsctl/preprocess.hpp"
#include "smsctl/rules_events.hpp"

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace smsctl {

struct DeviceConfig {
    std::optional<std::string> nick;
    bool learn = true; // enhance the ontology from messages classified as spam
    preprocess::SpamPrefilterConfig prefilter;
    rules::AutoReplyState auto_reply;
    rules::GroupStore groups;
    rules::ProfileStore profiles;
    std::vector<rules::Contact> contacts;
    std::optional<std::string> birthday_message;
    std::vector<rules::EventSpec> events; // validated against the clock when installed
};

// Throws ParseError for malformed lines and ConfigError for dangling references.
DeviceConfig parse_device_config(std::istream& in);
DeviceConfig load_device_config_file(const std::string& path);

} // namespace smsctl
