#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dart/common.hpp"

namespace dart::pipeline {

// Flat view over an INI-style file: "[section]" headers, "key = value" lines,
// '#' comments. Keys are addressed as "section.key".
class Config {
public:
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text);

    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;  // throws ConfigError

    double get_double_or(const std::string& key, double fallback) const;
    int get_int_or(const std::string& key, int fallback) const;

    // CLI flags override config keys.
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }

    const std::map<std::string, std::string>& entries() const { return entries_; }

    // Sorted "key = value" lines; the basis of the config hash.
    std::string canonical() const;

private:
    std::map<std::string, std::string> entries_;
};

struct Finding {
    std::string key;
    std::string message;
};

// Non-throwing config lint: unknown keys, grid alphas out of [0,1], grid
// alphas without an endpoint, epsilon out of range, and similar. An empty
// result means the config is runnable.
std::vector<Finding> validate_config(const Config& config);

// Parses "0.000=http://host|model;0.500=..." endpoint maps.
std::map<std::string, std::string> parse_endpoint_map(const std::string& text);

}  // namespace dart::pipeline
