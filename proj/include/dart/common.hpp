#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dart {

// Base error for everything raised by this toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: config keys, CLI flags, template placeholders, HTTP 4xx.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem and wire-format failures.
class IoError : public Error {
public:
    using Error::Error;
};

// Alphas are rendered with fixed 3-decimal precision everywhere they appear
// in filenames, record keys and reports so that lookups stay stable.
std::string format_alpha(double alpha);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

std::vector<std::string> split(std::string_view s, char sep);

// Parses "a,b,c" into doubles; throws ConfigError on junk.
std::vector<double> parse_double_list(std::string_view csv);

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames so readers never see a torn file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::string iso8601_now();

}  // namespace dart
