#include "dart/config.hpp"

#include <set>

#include "dart/common.hpp"

namespace dart::pipeline {

Config Config::parse_file(const std::filesystem::path& path) {
    return parse_string(read_text_file(path));
}

Config Config::parse_string(const std::string& text) {
    Config config;
    std::string section;
    size_t line_no = 0;
    for (const auto& raw_line : split(text, '\n')) {
        ++line_no;
        std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            }
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        std::string full = section.empty() ? key : section + "." + key;
        config.entries_[full] = value;
    }
    return config;
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

std::string Config::require(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing required config key '" + key + "'");
    return *v;
}

double Config::get_double_or(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not a number: '" + *v + "'");
    }
}

int Config::get_int_or(const std::string& key, int fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return std::stoi(*v);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' is not an integer: '" + *v + "'");
    }
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::map<std::string, std::string> parse_endpoint_map(const std::string& text) {
    std::map<std::string, std::string> out;
    for (const auto& part : split(text, ';')) {
        std::string entry = trim(part);
        if (entry.empty()) continue;
        size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("endpoint map entry needs alpha=url form: '" + entry + "'");
        }
        std::string alpha_text = trim(entry.substr(0, eq));
        double alpha = 0.0;
        try {
            alpha = std::stod(alpha_text);
        } catch (const std::exception&) {
            throw ConfigError("endpoint map alpha is not a number: '" + alpha_text + "'");
        }
        out[format_alpha(alpha)] = trim(entry.substr(eq + 1));
    }
    return out;
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "run.id",
        "fusion.base",
        "fusion.distilled",
        "fusion.grid",
        "fusion.allow_nonfinite",
        "generation.problems",
        "generation.endpoints",
        "generation.repetitions",
        "generation.temperature",
        "generation.top_p",
        "generation.max_tokens",
        "generation.seed",
        "generation.max_inflight",
        "generation.think_open",
        "generation.think_close",
        "curation.style",
        "curation.out",
        "metrics.baseline",
        "analysis.bins",
        "analysis.epsilon",
    };
    return keys;
}

}  // namespace

std::vector<Finding> validate_config(const Config& config) {
    std::vector<Finding> findings;
    auto flag = [&](const std::string& key, const std::string& message) {
        findings.push_back({key, message});
    };

    for (const auto& [key, value] : config.entries()) {
        if (!known_keys().count(key)) flag(key, "unknown key");
    }

    std::vector<double> grid;
    if (auto grid_text = config.get("fusion.grid")) {
        try {
            grid = parse_double_list(*grid_text);
        } catch (const ConfigError& e) {
            flag("fusion.grid", e.what());
        }
        double prev = -1.0;
        for (double a : grid) {
            if (!(a >= 0.0 && a <= 1.0)) {
                flag("fusion.grid", "alpha " + format_alpha(a) + " out of [0,1]");
            }
            if (a <= prev) {
                flag("fusion.grid", "grid must be sorted strictly increasing");
                break;
            }
            prev = a;
        }
    }

    if (auto endpoints_text = config.get("generation.endpoints")) {
        try {
            auto endpoint_map = parse_endpoint_map(*endpoints_text);
            for (double a : grid) {
                if (!endpoint_map.count(format_alpha(a))) {
                    flag("generation.endpoints",
                         "no endpoint for grid alpha " + format_alpha(a));
                }
            }
        } catch (const ConfigError& e) {
            flag("generation.endpoints", e.what());
        }
    }

    if (auto reps = config.get("generation.repetitions")) {
        try {
            if (std::stoi(*reps) < 1) flag("generation.repetitions", "must be >= 1");
        } catch (const std::exception&) {
            flag("generation.repetitions", "not an integer: '" + *reps + "'");
        }
    }

    if (auto style = config.get("curation.style")) {
        if (*style != "think" && *style != "plain") {
            flag("curation.style", "must be 'think' or 'plain', got '" + *style + "'");
        }
    }

    if (auto eps = config.get("analysis.epsilon")) {
        try {
            double e = std::stod(*eps);
            if (!(e > 0.0 && e < 1.0)) flag("analysis.epsilon", "must be in (0,1)");
        } catch (const std::exception&) {
            flag("analysis.epsilon", "not a number: '" + *eps + "'");
        }
    }

    if (auto bins = config.get("analysis.bins")) {
        try {
            if (std::stoi(*bins) < 1) flag("analysis.bins", "must be >= 1");
        } catch (const std::exception&) {
            flag("analysis.bins", "not an integer: '" + *bins + "'");
        }
    }

    return findings;
}

}  // namespace dart::pipeline
