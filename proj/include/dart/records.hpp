#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dart {

enum class ProblemSource { GSM8K, MATH, AMC23, OLYMPIAD, AIME25, OTHER };

const char* problem_source_name(ProblemSource s);
ProblemSource problem_source_from_name(const std::string& name);

struct Problem {
    std::string id;
    std::string question;
    std::string gold_answer;
    ProblemSource source = ProblemSource::OTHER;
};

struct SamplingParams {
    double temperature = 0.6;
    int max_tokens = 32768;
    double top_p = 0.95;
    std::optional<long long> seed;

    void validate() const;  // throws ConfigError
};

enum class TokenSource { SERVER_USAGE, LOCAL_APPROX };
enum class FinishReason { STOP, LENGTH, ERROR };

const char* token_source_name(TokenSource s);
const char* finish_reason_name(FinishReason r);
TokenSource token_source_from_name(const std::string& name);
FinishReason finish_reason_from_name(const std::string& name);

struct GenerationRecord {
    std::string problem_id;
    double alpha = 0.0;
    int sample_index = 0;
    std::string raw_text;
    std::string reasoning_text;
    std::string answer_text;
    long long reasoning_tokens = 0;
    long long answer_tokens = 0;
    long long total_tokens = 0;
    TokenSource token_source = TokenSource::LOCAL_APPROX;
    std::string endpoint;
    FinishReason finish_reason = FinishReason::STOP;

    // "problem_id|alpha3dp|sample_index"; stable across completion orders.
    std::string key() const;
};

struct SpectrumRun {
    std::string run_id;
    std::vector<double> alpha_grid;
    std::vector<Problem> problems;
    std::vector<GenerationRecord> records;
    std::string created_at;
    int repetitions = 1;

    const Problem* find_problem(const std::string& id) const;
};

nlohmann::ordered_json to_json(const Problem& p);
Problem problem_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const GenerationRecord& r);
GenerationRecord record_from_json(const nlohmann::json& j);

std::vector<Problem> read_problems_jsonl(const std::filesystem::path& path);
std::vector<GenerationRecord> read_records_jsonl(const std::filesystem::path& path);
void append_record_jsonl(const std::filesystem::path& path, const GenerationRecord& r);

// Per-problem verdicts keyed by GenerationRecord::key().
struct Verdict {
    std::string problem_id;
    double alpha = 0.0;
    int sample_index = 0;
    bool correct = false;

    std::string key() const;
};

std::vector<Verdict> read_verdicts_jsonl(const std::filesystem::path& path);
void write_verdicts_jsonl(const std::filesystem::path& path, const std::vector<Verdict>& v);

}  // namespace dart
