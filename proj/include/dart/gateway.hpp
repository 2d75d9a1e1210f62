#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dart/openai_client.hpp"
#include "dart/records.hpp"

namespace dart::gateway {

struct ThinkDelimiters {
    std::string open = "<think>";
    std::string close = "</think>";
};

struct ThinkSplit {
    std::string reasoning;
    std::string answer;
    bool truncated = false;  // opening delimiter without a matching close
};

// Text inside the first well-formed delimiter pair is reasoning, the rest of
// the output is the answer. No delimiters: everything is answer (keeps ACT a
// lower bound). Unclosed: everything after the open tag is reasoning, flagged.
ThinkSplit split_think(const std::string& raw, const ThinkDelimiters& delims = {});

using TokenCounter = std::function<long long(const std::string&)>;

// Whitespace-split token count: the clearly-approximate LOCAL_APPROX fallback
// for servers that do not report usage.
long long whitespace_token_count(const std::string& text);

// One chat completion turned into a GenerationRecord. Never drops a row:
// transport failures after retries come back as finish_reason=ERROR.
GenerationRecord generate(const Problem& problem, const EndpointSpec& endpoint, double alpha,
                          const SamplingParams& params, int sample_index,
                          const ChatClient& client, const ThinkDelimiters& delims = {},
                          const TokenCounter& counter = whitespace_token_count);

// Prompt template for chain compression. The default template is a versioned
// stand-in; runs record which template produced their dataset.
struct CompressionTemplate {
    std::string text;
    std::string version;

    void validate() const;  // throws ConfigError when a placeholder is missing
    std::string fill(const std::string& question, const std::string& answer,
                     const std::string& long_cot) const;
};

CompressionTemplate default_compression_template();

struct CompressionOutcome {
    bool kept = false;
    std::string cot_short;
    long long long_tokens = 0;
    long long short_tokens = 0;
    double length_ratio = 0.0;  // short / long
};

// Asks the teacher endpoint for a shortened chain and appends the resulting
// row (question, gold answer, short chain, length ratio) to the dataset file.
// An empty teacher reply skips the row and logs; it never aborts the batch.
CompressionOutcome compress_cot(const Problem& problem, const std::string& long_cot,
                                const CompressionTemplate& tmpl, const EndpointSpec& teacher,
                                const ChatClient& client,
                                const std::filesystem::path& dataset_path,
                                const TokenCounter& counter = whitespace_token_count);

struct SpectrumConfig {
    std::vector<double> alpha_grid;
    std::map<std::string, EndpointSpec> endpoints;  // keyed by format_alpha(alpha)
    SamplingParams params;
    int repetitions = 1;
    int max_inflight_per_endpoint = 8;
    ThinkDelimiters delims;
    std::string run_id = "run";

    void validate() const;
};

struct SpectrumSummary {
    size_t attempted = 0;         // |problems| x |grid| x repetitions
    size_t resumed_existing = 0;  // keys already on disk from a previous run
    std::map<std::string, size_t> errors_per_alpha;
};

// Generates |problems| x |grid| x repetitions records, bounded in-flight per
// endpoint, persisting each record through a single serialized writer as soon
// as it lands. Restartable: records already in <dir>/records.jsonl are kept
// and their keys skipped, so a crashed run resumes without duplicates.
SpectrumRun run_spectrum(const std::vector<Problem>& problems, const SpectrumConfig& config,
                         const std::filesystem::path& dir, const ChatClient& client,
                         SpectrumSummary* summary = nullptr);

// Loads a persisted run directory (run.json + records.jsonl).
SpectrumRun load_spectrum_run(const std::filesystem::path& dir);

}  // namespace dart::gateway
