#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dart/records.hpp"

namespace dart::curator {

struct CuratedExample {
    std::string problem_id;
    std::string question;
    std::string gold_answer;
    std::string cot_text;
    double alpha_star = 0.0;
    long long reasoning_tokens = 0;
    std::string provenance;  // key of the winning GenerationRecord
};

enum class ExclusionReason { NO_CORRECT, ALL_ERRORS };

struct ExclusionReport {
    struct Entry {
        std::string problem_id;
        ExclusionReason reason;
    };
    std::vector<Entry> excluded;
};

struct Exclusion {
    ExclusionReason reason;
};

// Selection rule: among verified-correct records pick the largest alpha (the
// most truncation-biased model that still solves it); ties at that alpha go
// to the fewest reasoning tokens, then the smallest sample index. A problem
// with no correct record is excluded: ALL_ERRORS when every attempt was an
// infrastructure failure, NO_CORRECT otherwise.
std::variant<CuratedExample, Exclusion> select_optimal(
    const std::vector<GenerationRecord>& records,
    const std::map<std::string, bool>& verdicts_by_key, const Problem& problem);

struct CurationResult {
    std::vector<CuratedExample> examples;  // problem order of the run
    ExclusionReport exclusions;
    // Difficulty histogram by proxy: how many problems each alpha won.
    std::map<std::string, int> wins_per_alpha;
};

// Applies select_optimal to every attempted problem. Every record must have a
// verdict; a missing one is an error naming the record key.
CurationResult build_adaptive_dataset(const SpectrumRun& run,
                                      const std::map<std::string, bool>& verdicts_by_key);

enum class SftStyle { PLAIN, THINK_WRAPPED };

// Writes {instruction, output} JSONL next to a human-editable training config
// sidecar. THINK_WRAPPED emits "<think>" + cot + "</think>" + gold answer.
void export_sft(const std::vector<CuratedExample>& examples, SftStyle style,
                const std::filesystem::path& dataset_path,
                const std::filesystem::path& sidecar_path);

void write_curated_jsonl(const std::filesystem::path& path,
                         const std::vector<CuratedExample>& examples);
std::vector<CuratedExample> read_curated_jsonl(const std::filesystem::path& path);
void write_exclusion_report(const std::filesystem::path& path, const CurationResult& result);

const char* exclusion_reason_name(ExclusionReason r);

}  // namespace dart::curator
