#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dart/records.hpp"

namespace dart::metrics {

// Pass@1 / ACT / AAT for one method on one dataset. ACT and AAT may be absent
// when a method does not report chain token counts; those cells render as "-".
struct MethodStats {
    std::string method;
    std::string dataset;
    double pass_at_1 = 0.0;  // fraction in [0,1]
    std::optional<double> act;
    std::optional<double> aat;
    int n = 1;
};

struct Delta {
    double pass_delta_points = 0.0;       // (method - base) * 100
    std::optional<double> act_reduction;  // (base - method) / base
    std::optional<double> aat_reduction;
    std::optional<double> act_speedup;  // base / method
};

double pass_at_1(const std::vector<bool>& verdicts);  // throws on empty input

enum class Segment { REASONING, TOTAL };

struct TokenMean {
    double mean = 0.0;
    int covered = 0;   // records included in the mean
    int excluded = 0;  // ERROR records left out
};

// Mean token count over non-ERROR records; ERROR rows are excluded from the
// mean but surfaced through `excluded` so coverage is never silent.
TokenMean avg_tokens(const std::vector<GenerationRecord>& records, Segment segment);

// Requires matching datasets and nonzero ACT/AAT on both sides where present.
Delta compare(const MethodStats& base, const MethodStats& method);

// Table-1-style rendering helpers: percentages to 1 decimal (half away from
// zero), pass deltas to 1 decimal in points, speedups to 2 decimals.
double round_half_away(double v, int decimals);
std::string format_signed_pct(double reduction);   // reduction 0.68 -> "(-68.0%)"
std::string format_pass_delta(double points);      // "(+0.4)" / "(-1.3)"
std::string format_speedup(double speedup);        // "5.33x"

// One baseline plus any number of methods, grouped by dataset. Emits a
// machine-readable JSON report and an aligned text table with parenthesized
// delta rows under each non-baseline method.
void render_report(const std::vector<MethodStats>& stats, const std::string& baseline_method,
                   const std::filesystem::path& json_path,
                   const std::filesystem::path& text_path);

}  // namespace dart::metrics
