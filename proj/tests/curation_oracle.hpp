#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "dart/records.hpp"

namespace testutil {

// Independent selection oracle: sort every correct record by the rule tuple
// (largest alpha, then fewest reasoning tokens, then smallest sample index)
// and take the front. Deliberately a different code path from the library's
// single-pass scan.
inline std::optional<dart::GenerationRecord> oracle_select(
    std::vector<dart::GenerationRecord> records,
    const std::map<std::string, bool>& verdicts_by_key) {
    std::vector<dart::GenerationRecord> correct;
    for (const auto& r : records) {
        if (r.finish_reason == dart::FinishReason::ERROR) continue;
        if (verdicts_by_key.at(r.key())) correct.push_back(r);
    }
    if (correct.empty()) return std::nullopt;
    std::sort(correct.begin(), correct.end(),
              [](const dart::GenerationRecord& a, const dart::GenerationRecord& b) {
                  return std::make_tuple(-a.alpha, a.reasoning_tokens, a.sample_index) <
                         std::make_tuple(-b.alpha, b.reasoning_tokens, b.sample_index);
              });
    return correct.front();
}

struct SyntheticSpectrum {
    dart::SpectrumRun run;
    std::map<std::string, bool> verdicts_by_key;
};

// Random spectra with grids up to 6 alphas, up to 5 problems, repetitions up
// to 3, deliberate token-count ties and a sprinkle of ERROR rows.
inline SyntheticSpectrum random_spectrum(std::mt19937& rng) {
    std::uniform_int_distribution<int> grid_size(1, 6);
    std::uniform_int_distribution<int> problem_count(1, 5);
    std::uniform_int_distribution<int> reps(1, 3);
    std::uniform_int_distribution<int> tick(0, 10);
    std::uniform_int_distribution<int> token_choice(1, 4);
    std::bernoulli_distribution verdict(0.45);
    std::bernoulli_distribution error(0.15);

    SyntheticSpectrum s;
    std::vector<double> grid;
    while (grid.size() < static_cast<size_t>(grid_size(rng))) {
        double a = tick(rng) / 10.0;
        if (std::find(grid.begin(), grid.end(), a) == grid.end()) grid.push_back(a);
    }
    std::sort(grid.begin(), grid.end());
    s.run.alpha_grid = grid;
    s.run.repetitions = reps(rng);
    s.run.run_id = "synthetic";

    int n_problems = problem_count(rng);
    for (int p = 0; p < n_problems; ++p) {
        dart::Problem problem;
        problem.id = "p" + std::to_string(p);
        problem.question = "q" + std::to_string(p);
        problem.gold_answer = "g";
        s.run.problems.push_back(problem);
        for (double alpha : grid) {
            for (int rep = 0; rep < s.run.repetitions; ++rep) {
                dart::GenerationRecord r;
                r.problem_id = problem.id;
                r.alpha = alpha;
                r.sample_index = rep;
                // Small token vocabulary forces tie-breaks to matter.
                r.reasoning_tokens = 100 * token_choice(rng);
                r.total_tokens = r.reasoning_tokens + 20;
                r.reasoning_text = "chain " + r.key();
                if (error(rng)) {
                    r.finish_reason = dart::FinishReason::ERROR;
                    s.verdicts_by_key[r.key()] = false;
                } else {
                    s.verdicts_by_key[r.key()] = verdict(rng);
                }
                s.run.records.push_back(std::move(r));
            }
        }
    }
    return s;
}

}  // namespace testutil
