#include "dart/curator.hpp"

#include <algorithm>
#include <set>

#include "dart/common.hpp"

namespace dart::curator {

const char* exclusion_reason_name(ExclusionReason r) {
    return r == ExclusionReason::NO_CORRECT ? "NO_CORRECT" : "ALL_ERRORS";
}

std::variant<CuratedExample, Exclusion> select_optimal(
    const std::vector<GenerationRecord>& records,
    const std::map<std::string, bool>& verdicts_by_key, const Problem& problem) {
    if (records.empty()) throw Error("select_optimal: no records for problem");

    const GenerationRecord* winner = nullptr;
    bool all_errors = true;
    for (const auto& r : records) {
        if (r.problem_id != records.front().problem_id) {
            throw Error("select_optimal: mixed problem ids (" + records.front().problem_id +
                        " vs " + r.problem_id + ")");
        }
        if (r.finish_reason != FinishReason::ERROR) all_errors = false;

        auto it = verdicts_by_key.find(r.key());
        if (it == verdicts_by_key.end()) {
            throw Error("select_optimal: missing verdict for record " + r.key());
        }
        // ERROR rows can never be correct; treat a stray true as incorrect.
        bool correct = it->second && r.finish_reason != FinishReason::ERROR;
        if (!correct) continue;

        if (!winner) {
            winner = &r;
            continue;
        }
        if (r.alpha != winner->alpha) {
            if (r.alpha > winner->alpha) winner = &r;
        } else if (r.reasoning_tokens != winner->reasoning_tokens) {
            if (r.reasoning_tokens < winner->reasoning_tokens) winner = &r;
        } else if (r.sample_index < winner->sample_index) {
            winner = &r;
        }
    }

    if (!winner) {
        return Exclusion{all_errors ? ExclusionReason::ALL_ERRORS : ExclusionReason::NO_CORRECT};
    }

    CuratedExample ex;
    ex.problem_id = winner->problem_id;
    ex.question = problem.question;
    ex.gold_answer = problem.gold_answer;
    ex.cot_text = winner->reasoning_text;
    ex.alpha_star = winner->alpha;
    ex.reasoning_tokens = winner->reasoning_tokens;
    ex.provenance = winner->key();
    return ex;
}

CurationResult build_adaptive_dataset(const SpectrumRun& run,
                                      const std::map<std::string, bool>& verdicts_by_key) {
    CurationResult result;

    std::set<std::string> known_ids;
    for (const auto& p : run.problems) known_ids.insert(p.id);
    std::map<std::string, std::vector<GenerationRecord>> by_problem;
    for (const auto& r : run.records) {
        if (!known_ids.count(r.problem_id)) {
            throw Error("record references unknown problem '" + r.problem_id + "'");
        }
        by_problem[r.problem_id].push_back(r);
    }

    for (const auto& problem : run.problems) {
        auto it = by_problem.find(problem.id);
        if (it == by_problem.end()) continue;  // nothing attempted for it
        auto outcome = select_optimal(it->second, verdicts_by_key, problem);
        if (std::holds_alternative<CuratedExample>(outcome)) {
            CuratedExample ex = std::get<CuratedExample>(std::move(outcome));
            result.wins_per_alpha[format_alpha(ex.alpha_star)] += 1;
            result.examples.push_back(std::move(ex));
        } else {
            result.exclusions.excluded.push_back(
                {problem.id, std::get<Exclusion>(outcome).reason});
        }
    }
    return result;
}

void export_sft(const std::vector<CuratedExample>& examples, SftStyle style,
                const std::filesystem::path& dataset_path,
                const std::filesystem::path& sidecar_path) {
    if (examples.empty()) throw Error("export_sft: no curated examples to export");

    std::string content;
    for (const auto& ex : examples) {
        std::string output;
        if (style == SftStyle::THINK_WRAPPED) {
            output = "<think>" + ex.cot_text + "</think>" + ex.gold_answer;
        } else {
            output = ex.cot_text + "\n" + ex.gold_answer;
        }
        nlohmann::ordered_json row = {{"instruction", ex.question}, {"output", output}};
        content += row.dump();
        content += "\n";
    }
    atomic_write_file(dataset_path, content);

    // Editable key-value sidecar with the training hyperparameters a
    // downstream SFT job should start from.
    std::string sidecar =
        "# supervised fine-tuning configuration for the exported dataset\n"
        "# edit freely; the exporter only seeds defaults\n"
        "finetuning_type = lora\n"
        "lora_rank = 256\n"
        "lora_alpha = 16\n"
        "lora_target = all\n"
        "learning_rate = 2e-5\n"
        "lr_scheduler = cosine\n"
        "warmup_ratio = 0.1\n"
        "cutoff_length = 32768\n"
        "num_epochs = 3\n"
        "precision = bf16\n"
        "per_device_batch_size = 1\n"
        "gradient_accumulation = 8\n"
        "max_samples = 15000\n"
        "validation_split = 0.1\n"
        "eval_steps = 200\n"
        "optimizer = adamw_torch\n"
        "prompt_template = qwen3\n";
    atomic_write_file(sidecar_path, sidecar);
}

void write_curated_jsonl(const std::filesystem::path& path,
                         const std::vector<CuratedExample>& examples) {
    std::string content;
    for (const auto& ex : examples) {
        nlohmann::ordered_json row = {
            {"problem_id", ex.problem_id},
            {"question", ex.question},
            {"gold_answer", ex.gold_answer},
            {"cot_text", ex.cot_text},
            {"alpha_star", ex.alpha_star},
            {"reasoning_tokens", ex.reasoning_tokens},
        };
        content += row.dump();
        content += "\n";
    }
    atomic_write_file(path, content);
}

std::vector<CuratedExample> read_curated_jsonl(const std::filesystem::path& path) {
    std::vector<CuratedExample> out;
    std::string text = read_text_file(path);
    for (const auto& line : split(text, '\n')) {
        std::string t = trim(line);
        if (t.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(t);
        CuratedExample ex;
        ex.problem_id = j.at("problem_id").get<std::string>();
        ex.question = j.at("question").get<std::string>();
        ex.gold_answer = j.at("gold_answer").get<std::string>();
        ex.cot_text = j.at("cot_text").get<std::string>();
        ex.alpha_star = j.at("alpha_star").get<double>();
        ex.reasoning_tokens = j.at("reasoning_tokens").get<long long>();
        out.push_back(std::move(ex));
    }
    return out;
}

void write_exclusion_report(const std::filesystem::path& path, const CurationResult& result) {
    nlohmann::json j;
    j["excluded"] = nlohmann::json::array();
    for (const auto& e : result.exclusions.excluded) {
        j["excluded"].push_back(
            {{"problem_id", e.problem_id}, {"reason", exclusion_reason_name(e.reason)}});
    }
    j["curated_count"] = result.examples.size();
    j["wins_per_alpha"] = result.wins_per_alpha;
    nlohmann::json winners = nlohmann::json::object();
    for (const auto& ex : result.examples) winners[ex.problem_id] = ex.provenance;
    j["winning_records"] = winners;
    atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace dart::curator
