#include "dart/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "dart/common.hpp"

namespace dart::gateway {

ThinkSplit split_think(const std::string& raw, const ThinkDelimiters& delims) {
    ThinkSplit out;
    size_t open = raw.find(delims.open);
    if (open == std::string::npos) {
        out.answer = raw;
        return out;
    }
    size_t body = open + delims.open.size();
    size_t close = raw.find(delims.close, body);
    if (close == std::string::npos) {
        out.reasoning = raw.substr(body);
        out.truncated = true;
        return out;
    }
    out.reasoning = raw.substr(body, close - body);
    out.answer = raw.substr(close + delims.close.size());
    return out;
}

long long whitespace_token_count(const std::string& text) {
    long long count = 0;
    bool in_token = false;
    for (char c : text) {
        bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!space && !in_token) ++count;
        in_token = !space;
    }
    return count;
}

namespace {

// The server reports only the completion total; apportion it across the
// think/answer segments by their local counts so ACT can still be derived.
void assign_token_counts(GenerationRecord& r, const std::optional<long long>& usage_total,
                         const TokenCounter& counter) {
    long long local_reasoning = counter(r.reasoning_text);
    long long local_answer = counter(r.answer_text);
    if (usage_total) {
        r.token_source = TokenSource::SERVER_USAGE;
        r.total_tokens = std::max<long long>(*usage_total, 0);
        long long local_sum = local_reasoning + local_answer;
        if (local_sum <= 0) {
            r.reasoning_tokens = 0;
        } else {
            double share = static_cast<double>(local_reasoning) / static_cast<double>(local_sum);
            r.reasoning_tokens = std::llround(share * static_cast<double>(r.total_tokens));
            r.reasoning_tokens = std::clamp<long long>(r.reasoning_tokens, 0, r.total_tokens);
        }
        r.answer_tokens = r.total_tokens - r.reasoning_tokens;
    } else {
        r.token_source = TokenSource::LOCAL_APPROX;
        r.reasoning_tokens = local_reasoning;
        r.answer_tokens = local_answer;
        r.total_tokens = std::max(counter(r.raw_text), local_reasoning);
    }
}

}  // namespace

GenerationRecord generate(const Problem& problem, const EndpointSpec& endpoint, double alpha,
                          const SamplingParams& params, int sample_index,
                          const ChatClient& client, const ThinkDelimiters& delims,
                          const TokenCounter& counter) {
    GenerationRecord r;
    r.problem_id = problem.id;
    r.alpha = alpha;
    r.sample_index = sample_index;
    r.endpoint = endpoint.display();

    ChatResult res = client.complete(endpoint, problem.question, params);
    if (!res.ok) {
        r.finish_reason = FinishReason::ERROR;
        r.token_source = TokenSource::LOCAL_APPROX;
        return r;
    }

    r.raw_text = res.content;
    ThinkSplit parts = split_think(res.content, delims);
    r.reasoning_text = parts.reasoning;
    r.answer_text = parts.answer;
    r.finish_reason =
        res.finish_reason == "length" ? FinishReason::LENGTH : FinishReason::STOP;
    assign_token_counts(r, res.completion_tokens, counter);
    return r;
}

void CompressionTemplate::validate() const {
    for (const char* placeholder : {"{question}", "{answer}", "{long_cot}"}) {
        if (text.find(placeholder) == std::string::npos) {
            throw ConfigError(std::string("compression template missing placeholder ") +
                              placeholder);
        }
    }
}

std::string CompressionTemplate::fill(const std::string& question, const std::string& answer,
                                      const std::string& long_cot) const {
    validate();
    std::string out = text;
    auto replace_all = [&out](const std::string& needle, const std::string& value) {
        size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    };
    replace_all("{question}", question);
    replace_all("{answer}", answer);
    replace_all("{long_cot}", long_cot);
    return out;
}

CompressionTemplate default_compression_template() {
    CompressionTemplate t;
    t.version = "builtin-v1";
    t.text =
        "Rewrite the following solution so it keeps only the essential reasoning steps.\n"
        "Preserve logical correctness and the final answer exactly; remove repetition,\n"
        "dead ends and verbose narration. Reply with the shortened reasoning only.\n"
        "\n"
        "Problem:\n{question}\n"
        "\n"
        "Correct answer: {answer}\n"
        "\n"
        "Original reasoning:\n{long_cot}\n";
    return t;
}

CompressionOutcome compress_cot(const Problem& problem, const std::string& long_cot,
                                const CompressionTemplate& tmpl, const EndpointSpec& teacher,
                                const ChatClient& client,
                                const std::filesystem::path& dataset_path,
                                const TokenCounter& counter) {
    tmpl.validate();
    if (trim(long_cot).empty()) {
        throw Error("compress_cot: empty reasoning chain for problem '" + problem.id + "'");
    }

    SamplingParams params;  // defaults; compression is not length-limited beyond them
    ChatResult res = client.complete(teacher, tmpl.fill(problem.question, problem.gold_answer,
                                                        long_cot),
                                     params);

    CompressionOutcome outcome;
    outcome.long_tokens = counter(long_cot);

    std::string short_cot;
    if (res.ok) {
        // Teachers that think out loud wrap their own reasoning; the
        // compressed chain is whatever follows it.
        ThinkSplit parts = split_think(res.content);
        short_cot = trim(!parts.answer.empty() || parts.reasoning.empty() ? parts.answer
                                                                          : parts.reasoning);
    }
    if (short_cot.empty()) {
        std::fprintf(stderr, "compress_cot: empty teacher reply for '%s', row skipped\n",
                     problem.id.c_str());
        return outcome;
    }

    outcome.kept = true;
    outcome.cot_short = short_cot;
    outcome.short_tokens = counter(short_cot);
    outcome.length_ratio = outcome.long_tokens > 0
                               ? static_cast<double>(outcome.short_tokens) /
                                     static_cast<double>(outcome.long_tokens)
                               : 0.0;

    nlohmann::ordered_json row = {
        {"problem_id", problem.id},
        {"question", problem.question},
        {"gold_answer", problem.gold_answer},
        {"cot_short", outcome.cot_short},
        {"long_tokens", outcome.long_tokens},
        {"short_tokens", outcome.short_tokens},
        {"length_ratio", outcome.length_ratio},
    };
    std::ofstream out(dataset_path, std::ios::app);
    if (!out) throw IoError("cannot open " + dataset_path.string() + " for append");
    out << row.dump() << "\n";
    return outcome;
}

void SpectrumConfig::validate() const {
    params.validate();
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (max_inflight_per_endpoint < 1) throw ConfigError("max_inflight must be >= 1");
    if (alpha_grid.empty()) throw ConfigError("alpha grid is empty");
    for (double a : alpha_grid) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw ConfigError("alpha grid entry out of [0,1]: " + std::to_string(a));
        }
        if (!endpoints.count(format_alpha(a))) {
            throw ConfigError("no endpoint configured for alpha " + format_alpha(a));
        }
    }
}

namespace {

struct Task {
    const Problem* problem;
    double alpha;
    int sample_index;
};

}  // namespace

SpectrumRun run_spectrum(const std::vector<Problem>& problems, const SpectrumConfig& config,
                         const std::filesystem::path& dir, const ChatClient& client,
                         SpectrumSummary* summary) {
    config.validate();
    std::filesystem::create_directories(dir);
    std::filesystem::path records_path = dir / "records.jsonl";
    std::filesystem::path run_path = dir / "run.json";

    SpectrumRun run;
    run.run_id = config.run_id;
    run.alpha_grid = config.alpha_grid;
    run.problems = problems;
    run.repetitions = config.repetitions;
    run.created_at = iso8601_now();

    // Keep the run directory self-contained: curation needs the questions and
    // gold answers long after the original problems file may have moved. The
    // snapshot tracks the current input so resumed runs can grow it.
    std::filesystem::path problems_path = dir / "problems.jsonl";
    {
        std::string content;
        for (const auto& p : problems) {
            content += to_json(p).dump();
            content += "\n";
        }
        atomic_write_file(problems_path, content);
    }

    // Resume: keep whatever a previous attempt already persisted.
    std::set<std::string> done_keys;
    if (std::filesystem::exists(records_path)) {
        run.records = read_records_jsonl(records_path);
        for (const auto& r : run.records) {
            if (!done_keys.insert(r.key()).second) {
                throw Error("duplicate record key on disk: " + r.key());
            }
        }
    }
    if (std::filesystem::exists(run_path)) {
        nlohmann::json j = nlohmann::json::parse(read_text_file(run_path));
        auto old_grid = j.at("alpha_grid").get<std::vector<double>>();
        if (old_grid != config.alpha_grid || j.at("repetitions").get<int>() != config.repetitions) {
            throw ConfigError(dir.string() + ": existing run used a different grid/repetitions");
        }
        run.created_at = j.at("created_at").get<std::string>();
        run.run_id = j.at("run_id").get<std::string>();
    } else {
        nlohmann::json j = {
            {"run_id", run.run_id},
            {"alpha_grid", run.alpha_grid},
            {"repetitions", run.repetitions},
            {"created_at", run.created_at},
        };
        atomic_write_file(run_path, j.dump(2) + "\n");
    }

    SpectrumSummary local_summary;
    local_summary.attempted = problems.size() * config.alpha_grid.size() *
                              static_cast<size_t>(config.repetitions);

    // Group work per endpoint so the in-flight bound applies per endpoint.
    std::map<std::string, std::vector<Task>> tasks_by_alpha;
    for (double alpha : config.alpha_grid) {
        auto& bucket = tasks_by_alpha[format_alpha(alpha)];
        for (const auto& p : problems) {
            for (int s = 0; s < config.repetitions; ++s) {
                GenerationRecord probe;
                probe.problem_id = p.id;
                probe.alpha = alpha;
                probe.sample_index = s;
                if (done_keys.count(probe.key())) {
                    ++local_summary.resumed_existing;
                    continue;
                }
                bucket.push_back({&p, alpha, s});
            }
        }
    }

    std::mutex write_mutex;  // single serialized writer for records.jsonl
    std::exception_ptr first_error;
    std::atomic<bool> abort{false};
    for (auto& [alpha_key, tasks] : tasks_by_alpha) {
        local_summary.errors_per_alpha[alpha_key] += 0;
        if (tasks.empty() || abort.load()) continue;
        const EndpointSpec& endpoint = config.endpoints.at(alpha_key);
        std::atomic<size_t> next{0};
        std::atomic<size_t> errors{0};
        size_t workers = std::min<size_t>(tasks.size(),
                                          static_cast<size_t>(config.max_inflight_per_endpoint));
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                while (!abort.load()) {
                    size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) break;
                    const Task& task = tasks[i];
                    try {
                        GenerationRecord r = generate(*task.problem, endpoint, task.alpha,
                                                      config.params, task.sample_index, client,
                                                      config.delims);
                        if (r.finish_reason == FinishReason::ERROR) errors.fetch_add(1);
                        std::lock_guard<std::mutex> lock(write_mutex);
                        append_record_jsonl(records_path, r);
                        run.records.push_back(std::move(r));
                    } catch (...) {
                        // Configuration and IO errors abort the whole run;
                        // transport trouble never reaches here (it becomes an
                        // ERROR record instead).
                        std::lock_guard<std::mutex> lock(write_mutex);
                        if (!first_error) first_error = std::current_exception();
                        abort.store(true);
                        break;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        local_summary.errors_per_alpha[alpha_key] += errors.load();
    }
    if (first_error) std::rethrow_exception(first_error);

    // Stable order for callers; file order reflects completion order instead.
    std::sort(run.records.begin(), run.records.end(),
              [](const GenerationRecord& a, const GenerationRecord& b) {
                  return a.key() < b.key();
              });

    if (summary) *summary = local_summary;
    return run;
}

SpectrumRun load_spectrum_run(const std::filesystem::path& dir) {
    std::filesystem::path run_path = dir / "run.json";
    nlohmann::json j = nlohmann::json::parse(read_text_file(run_path));
    SpectrumRun run;
    run.run_id = j.at("run_id").get<std::string>();
    run.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    run.repetitions = j.at("repetitions").get<int>();
    run.created_at = j.at("created_at").get<std::string>();
    std::filesystem::path problems_path = dir / "problems.jsonl";
    if (std::filesystem::exists(problems_path)) {
        run.problems = read_problems_jsonl(problems_path);
    }
    std::filesystem::path records_path = dir / "records.jsonl";
    if (std::filesystem::exists(records_path)) {
        run.records = read_records_jsonl(records_path);
        std::sort(run.records.begin(), run.records.end(),
                  [](const GenerationRecord& a, const GenerationRecord& b) {
                      return a.key() < b.key();
                  });
        std::set<std::string> grid_keys;
        for (double a : run.alpha_grid) grid_keys.insert(format_alpha(a));
        for (const auto& r : run.records) {
            if (!grid_keys.count(format_alpha(r.alpha))) {
                throw IoError(records_path.string() + ": record " + r.key() +
                              " has an alpha outside the run grid");
            }
        }
    }
    return run;
}

}  // namespace dart::gateway
