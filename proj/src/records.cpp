#include "dart/records.hpp"

#include <fstream>
#include <set>

#include "dart/common.hpp"

namespace dart {

const char* problem_source_name(ProblemSource s) {
    switch (s) {
        case ProblemSource::GSM8K: return "GSM8K";
        case ProblemSource::MATH: return "MATH";
        case ProblemSource::AMC23: return "AMC23";
        case ProblemSource::OLYMPIAD: return "OLYMPIAD";
        case ProblemSource::AIME25: return "AIME25";
        case ProblemSource::OTHER: return "OTHER";
    }
    return "OTHER";
}

ProblemSource problem_source_from_name(const std::string& name) {
    if (name == "GSM8K") return ProblemSource::GSM8K;
    if (name == "MATH") return ProblemSource::MATH;
    if (name == "AMC23") return ProblemSource::AMC23;
    if (name == "OLYMPIAD") return ProblemSource::OLYMPIAD;
    if (name == "AIME25") return ProblemSource::AIME25;
    return ProblemSource::OTHER;
}

void SamplingParams::validate() const {
    if (temperature < 0) throw ConfigError("temperature must be >= 0");
    if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0,1]");
}

const char* token_source_name(TokenSource s) {
    return s == TokenSource::SERVER_USAGE ? "SERVER_USAGE" : "LOCAL_APPROX";
}

const char* finish_reason_name(FinishReason r) {
    switch (r) {
        case FinishReason::STOP: return "STOP";
        case FinishReason::LENGTH: return "LENGTH";
        case FinishReason::ERROR: return "ERROR";
    }
    return "STOP";
}

TokenSource token_source_from_name(const std::string& name) {
    if (name == "SERVER_USAGE") return TokenSource::SERVER_USAGE;
    if (name == "LOCAL_APPROX") return TokenSource::LOCAL_APPROX;
    throw IoError("unknown token_source '" + name + "'");
}

FinishReason finish_reason_from_name(const std::string& name) {
    if (name == "STOP") return FinishReason::STOP;
    if (name == "LENGTH") return FinishReason::LENGTH;
    if (name == "ERROR") return FinishReason::ERROR;
    throw IoError("unknown finish_reason '" + name + "'");
}

std::string GenerationRecord::key() const {
    return problem_id + "|" + format_alpha(alpha) + "|" + std::to_string(sample_index);
}

std::string Verdict::key() const {
    return problem_id + "|" + format_alpha(alpha) + "|" + std::to_string(sample_index);
}

const Problem* SpectrumRun::find_problem(const std::string& id) const {
    for (const auto& p : problems) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

nlohmann::ordered_json to_json(const Problem& p) {
    return {
        {"id", p.id},
        {"question", p.question},
        {"gold_answer", p.gold_answer},
        {"source", problem_source_name(p.source)},
    };
}

Problem problem_from_json(const nlohmann::json& j) {
    Problem p;
    p.id = j.at("id").get<std::string>();
    p.question = j.at("question").get<std::string>();
    p.gold_answer = j.at("gold_answer").get<std::string>();
    p.source = problem_source_from_name(j.value("source", "OTHER"));
    return p;
}

nlohmann::ordered_json to_json(const GenerationRecord& r) {
    return {
        {"problem_id", r.problem_id},
        {"alpha", r.alpha},
        {"sample_index", r.sample_index},
        {"raw_text", r.raw_text},
        {"reasoning_text", r.reasoning_text},
        {"answer_text", r.answer_text},
        {"reasoning_tokens", r.reasoning_tokens},
        {"answer_tokens", r.answer_tokens},
        {"total_tokens", r.total_tokens},
        {"token_source", token_source_name(r.token_source)},
        {"endpoint", r.endpoint},
        {"finish_reason", finish_reason_name(r.finish_reason)},
    };
}

GenerationRecord record_from_json(const nlohmann::json& j) {
    GenerationRecord r;
    r.problem_id = j.at("problem_id").get<std::string>();
    r.alpha = j.at("alpha").get<double>();
    r.sample_index = j.at("sample_index").get<int>();
    r.raw_text = j.at("raw_text").get<std::string>();
    r.reasoning_text = j.at("reasoning_text").get<std::string>();
    r.answer_text = j.at("answer_text").get<std::string>();
    r.reasoning_tokens = j.at("reasoning_tokens").get<long long>();
    r.answer_tokens = j.at("answer_tokens").get<long long>();
    r.total_tokens = j.at("total_tokens").get<long long>();
    r.token_source = token_source_from_name(j.at("token_source").get<std::string>());
    r.endpoint = j.at("endpoint").get<std::string>();
    r.finish_reason = finish_reason_from_name(j.at("finish_reason").get<std::string>());
    return r;
}

namespace {

template <typename T, typename Fn>
std::vector<T> read_jsonl(const std::filesystem::path& path, Fn parse) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<T> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        try {
            out.push_back(parse(nlohmann::json::parse(t)));
        } catch (const std::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

std::vector<Problem> read_problems_jsonl(const std::filesystem::path& path) {
    auto problems = read_jsonl<Problem>(path, problem_from_json);
    std::set<std::string> seen;
    for (const auto& p : problems) {
        if (p.question.empty()) {
            throw IoError(path.string() + ": problem '" + p.id + "' has empty question");
        }
        if (!seen.insert(p.id).second) {
            throw IoError(path.string() + ": duplicate problem id '" + p.id + "'");
        }
    }
    return problems;
}

std::vector<GenerationRecord> read_records_jsonl(const std::filesystem::path& path) {
    return read_jsonl<GenerationRecord>(path, record_from_json);
}

void append_record_jsonl(const std::filesystem::path& path, const GenerationRecord& r) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open " + path.string() + " for append");
    out << to_json(r).dump() << "\n";
    out.flush();
    if (!out) throw IoError("append failed: " + path.string());
}

std::vector<Verdict> read_verdicts_jsonl(const std::filesystem::path& path) {
    return read_jsonl<Verdict>(path, [](const nlohmann::json& j) {
        Verdict v;
        v.problem_id = j.at("problem_id").get<std::string>();
        v.alpha = j.at("alpha").get<double>();
        v.sample_index = j.at("sample_index").get<int>();
        v.correct = j.at("correct").get<bool>();
        return v;
    });
}

void write_verdicts_jsonl(const std::filesystem::path& path, const std::vector<Verdict>& v) {
    std::string content;
    for (const auto& verdict : v) {
        nlohmann::ordered_json j = {
            {"problem_id", verdict.problem_id},
            {"alpha", verdict.alpha},
            {"sample_index", verdict.sample_index},
            {"correct", verdict.correct},
        };
        content += j.dump();
        content += "\n";
    }
    atomic_write_file(path, content);
}

}  // namespace dart
