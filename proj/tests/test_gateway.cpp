#include "dart/gateway.hpp"

#include <atomic>
#include <set>

#include "dart/common.hpp"
#include "doctest.h"
#include "mock_openai.hpp"
#include "test_util.hpp"

using namespace dart;
namespace gw = dart::gateway;

namespace {

gw::ChatClient fast_client() {
    gw::RetryPolicy policy;
    policy.max_attempts = 3;
    policy.initial_backoff_ms = 1;
    return gw::ChatClient(policy);
}

Problem make_problem(const std::string& id, const std::string& question,
                     const std::string& gold) {
    Problem p;
    p.id = id;
    p.question = question;
    p.gold_answer = gold;
    return p;
}

}  // namespace

TEST_CASE("split_think handles the three delimiter cases") {
    auto well_formed = gw::split_think("<think>abc</think>xyz");
    CHECK(well_formed.reasoning == "abc");
    CHECK(well_formed.answer == "xyz");
    CHECK(!well_formed.truncated);

    auto missing = gw::split_think("no tags at all");
    CHECK(missing.reasoning.empty());
    CHECK(missing.answer == "no tags at all");
    CHECK(!missing.truncated);

    auto unclosed = gw::split_think("<think>abc");
    CHECK(unclosed.reasoning == "abc");
    CHECK(unclosed.answer.empty());
    CHECK(unclosed.truncated);
}

TEST_CASE("split_think uses the first well-formed pair and custom delimiters") {
    auto nested = gw::split_think("<think>a</think>mid<think>b</think>tail");
    CHECK(nested.reasoning == "a");
    CHECK(nested.answer == "mid<think>b</think>tail");

    gw::ThinkDelimiters custom{"<reason>", "</reason>"};
    auto alt = gw::split_think("<reason>r</reason>ans", custom);
    CHECK(alt.reasoning == "r");
    CHECK(alt.answer == "ans");
}

TEST_CASE("property: reassembling a well-formed split reproduces the input") {
    std::mt19937 rng(55);
    const std::string alphabet = "ab <>/cde";
    std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 12);
    for (int trial = 0; trial < 300; ++trial) {
        std::string reasoning, answer;
        for (int i = len(rng); i > 0; --i) reasoning += alphabet[pick(rng)];
        for (int i = len(rng); i > 0; --i) answer += alphabet[pick(rng)];
        // Reasoning must not smuggle in a closing tag.
        if (reasoning.find("</think>") != std::string::npos) continue;
        std::string raw = "<think>" + reasoning + "</think>" + answer;
        auto parts = gw::split_think(raw);
        CHECK("<think>" + parts.reasoning + "</think>" + parts.answer == raw);
    }
}

TEST_CASE("whitespace token counting") {
    CHECK(gw::whitespace_token_count("") == 0);
    CHECK(gw::whitespace_token_count("   ") == 0);
    CHECK(gw::whitespace_token_count("one") == 1);
    CHECK(gw::whitespace_token_count("a b\tc\nd") == 4);
}

TEST_CASE("generate maps a successful completion onto the record") {
    testutil::MockOpenAiServer server([](const std::string&, const std::string&) {
        testutil::MockOpenAiServer::Reply r;
        r.content = "<think>t</think>A";
        r.completion_tokens = 120;
        return r;
    });
    auto client = fast_client();
    auto record = gw::generate(make_problem("p1", "q?", "A"),
                               gw::EndpointSpec::parse(server.base_url() + "|m"), 0.5,
                               SamplingParams{}, 0, client);

    CHECK(record.problem_id == "p1");
    CHECK(record.alpha == 0.5);
    CHECK(record.reasoning_text == "t");
    CHECK(record.answer_text == "A");
    CHECK(record.total_tokens == 120);
    CHECK(record.token_source == TokenSource::SERVER_USAGE);
    CHECK(record.finish_reason == FinishReason::STOP);
    CHECK(record.total_tokens >= record.reasoning_tokens);
    CHECK(record.reasoning_tokens + record.answer_tokens == record.total_tokens);
}

TEST_CASE("generate falls back to the local counter without usage") {
    testutil::MockOpenAiServer server([](const std::string&, const std::string&) {
        testutil::MockOpenAiServer::Reply r;
        r.content = "<think>two words</think>three more words";
        r.completion_tokens = -1;  // no usage block
        return r;
    });
    auto client = fast_client();
    auto record = gw::generate(make_problem("p1", "q?", "x"),
                               gw::EndpointSpec::parse(server.base_url()), 0.0, SamplingParams{},
                               0, client);
    CHECK(record.token_source == TokenSource::LOCAL_APPROX);
    CHECK(record.reasoning_tokens == 2);
    CHECK(record.answer_tokens == 3);
    CHECK(record.total_tokens >= record.reasoning_tokens);
}

TEST_CASE("generate keeps truncated completions with finish_reason LENGTH") {
    testutil::MockOpenAiServer server([](const std::string&, const std::string&) {
        testutil::MockOpenAiServer::Reply r;
        r.content = "<think>cut off mid thou";
        r.completion_tokens = 32768;
        r.finish_reason = "length";
        return r;
    });
    auto client = fast_client();
    auto record = gw::generate(make_problem("p1", "q?", "x"),
                               gw::EndpointSpec::parse(server.base_url()), 0.2, SamplingParams{},
                               0, client);
    CHECK(record.finish_reason == FinishReason::LENGTH);
    CHECK(record.answer_text.empty());
    CHECK(!record.reasoning_text.empty());
}

TEST_CASE("server errors exhaust retries and land as an ERROR record") {
    std::atomic<int> hits{0};
    testutil::MockOpenAiServer server([&](const std::string&, const std::string&) {
        hits.fetch_add(1);
        testutil::MockOpenAiServer::Reply r;
        r.status = 500;
        return r;
    });
    auto client = fast_client();
    auto record = gw::generate(make_problem("p1", "q?", "x"),
                               gw::EndpointSpec::parse(server.base_url()), 0.7, SamplingParams{},
                               2, client);
    CHECK(record.finish_reason == FinishReason::ERROR);
    CHECK(record.raw_text.empty());
    CHECK(record.sample_index == 2);
    CHECK(hits.load() == 3);  // bounded retries
}

TEST_CASE("a dead endpoint also produces an ERROR record") {
    auto client = fast_client();
    auto record = gw::generate(make_problem("p1", "q?", "x"),
                               gw::EndpointSpec::parse("http://127.0.0.1:1"), 0.7,
                               SamplingParams{}, 0, client);
    CHECK(record.finish_reason == FinishReason::ERROR);
}

TEST_CASE("HTTP 4xx surfaces immediately as a configuration error") {
    std::atomic<int> hits{0};
    testutil::MockOpenAiServer server([&](const std::string&, const std::string&) {
        hits.fetch_add(1);
        testutil::MockOpenAiServer::Reply r;
        r.status = 404;
        return r;
    });
    auto client = fast_client();
    CHECK_THROWS_AS(gw::generate(make_problem("p1", "q?", "x"),
                                 gw::EndpointSpec::parse(server.base_url()), 0.0,
                                 SamplingParams{}, 0, client),
                    ConfigError);
    CHECK(hits.load() == 1);  // no retry on 4xx
}

TEST_CASE("compress_cot records a shortened chain with its length ratio") {
    testutil::TempDir dir("compress");
    testutil::MockOpenAiServer server([](const std::string&, const std::string& prompt) {
        testutil::MockOpenAiServer::Reply r;
        CHECK(prompt.find("why is 6 times 7") != std::string::npos);  // template filled
        r.content = "six sevens make 42";
        return r;
    });
    auto client = fast_client();
    auto problem = make_problem("p1", "why is 6 times 7 equal to 42?", "42");
    std::string long_cot =
        "let us think very carefully about this question for many many words "
        "until the chain is quite long indeed";
    auto out = dir / "dshort.jsonl";
    auto outcome = gw::compress_cot(problem, long_cot, gw::default_compression_template(),
                                    gw::EndpointSpec::parse(server.base_url()), client, out);
    CHECK(outcome.kept);
    CHECK(outcome.cot_short == "six sevens make 42");
    CHECK(outcome.short_tokens < outcome.long_tokens);
    CHECK(outcome.length_ratio ==
          doctest::Approx(double(outcome.short_tokens) / double(outcome.long_tokens)));

    auto row = nlohmann::json::parse(split(read_text_file(out), '\n')[0]);
    CHECK(row["problem_id"] == "p1");
    CHECK(row["gold_answer"] == "42");
    CHECK(row["cot_short"] == "six sevens make 42");
    CHECK(row["length_ratio"].get<double>() < 1.0);
}

TEST_CASE("compress_cot skips rows on an empty teacher reply") {
    testutil::TempDir dir("compress_empty");
    testutil::MockOpenAiServer server([](const std::string&, const std::string&) {
        testutil::MockOpenAiServer::Reply r;
        r.content = "   ";
        return r;
    });
    auto client = fast_client();
    auto outcome = gw::compress_cot(make_problem("p1", "q?", "1"), "some long chain",
                                    gw::default_compression_template(),
                                    gw::EndpointSpec::parse(server.base_url()), client,
                                    dir / "d.jsonl");
    CHECK(!outcome.kept);
    CHECK(!std::filesystem::exists(dir / "d.jsonl"));
}

TEST_CASE("compress_cot rejects empty chains and bad templates") {
    testutil::TempDir dir("compress_bad");
    auto client = fast_client();
    gw::CompressionTemplate no_placeholder{"just a prompt {question} {answer}", "broken"};
    CHECK_THROWS_AS(no_placeholder.validate(), ConfigError);
    CHECK_THROWS_AS(gw::compress_cot(make_problem("p1", "q?", "1"), "",
                                     gw::default_compression_template(),
                                     gw::EndpointSpec::parse("http://127.0.0.1:1"), client,
                                     dir / "d.jsonl"),
                    Error);
}

TEST_CASE("run_spectrum covers problems x grid x repetitions and resumes") {
    testutil::TempDir dir("spectrum");
    testutil::MockOpenAiServer server(testutil::scripted_math_reply);

    std::vector<Problem> problems = {
        make_problem("easy", "2+3? [gold=5] [difficulty=0.0]", "5"),
        make_problem("hard", "hard one [gold=7] [difficulty=0.8]", "7"),
    };
    gw::SpectrumConfig config;
    config.alpha_grid = {0.0, 1.0};
    config.endpoints["0.000"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-0.000");
    config.endpoints["1.000"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-1.000");
    config.repetitions = 1;
    config.max_inflight_per_endpoint = 2;
    auto client = fast_client();

    gw::SpectrumSummary summary;
    auto run = gw::run_spectrum(problems, config, dir.path(), client, &summary);
    CHECK(run.records.size() == 4);
    CHECK(summary.attempted == 4);
    CHECK(summary.resumed_existing == 0);

    // Record keys are unique and cover the full grid.
    std::set<std::string> keys;
    for (const auto& r : run.records) keys.insert(r.key());
    CHECK(keys.size() == 4);

    // Resume with no new work: everything is skipped, nothing re-requested.
    int before = server.requests.load();
    gw::SpectrumSummary resumed;
    auto rerun = gw::run_spectrum(problems, config, dir.path(), client, &resumed);
    CHECK(rerun.records.size() == 4);
    CHECK(resumed.resumed_existing == 4);
    CHECK(server.requests.load() == before);

    auto rerun_with_changed_grid = [&] {
        gw::SpectrumConfig changed = config;
        changed.alpha_grid = {0.0, 0.5, 1.0};
        changed.endpoints["0.500"] = config.endpoints.at("0.000");
        gw::run_spectrum(problems, changed, dir.path(), client, nullptr);
    };
    CHECK_THROWS_AS(rerun_with_changed_grid(), ConfigError);
}

TEST_CASE("run_spectrum resumes a half-finished run without duplicate keys") {
    testutil::TempDir dir("spectrum_crash");
    testutil::MockOpenAiServer server(testutil::scripted_math_reply);
    std::vector<Problem> problems = {
        make_problem("a", "x [gold=1] [difficulty=0.0]", "1"),
        make_problem("b", "y [gold=2] [difficulty=0.0]", "2"),
    };
    gw::SpectrumConfig config;
    config.alpha_grid = {0.0, 1.0};
    config.endpoints["0.000"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-0.000");
    config.endpoints["1.000"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-1.000");
    auto client = fast_client();

    // Simulate a crash at 50%: two of the four records already on disk.
    std::filesystem::create_directories(dir.path());
    for (const auto* key : {"a|0.000|0", "b|1.000|0"}) {
        GenerationRecord r;
        auto parts = split(key, '|');
        r.problem_id = parts[0];
        r.alpha = std::stod(parts[1]);
        r.sample_index = std::stoi(parts[2]);
        r.raw_text = "<think>partial</think>done";
        r.reasoning_text = "partial";
        r.answer_text = "done";
        r.reasoning_tokens = 1;
        r.answer_tokens = 1;
        r.total_tokens = 2;
        append_record_jsonl(dir / "records.jsonl", r);
    }

    gw::SpectrumSummary summary;
    auto run = gw::run_spectrum(problems, config, dir.path(), client, &summary);
    CHECK(summary.attempted == 4);
    CHECK(summary.resumed_existing == 2);
    CHECK(run.records.size() == 4);
    std::set<std::string> keys;
    for (const auto& r : run.records) keys.insert(r.key());
    CHECK(keys.size() == 4);
    // The pre-crash rows were kept verbatim, not regenerated.
    for (const auto& r : run.records) {
        if (r.key() == "a|0.000|0") CHECK(r.reasoning_text == "partial");
    }
}

TEST_CASE("run_spectrum with repetitions indexes samples 0..reps-1") {
    testutil::TempDir dir("spectrum_reps");
    testutil::MockOpenAiServer server(testutil::scripted_math_reply);
    std::vector<Problem> problems = {make_problem("p", "x [gold=1] [difficulty=0.0]", "1")};

    gw::SpectrumConfig config;
    config.alpha_grid = {0.5};
    config.endpoints["0.500"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-0.500");
    config.repetitions = 3;
    auto client = fast_client();
    auto run = gw::run_spectrum(problems, config, dir.path(), client);

    REQUIRE(run.records.size() == 3);
    std::set<int> samples;
    for (const auto& r : run.records) samples.insert(r.sample_index);
    CHECK(samples == std::set<int>{0, 1, 2});
}

TEST_CASE("run_spectrum keeps ERROR rows so counts are conserved") {
    testutil::TempDir dir("spectrum_err");
    testutil::MockOpenAiServer server([](const std::string& model, const std::string& prompt) {
        if (model == "alpha-1.000") {
            testutil::MockOpenAiServer::Reply r;
            r.status = 503;
            return r;
        }
        return testutil::scripted_math_reply(model, prompt);
    });
    std::vector<Problem> problems = {make_problem("p", "x [gold=1] [difficulty=0.0]", "1")};
    gw::SpectrumConfig config;
    config.alpha_grid = {0.0, 1.0};
    config.endpoints["0.000"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-0.000");
    config.endpoints["1.000"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-1.000");
    auto client = fast_client();

    gw::SpectrumSummary summary;
    auto run = gw::run_spectrum(problems, config, dir.path(), client, &summary);
    CHECK(run.records.size() == 2);
    CHECK(summary.errors_per_alpha.at("1.000") == 1);
    CHECK(summary.errors_per_alpha.at("0.000") == 0);

    auto reloaded = gw::load_spectrum_run(dir.path());
    CHECK(reloaded.records.size() == 2);  // partially failed runs stay loadable
}

TEST_CASE("run_spectrum surfaces 4xx as a configuration error, not a crash") {
    testutil::TempDir dir("spectrum_4xx");
    testutil::MockOpenAiServer server([](const std::string&, const std::string&) {
        testutil::MockOpenAiServer::Reply r;
        r.status = 401;
        return r;
    });
    std::vector<Problem> problems = {make_problem("p", "x [gold=1] [difficulty=0.0]", "1")};
    gw::SpectrumConfig config;
    config.alpha_grid = {0.0};
    config.endpoints["0.000"] = gw::EndpointSpec::parse(server.base_url() + "|alpha-0.000");
    auto client = fast_client();
    CHECK_THROWS_AS(gw::run_spectrum(problems, config, dir.path(), client, nullptr),
                    ConfigError);
}

TEST_CASE("endpoint map must cover the grid") {
    gw::SpectrumConfig config;
    config.alpha_grid = {0.0, 0.5};
    config.endpoints["0.000"] = gw::EndpointSpec::parse("http://h|m");
    CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("0.500"), ConfigError);
}

TEST_CASE("endpoint spec parsing") {
    auto plain = gw::EndpointSpec::parse("http://h:1");
    CHECK(plain.base_url == "http://h:1");
    CHECK(plain.model == "default");
    auto with_model = gw::EndpointSpec::parse("http://h:1|qwen");
    CHECK(with_model.model == "qwen");
    CHECK_THROWS_AS(gw::EndpointSpec::parse(""), ConfigError);
}
