// dart: batch toolkit for difficulty-adaptive reasoning datasets.
//
// Subcommands cover the pipeline stages (fuse, generate, verify, curate,
// metrics, analyze), the end-to-end orchestrator (run), config linting
// (validate) and teacher-based chain compression (compress).
//
// Exit codes: 0 success, 2 config error, 3 stage/runtime failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dart/common.hpp"
#include "dart/config.hpp"
#include "dart/fusion.hpp"
#include "dart/gateway.hpp"
#include "dart/pipeline.hpp"
#include "dart/sha256.hpp"
#include "dart/verifier.hpp"

namespace {

using dart::pipeline::Config;
using dart::pipeline::Orchestrator;
using dart::pipeline::Stage;

struct FlagOverride {
    std::string key;
    std::string* value;
};

Config merged_config(const std::string& config_path, const std::vector<FlagOverride>& flags) {
    Config config;
    if (!config_path.empty()) config = Config::parse_file(config_path);
    for (const auto& f : flags) {
        if (!f.value->empty()) config.set(f.key, *f.value);
    }
    return config;
}

int run_stage_subset(const Config& config, const std::string& run_dir,
                     const std::vector<Stage>& stages) {
    Orchestrator orchestrator(config, run_dir);
    orchestrator.run(stages);
    return 0;
}

// Rows either carry an explicit answer field or are full problem rows.
std::string gold_of(const nlohmann::json& j) {
    if (j.contains("answer")) return j.at("answer").get<std::string>();
    return j.at("gold_answer").get<std::string>();
}

int verify_files(const std::string& pred_path, const std::string& gold_path,
                 const std::string& out_path) {
    std::map<std::string, std::string> golds;
    for (const auto& line : dart::split(dart::read_text_file(gold_path), '\n')) {
        std::string t = dart::trim(line);
        if (t.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(t);
        golds[j.at("id").get<std::string>()] = gold_of(j);
    }

    std::string output;
    for (const auto& line : dart::split(dart::read_text_file(pred_path), '\n')) {
        std::string t = dart::trim(line);
        if (t.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(t);
        std::string id = j.at("id").get<std::string>();
        auto it = golds.find(id);
        if (it == golds.end()) {
            throw dart::ConfigError("prediction id '" + id + "' has no gold answer");
        }
        bool correct = dart::verifier::grade(j.at("text").get<std::string>(), it->second);
        nlohmann::json row = {{"id", id}, {"correct", correct}};
        output += row.dump();
        output += "\n";
    }
    if (out_path.empty()) {
        std::fputs(output.c_str(), stdout);
    } else {
        dart::atomic_write_file(out_path, output);
    }
    return 0;  // verification results are data, not failures
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dart: fuse reasoning checkpoints, generate across the spectrum, "
                 "verify answers, curate adaptive SFT data and report efficiency"};
    app.require_subcommand(1);

    // fuse
    std::string fuse_base, fuse_distilled, fuse_out, fuse_grid, fuse_out_dir;
    double fuse_alpha = 0.0;
    bool fuse_allow_nonfinite = false;
    auto* fuse_cmd = app.add_subcommand("fuse", "interpolate two checkpoints");
    fuse_cmd->fallthrough();
    fuse_cmd->add_option("--base", fuse_base, "base checkpoint (.safetensors)")->required();
    fuse_cmd->add_option("--distilled", fuse_distilled, "distilled checkpoint")->required();
    fuse_cmd->add_option("--alpha", fuse_alpha, "fusion coefficient in [0,1]");
    fuse_cmd->add_option("--out", fuse_out, "fused checkpoint output path");
    fuse_cmd->add_flag("--allow-nonfinite", fuse_allow_nonfinite,
                       "propagate NaN/inf elements instead of aborting");
    auto* sweep_cmd = fuse_cmd->add_subcommand("sweep", "fuse a whole alpha grid");
    sweep_cmd->add_option("--grid", fuse_grid, "comma-separated alphas")->required();
    sweep_cmd->add_option("--out-dir", fuse_out_dir, "output directory")->required();

    // generate
    std::string gen_run_dir, gen_config, gen_problems, gen_grid, gen_endpoints, gen_reps;
    std::string gen_temperature, gen_top_p, gen_max_tokens, gen_inflight;
    auto* gen_cmd = app.add_subcommand("generate", "generate records across the model spectrum");
    gen_cmd->add_option("--run-dir", gen_run_dir, "run directory")->required();
    gen_cmd->add_option("--config", gen_config, "pipeline config file");
    gen_cmd->add_option("--problems", gen_problems, "problems JSONL");
    gen_cmd->add_option("--grid", gen_grid, "comma-separated alphas");
    gen_cmd->add_option("--endpoints", gen_endpoints,
                        "alpha=url|model map, ';'-separated (API key: DART_API_KEY)");
    gen_cmd->add_option("--reps", gen_reps, "samples per (problem, alpha)");
    gen_cmd->add_option("--temperature", gen_temperature, "sampling temperature");
    gen_cmd->add_option("--top-p", gen_top_p, "nucleus sampling cutoff");
    gen_cmd->add_option("--max-tokens", gen_max_tokens, "generation length cap");
    gen_cmd->add_option("--inflight", gen_inflight, "max in-flight requests per endpoint");

    // verify
    std::string ver_pred, ver_gold, ver_out, ver_run_dir, ver_config;
    auto* ver_cmd = app.add_subcommand("verify", "grade predictions against gold answers");
    ver_cmd->add_option("--pred", ver_pred, "predictions JSONL ({id, text})");
    ver_cmd->add_option("--gold", ver_gold, "gold answers JSONL ({id, answer} or problems)");
    ver_cmd->add_option("--out", ver_out, "verdicts output (default stdout)");
    ver_cmd->add_option("--run-dir", ver_run_dir, "grade a run directory instead");
    ver_cmd->add_option("--config", ver_config, "pipeline config file");

    // curate
    std::string cur_run_dir, cur_config, cur_out, cur_style;
    auto* cur_cmd = app.add_subcommand("curate", "select optimal chains and export SFT data");
    cur_cmd->add_option("--run-dir", cur_run_dir, "run directory")->required();
    cur_cmd->add_option("--config", cur_config, "pipeline config file");
    cur_cmd->add_option("--out", cur_out, "curated dataset path override");
    cur_cmd->add_option("--style", cur_style, "SFT output style: think | plain");

    // metrics
    std::string met_run_dir, met_config, met_baseline;
    auto* met_cmd = app.add_subcommand("metrics", "compute Pass@1 / ACT / AAT report");
    met_cmd->add_option("--run-dir", met_run_dir, "run directory")->required();
    met_cmd->add_option("--config", met_config, "pipeline config file");
    met_cmd->add_option("--baseline", met_baseline, "baseline run directory for deltas");

    // analyze
    std::string ana_run_dir, ana_config, ana_bins, ana_epsilon;
    auto* ana_cmd = app.add_subcommand("analyze", "fit the length-accuracy curve");
    ana_cmd->add_option("--run-dir", ana_run_dir, "run directory")->required();
    ana_cmd->add_option("--config", ana_config, "pipeline config file");
    ana_cmd->add_option("--bins", ana_bins, "equal-population bins");
    ana_cmd->add_option("--epsilon", ana_epsilon, "token budget tolerance in (0,1)");

    // run
    std::string run_config, run_dir, run_stages;
    auto* run_cmd = app.add_subcommand("run", "execute the pipeline end to end");
    run_cmd->add_option("--config", run_config, "pipeline config file")->required();
    run_cmd->add_option("--run-dir", run_dir, "run directory")->required();
    run_cmd->add_option("--stages", run_stages, "comma-separated stage subset");

    // validate
    std::string val_config;
    auto* val_cmd = app.add_subcommand("validate", "lint a pipeline config");
    val_cmd->add_option("--config", val_config, "pipeline config file")->required();

    // compress
    std::string cmp_problems, cmp_cots, cmp_teacher, cmp_out, cmp_template;
    auto* cmp_cmd = app.add_subcommand("compress", "shorten long chains via a teacher model");
    cmp_cmd->add_option("--problems", cmp_problems, "problems JSONL")->required();
    cmp_cmd->add_option("--cots", cmp_cots, "long chains JSONL ({id, cot})")->required();
    cmp_cmd->add_option("--teacher", cmp_teacher, "teacher endpoint url[|model]")->required();
    cmp_cmd->add_option("--out", cmp_out, "compressed dataset JSONL")->required();
    cmp_cmd->add_option("--template", cmp_template,
                        "prompt template file with {question} {answer} {long_cot}");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fuse_cmd->parsed()) {
            dart::fusion::FusionSpec spec;
            spec.base_path = fuse_base;
            spec.distilled_path = fuse_distilled;
            spec.allow_nonfinite = fuse_allow_nonfinite;
            if (sweep_cmd->parsed()) {
                spec.alpha_grid = dart::parse_double_list(fuse_grid);
                spec.output_path = fuse_out_dir;
                for (const auto& p : dart::fusion::sweep(spec)) {
                    std::printf("%s\n", p.string().c_str());
                }
            } else {
                if (fuse_out.empty()) throw dart::ConfigError("--out is required");
                spec.alpha = fuse_alpha;
                spec.output_path = fuse_out;
                dart::fusion::fuse_files(spec);
                std::printf("%s\n", fuse_out.c_str());
            }
            return 0;
        }
        if (gen_cmd->parsed()) {
            Config config = merged_config(gen_config, {
                {"generation.problems", &gen_problems},
                {"fusion.grid", &gen_grid},
                {"generation.endpoints", &gen_endpoints},
                {"generation.repetitions", &gen_reps},
                {"generation.temperature", &gen_temperature},
                {"generation.top_p", &gen_top_p},
                {"generation.max_tokens", &gen_max_tokens},
                {"generation.max_inflight", &gen_inflight},
            });
            return run_stage_subset(config, gen_run_dir, {Stage::GENERATE});
        }
        if (ver_cmd->parsed()) {
            if (!ver_run_dir.empty()) {
                return run_stage_subset(merged_config(ver_config, {}), ver_run_dir,
                                        {Stage::VERIFY});
            }
            if (ver_pred.empty() || ver_gold.empty()) {
                throw dart::ConfigError("verify needs --pred and --gold (or --run-dir)");
            }
            return verify_files(ver_pred, ver_gold, ver_out);
        }
        if (cur_cmd->parsed()) {
            Config config = merged_config(cur_config, {
                {"curation.out", &cur_out},
                {"curation.style", &cur_style},
            });
            return run_stage_subset(config, cur_run_dir, {Stage::CURATE});
        }
        if (met_cmd->parsed()) {
            Config config = merged_config(met_config, {
                {"metrics.baseline", &met_baseline},
            });
            return run_stage_subset(config, met_run_dir, {Stage::METRICS});
        }
        if (ana_cmd->parsed()) {
            Config config = merged_config(ana_config, {
                {"analysis.bins", &ana_bins},
                {"analysis.epsilon", &ana_epsilon},
            });
            return run_stage_subset(config, ana_run_dir, {Stage::ANALYZE});
        }
        if (run_cmd->parsed()) {
            Config config = Config::parse_file(run_config);
            std::vector<Stage> stages;
            if (!run_stages.empty()) {
                for (const auto& name : dart::split(run_stages, ',')) {
                    stages.push_back(dart::pipeline::stage_from_name(dart::trim(name)));
                }
            }
            Orchestrator orchestrator(config, run_dir);
            orchestrator.run(stages);
            return 0;
        }
        if (val_cmd->parsed()) {
            Config config = Config::parse_file(val_config);
            auto findings = dart::pipeline::validate_config(config);
            for (const auto& f : findings) {
                nlohmann::json j = {{"key", f.key}, {"message", f.message}};
                std::printf("%s\n", j.dump().c_str());
            }
            return findings.empty() ? 0 : 2;
        }
        if (cmp_cmd->parsed()) {
            auto problems = dart::read_problems_jsonl(cmp_problems);
            dart::gateway::CompressionTemplate tmpl =
                dart::gateway::default_compression_template();
            if (!cmp_template.empty()) {
                tmpl.text = dart::read_text_file(cmp_template);
                tmpl.version = "file:" + cmp_template;
            }
            tmpl.validate();
            auto teacher = dart::gateway::EndpointSpec::parse(cmp_teacher);
            dart::gateway::ChatClient client;

            // Pin which prompt produced this dataset; the builtin template is
            // a versioned stand-in, not a canonical prompt.
            nlohmann::json manifest = {
                {"template_version", tmpl.version},
                {"template_sha256", dart::sha256_hex(tmpl.text)},
                {"teacher", teacher.display()},
                {"created_at", dart::iso8601_now()},
            };
            dart::atomic_write_file(cmp_out + ".manifest.json", manifest.dump(2) + "\n");

            size_t kept = 0, skipped = 0;
            for (const auto& line : dart::split(dart::read_text_file(cmp_cots), '\n')) {
                std::string t = dart::trim(line);
                if (t.empty()) continue;
                nlohmann::json j = nlohmann::json::parse(t);
                std::string id = j.at("id").get<std::string>();
                auto it = std::find_if(problems.begin(), problems.end(),
                                       [&](const dart::Problem& p) { return p.id == id; });
                if (it == problems.end()) {
                    throw dart::ConfigError("chain id '" + id + "' has no matching problem");
                }
                auto outcome = dart::gateway::compress_cot(*it, j.at("cot").get<std::string>(),
                                                           tmpl, teacher, client, cmp_out);
                outcome.kept ? ++kept : ++skipped;
            }
            std::printf("compressed %zu chains, skipped %zu\n", kept, skipped);
            return 0;
        }
    } catch (const dart::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
