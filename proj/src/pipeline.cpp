#include "dart/pipeline.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <unistd.h>

#include "dart/analysis.hpp"
#include "dart/curator.hpp"
#include "dart/fusion.hpp"
#include "dart/gateway.hpp"
#include "dart/metrics.hpp"
#include "dart/sha256.hpp"
#include "dart/verifier.hpp"

namespace dart::pipeline {

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::FUSE: return "fuse";
        case Stage::GENERATE: return "generate";
        case Stage::VERIFY: return "verify";
        case Stage::CURATE: return "curate";
        case Stage::METRICS: return "metrics";
        case Stage::ANALYZE: return "analyze";
    }
    return "?";
}

std::vector<Stage> all_stages() {
    return {Stage::FUSE, Stage::GENERATE, Stage::VERIFY, Stage::CURATE, Stage::METRICS,
            Stage::ANALYZE};
}

Stage stage_from_name(const std::string& name) {
    for (Stage s : all_stages()) {
        if (name == stage_name(s)) return s;
    }
    throw ConfigError("unknown stage '" + name + "'");
}

const char* stage_status_name(StageStatus s) {
    switch (s) {
        case StageStatus::PENDING: return "PENDING";
        case StageStatus::RUNNING: return "RUNNING";
        case StageStatus::DONE: return "DONE";
        case StageStatus::FAILED: return "FAILED";
    }
    return "?";
}

namespace {

StageStatus stage_status_from_name(const std::string& name) {
    if (name == "PENDING") return StageStatus::PENDING;
    if (name == "RUNNING") return StageStatus::RUNNING;
    if (name == "DONE") return StageStatus::DONE;
    if (name == "FAILED") return StageStatus::FAILED;
    throw IoError("unknown stage status '" + name + "'");
}

}  // namespace

RunManifest RunManifest::load(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    for (auto it = j.at("stage_status").begin(); it != j.at("stage_status").end(); ++it) {
        m.stage_status[it.key()] = stage_status_from_name(it.value().get<std::string>());
    }
    m.stage_fingerprint =
        j.at("stage_fingerprint").get<std::map<std::string, std::string>>();
    for (auto it = j.at("stage_outputs").begin(); it != j.at("stage_outputs").end(); ++it) {
        std::vector<StageOutput> outs;
        for (const auto& o : it.value()) {
            outs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
        }
        m.stage_outputs[it.key()] = std::move(outs);
    }
    m.dataset_paths = j.at("dataset_paths").get<std::map<std::string, std::string>>();
    return m;
}

void RunManifest::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["run_id"] = run_id;
    j["tool_version"] = tool_version;
    j["config_hash"] = config_hash;
    j["alpha_grid"] = alpha_grid;
    nlohmann::json status = nlohmann::json::object();
    for (const auto& [k, v] : stage_status) status[k] = stage_status_name(v);
    j["stage_status"] = status;
    j["stage_fingerprint"] = stage_fingerprint;
    nlohmann::json outputs = nlohmann::json::object();
    for (const auto& [k, outs] : stage_outputs) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& o : outs) arr.push_back({{"path", o.path}, {"sha256", o.sha256}});
        outputs[k] = arr;
    }
    j["stage_outputs"] = outputs;
    j["dataset_paths"] = dataset_paths;
    atomic_write_file(path, j.dump(2) + "\n");
}

RunLock::RunLock(const std::filesystem::path& run_dir) {
    std::filesystem::create_directories(run_dir);
    lock_path_ = run_dir / ".lock";
    if (std::filesystem::exists(lock_path_)) {
        std::string text = trim(read_text_file(lock_path_));
        pid_t pid = 0;
        try {
            pid = static_cast<pid_t>(std::stol(text));
        } catch (const std::exception&) {
            pid = 0;
        }
        bool alive = pid > 0 && pid != getpid() && (kill(pid, 0) == 0 || errno == EPERM);
        if (alive) {
            throw Error("run directory " + run_dir.string() +
                        " is locked by live process " + text);
        }
        // Stale lock from a dead process: take over.
    }
    atomic_write_file(lock_path_, std::to_string(getpid()) + "\n");
}

RunLock::~RunLock() {
    std::error_code ec;
    std::filesystem::remove(lock_path_, ec);
}

Orchestrator::Orchestrator(Config config, std::filesystem::path run_dir,
                           gateway::ChatClient client)
    : config_(std::move(config)), run_dir_(std::move(run_dir)), client_(std::move(client)) {}

namespace {

std::string hash_file_or_absent(const std::filesystem::path& p) {
    return std::filesystem::exists(p) ? sha256_file_hex(p) : "absent";
}

}  // namespace

std::string Orchestrator::stage_fingerprint(Stage stage) const {
    Sha256 h;
    h.update(stage_name(stage));
    h.update("\n");
    auto add_key = [&](const std::string& key) {
        h.update(key + "=" + config_.get_or(key, "") + "\n");
    };
    switch (stage) {
        case Stage::FUSE: {
            h.update(hash_file_or_absent(config_.get_or("fusion.base", "")));
            h.update(hash_file_or_absent(config_.get_or("fusion.distilled", "")));
            add_key("fusion.grid");
            add_key("fusion.allow_nonfinite");
            break;
        }
        case Stage::GENERATE: {
            h.update(hash_file_or_absent(config_.get_or("generation.problems", "")));
            add_key("fusion.grid");
            add_key("generation.endpoints");
            add_key("generation.repetitions");
            add_key("generation.temperature");
            add_key("generation.top_p");
            add_key("generation.max_tokens");
            add_key("generation.seed");
            add_key("generation.think_open");
            add_key("generation.think_close");
            break;
        }
        case Stage::VERIFY: {
            h.update(hash_file_or_absent(run_dir_ / "generations" / "records.jsonl"));
            h.update(hash_file_or_absent(run_dir_ / "generations" / "problems.jsonl"));
            break;
        }
        case Stage::CURATE: {
            h.update(hash_file_or_absent(run_dir_ / "generations" / "records.jsonl"));
            h.update(hash_file_or_absent(run_dir_ / "verdicts" / "verdicts.jsonl"));
            add_key("curation.style");
            break;
        }
        case Stage::METRICS: {
            h.update(hash_file_or_absent(run_dir_ / "generations" / "records.jsonl"));
            h.update(hash_file_or_absent(run_dir_ / "verdicts" / "verdicts.jsonl"));
            add_key("metrics.baseline");
            if (auto baseline = config_.get("metrics.baseline")) {
                h.update(hash_file_or_absent(std::filesystem::path(*baseline) / "generations" /
                                             "records.jsonl"));
                h.update(hash_file_or_absent(std::filesystem::path(*baseline) / "verdicts" /
                                             "verdicts.jsonl"));
            }
            break;
        }
        case Stage::ANALYZE: {
            h.update(hash_file_or_absent(run_dir_ / "generations" / "records.jsonl"));
            h.update(hash_file_or_absent(run_dir_ / "verdicts" / "verdicts.jsonl"));
            add_key("analysis.bins");
            add_key("analysis.epsilon");
            break;
        }
    }
    return h.hex_digest();
}

bool Orchestrator::outputs_intact(const RunManifest& manifest, const std::string& name) const {
    auto it = manifest.stage_outputs.find(name);
    if (it == manifest.stage_outputs.end()) return false;
    for (const auto& out : it->second) {
        std::filesystem::path p(out.path);
        if (!p.is_absolute()) p = run_dir_ / p;
        if (!std::filesystem::exists(p)) return false;
        if (sha256_file_hex(p) != out.sha256) return false;
    }
    return true;
}

namespace {

struct LoadedRun {
    SpectrumRun run;
    std::map<std::string, bool> verdicts_by_key;
    std::vector<Verdict> verdicts;
};

LoadedRun load_run_with_verdicts(const std::filesystem::path& run_dir) {
    LoadedRun out;
    out.run = gateway::load_spectrum_run(run_dir / "generations");
    out.verdicts = read_verdicts_jsonl(run_dir / "verdicts" / "verdicts.jsonl");
    for (const auto& v : out.verdicts) out.verdicts_by_key[v.key()] = v.correct;
    return out;
}

// Per-alpha Pass@1/ACT/AAT rows for one run, rows ordered by alpha.
std::vector<metrics::MethodStats> per_alpha_stats(const LoadedRun& loaded,
                                                  const std::string& dataset,
                                                  const std::string& method_prefix) {
    std::map<std::string, std::vector<GenerationRecord>> by_alpha;
    for (const auto& r : loaded.run.records) by_alpha[format_alpha(r.alpha)].push_back(r);

    std::vector<metrics::MethodStats> stats;
    for (const auto& [alpha_key, records] : by_alpha) {
        metrics::MethodStats s;
        s.method = method_prefix + alpha_key;
        s.dataset = dataset;
        s.n = static_cast<int>(records.size());
        std::vector<bool> verdicts;
        for (const auto& r : records) {
            auto it = loaded.verdicts_by_key.find(r.key());
            if (it == loaded.verdicts_by_key.end()) {
                throw Error("missing verdict for record " + r.key());
            }
            verdicts.push_back(it->second && r.finish_reason != FinishReason::ERROR);
        }
        s.pass_at_1 = metrics::pass_at_1(verdicts);
        bool any_usable = false;
        for (const auto& r : records) any_usable |= r.finish_reason != FinishReason::ERROR;
        if (any_usable) {
            s.act = metrics::avg_tokens(records, metrics::Segment::REASONING).mean;
            s.aat = metrics::avg_tokens(records, metrics::Segment::TOTAL).mean;
        }
        stats.push_back(std::move(s));
    }
    return stats;
}

std::string svg_curve(const std::vector<analysis::CurvePoint>& points,
                      const analysis::SigmoidFit& fit) {
    // Fixed 640x400 viewport with a 40px margin; tokens on x, accuracy on y.
    double t_min = points.front().mean_tokens, t_max = points.back().mean_tokens;
    for (const auto& p : points) {
        t_min = std::min(t_min, p.mean_tokens);
        t_max = std::max(t_max, p.mean_tokens);
    }
    if (t_max <= t_min) t_max = t_min + 1.0;
    auto x_of = [&](double t) { return 40.0 + 560.0 * (t - t_min) / (t_max - t_min); };
    auto y_of = [&](double acc) { return 360.0 - 320.0 * acc; };
    char buf[256];
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n"
        "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n"
        "<line x1=\"40\" y1=\"360\" x2=\"600\" y2=\"360\" stroke=\"black\"/>\n"
        "<line x1=\"40\" y1=\"40\" x2=\"40\" y2=\"360\" stroke=\"black\"/>\n";
    if (fit.converged) {
        svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
        for (int i = 0; i <= 100; ++i) {
            double t = t_min + (t_max - t_min) * i / 100.0;
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x_of(t), y_of(fit(t)));
            svg += buf;
        }
        svg += "\"/>\n";
    }
    for (const auto& p : points) {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"firebrick\"/>\n",
                      x_of(p.mean_tokens), y_of(p.accuracy));
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace

std::vector<StageOutput> Orchestrator::execute_stage(Stage stage, RunManifest& manifest) {
    std::vector<StageOutput> outputs;
    // Paths are stored relative to the run directory when inside it, absolute
    // otherwise (curation.out may point anywhere).
    auto record_output = [&](const std::filesystem::path& p) {
        std::filesystem::path full = p.is_absolute() ? p : run_dir_ / p;
        outputs.push_back({p.generic_string(), sha256_file_hex(full)});
    };
    auto require_file = [&](const std::string& key) {
        std::filesystem::path p = config_.require(key);
        if (!std::filesystem::exists(p)) {
            throw ConfigError("config key '" + key + "' points to missing file " + p.string());
        }
        return p;
    };

    switch (stage) {
        case Stage::FUSE: {
            fusion::FusionSpec spec;
            spec.base_path = require_file("fusion.base");
            spec.distilled_path = require_file("fusion.distilled");
            spec.alpha_grid = parse_double_list(config_.require("fusion.grid"));
            spec.allow_nonfinite = config_.get_or("fusion.allow_nonfinite", "false") == "true";
            spec.output_path = run_dir_ / "fused";
            auto paths = fusion::sweep(spec);
            for (const auto& p : paths) {
                record_output(std::filesystem::path("fused") / p.filename());
            }
            manifest.dataset_paths["fused_dir"] = "fused";
            break;
        }
        case Stage::GENERATE: {
            auto problems = read_problems_jsonl(require_file("generation.problems"));
            gateway::SpectrumConfig cfg;
            cfg.alpha_grid = parse_double_list(config_.require("fusion.grid"));
            for (const auto& [alpha_key, url] :
                 parse_endpoint_map(config_.require("generation.endpoints"))) {
                cfg.endpoints[alpha_key] = gateway::EndpointSpec::parse(url);
            }
            cfg.params.temperature = config_.get_double_or("generation.temperature", 0.6);
            cfg.params.top_p = config_.get_double_or("generation.top_p", 0.95);
            cfg.params.max_tokens = config_.get_int_or("generation.max_tokens", 32768);
            if (auto seed = config_.get("generation.seed")) cfg.params.seed = std::stoll(*seed);
            cfg.repetitions = config_.get_int_or("generation.repetitions", 1);
            cfg.max_inflight_per_endpoint = config_.get_int_or("generation.max_inflight", 8);
            cfg.delims.open = config_.get_or("generation.think_open", "<think>");
            cfg.delims.close = config_.get_or("generation.think_close", "</think>");
            cfg.run_id = manifest.run_id;

            gateway::SpectrumSummary summary;
            gateway::run_spectrum(problems, cfg, run_dir_ / "generations", client_, &summary);
            std::fprintf(stderr, "generate: %zu attempted, %zu resumed\n", summary.attempted,
                         summary.resumed_existing);
            for (const auto& [alpha_key, errors] : summary.errors_per_alpha) {
                if (errors > 0) {
                    std::fprintf(stderr, "generate: alpha %s had %zu ERROR records\n",
                                 alpha_key.c_str(), errors);
                }
            }
            record_output("generations/records.jsonl");
            record_output("generations/problems.jsonl");
            record_output("generations/run.json");
            manifest.dataset_paths["records"] = "generations/records.jsonl";
            manifest.dataset_paths["problems"] = "generations/problems.jsonl";
            break;
        }
        case Stage::VERIFY: {
            SpectrumRun run = gateway::load_spectrum_run(run_dir_ / "generations");
            std::map<std::string, const Problem*> by_id;
            for (const auto& p : run.problems) by_id[p.id] = &p;
            std::vector<Verdict> verdicts;
            for (const auto& r : run.records) {
                auto it = by_id.find(r.problem_id);
                if (it == by_id.end()) {
                    throw Error("record references unknown problem '" + r.problem_id + "'");
                }
                Verdict v;
                v.problem_id = r.problem_id;
                v.alpha = r.alpha;
                v.sample_index = r.sample_index;
                v.correct = r.finish_reason != FinishReason::ERROR &&
                            verifier::grade(r.answer_text, it->second->gold_answer);
                verdicts.push_back(std::move(v));
            }
            std::filesystem::create_directories(run_dir_ / "verdicts");
            write_verdicts_jsonl(run_dir_ / "verdicts" / "verdicts.jsonl", verdicts);
            record_output("verdicts/verdicts.jsonl");
            manifest.dataset_paths["verdicts"] = "verdicts/verdicts.jsonl";
            break;
        }
        case Stage::CURATE: {
            LoadedRun loaded = load_run_with_verdicts(run_dir_);
            auto result = curator::build_adaptive_dataset(loaded.run, loaded.verdicts_by_key);

            std::filesystem::path adaptive = "curated/adaptive.jsonl";
            std::filesystem::path sft = "curated/sft.jsonl";
            std::filesystem::path exclusions = "curated/exclusions.json";
            std::filesystem::path sidecar = "curated/train_config.txt";
            if (auto out = config_.get("curation.out")) {
                adaptive = *out;
                std::filesystem::path dir = adaptive.parent_path();
                std::string stem = adaptive.stem().string();
                sft = dir / (stem + "_sft.jsonl");
                exclusions = dir / (stem + "_exclusions.json");
                sidecar = dir / (stem + "_train_config.txt");
            }
            auto resolve = [&](const std::filesystem::path& p) {
                std::filesystem::path full = p.is_absolute() ? p : run_dir_ / p;
                if (full.has_parent_path()) std::filesystem::create_directories(full.parent_path());
                return full;
            };
            curator::write_curated_jsonl(resolve(adaptive), result.examples);
            curator::write_exclusion_report(resolve(exclusions), result);
            auto style = config_.get_or("curation.style", "think") == "plain"
                             ? curator::SftStyle::PLAIN
                             : curator::SftStyle::THINK_WRAPPED;
            curator::export_sft(result.examples, style, resolve(sft), resolve(sidecar));
            record_output(adaptive);
            record_output(exclusions);
            record_output(sft);
            record_output(sidecar);
            manifest.dataset_paths["curated"] = adaptive.generic_string();
            manifest.dataset_paths["sft"] = sft.generic_string();
            manifest.dataset_paths["exclusions"] = exclusions.generic_string();
            manifest.dataset_paths["train_config"] = sidecar.generic_string();
            break;
        }
        case Stage::METRICS: {
            LoadedRun loaded = load_run_with_verdicts(run_dir_);
            std::string dataset = manifest.run_id;
            std::vector<metrics::MethodStats> stats;
            std::string baseline_method;
            if (auto baseline_dir = config_.get("metrics.baseline")) {
                LoadedRun base = load_run_with_verdicts(*baseline_dir);
                auto base_stats = per_alpha_stats(base, dataset, "baseline_alpha_");
                if (base_stats.empty()) throw Error("baseline run has no records");
                // The baseline run's longest-chain model anchors the deltas.
                baseline_method = base_stats.front().method;
                stats.insert(stats.end(), base_stats.begin(), base_stats.end());
            }
            auto run_stats = per_alpha_stats(loaded, dataset, "alpha_");
            if (run_stats.empty()) throw Error("run has no records to report");
            if (baseline_method.empty()) baseline_method = run_stats.front().method;
            stats.insert(stats.end(), run_stats.begin(), run_stats.end());

            std::filesystem::create_directories(run_dir_ / "reports");
            metrics::render_report(stats, baseline_method, run_dir_ / "reports" / "report.json",
                                   run_dir_ / "reports" / "report.txt");
            record_output("reports/report.json");
            record_output("reports/report.txt");
            manifest.dataset_paths["report_json"] = "reports/report.json";
            manifest.dataset_paths["report_txt"] = "reports/report.txt";
            break;
        }
        case Stage::ANALYZE: {
            LoadedRun loaded = load_run_with_verdicts(run_dir_);
            int bins = config_.get_int_or("analysis.bins", 4);
            double epsilon = config_.get_double_or("analysis.epsilon", 0.02);
            if (!(epsilon > 0.0 && epsilon < 1.0)) {
                throw ConfigError("analysis.epsilon must be in (0,1)");
            }

            // ERROR records carry no usable token counts; keep them out of the
            // curve the same way token means exclude them.
            std::vector<GenerationRecord> usable;
            std::vector<bool> verdicts;
            for (const auto& r : loaded.run.records) {
                if (r.finish_reason == FinishReason::ERROR) continue;
                auto it = loaded.verdicts_by_key.find(r.key());
                if (it == loaded.verdicts_by_key.end()) {
                    throw Error("missing verdict for record " + r.key());
                }
                usable.push_back(r);
                verdicts.push_back(it->second);
            }

            nlohmann::json report;
            report["epsilon"] = epsilon;
            report["bins"] = bins;
            try {
                auto points = analysis::bin_points(usable, verdicts, bins);
                nlohmann::json jpoints = nlohmann::json::array();
                for (const auto& p : points) {
                    jpoints.push_back({{"mean_tokens", p.mean_tokens},
                                       {"accuracy", p.accuracy},
                                       {"n", p.n}});
                }
                report["points"] = jpoints;
                auto fit = analysis::fit_sigmoid(points);
                report["fit"] = {{"L", fit.L},
                                 {"k", fit.k},
                                 {"t0", fit.t0},
                                 {"rss", fit.rss},
                                 {"converged", fit.converged}};
                report["token_budget"] =
                    fit.converged ? nlohmann::json(analysis::token_budget(fit, epsilon))
                                  : nlohmann::json();
                atomic_write_file(run_dir_ / "reports" / "curve.svg", svg_curve(points, fit));
            } catch (const Error& e) {
                // A flat or tiny spectrum is reportable, not a pipeline failure.
                report["fit_error"] = e.what();
            }

            std::map<std::string, std::pair<long double, long long>> act_by_alpha;
            for (const auto& r : usable) {
                auto& [sum, count] = act_by_alpha[format_alpha(r.alpha)];
                sum += r.reasoning_tokens;
                count += 1;
            }
            std::vector<std::pair<double, double>> series;
            for (const auto& [alpha_key, acc] : act_by_alpha) {
                series.emplace_back(std::stod(alpha_key),
                                    static_cast<double>(acc.first / acc.second));
            }
            if (series.size() >= 3) {
                try {
                    auto mono = analysis::alpha_monotonicity(series);
                    nlohmann::json jviol = nlohmann::json::array();
                    for (const auto& v : mono.violations) {
                        jviol.push_back({{"alpha_lo", v.alpha_lo},
                                         {"alpha_hi", v.alpha_hi},
                                         {"act_lo", v.act_lo},
                                         {"act_hi", v.act_hi}});
                    }
                    report["monotonicity"] = {{"spearman_rho", mono.spearman_rho},
                                              {"violations", jviol}};
                } catch (const Error& e) {
                    report["monotonicity_error"] = e.what();
                }
            }

            std::filesystem::create_directories(run_dir_ / "reports");
            atomic_write_file(run_dir_ / "reports" / "fit.json", report.dump(2) + "\n");
            record_output("reports/fit.json");
            if (std::filesystem::exists(run_dir_ / "reports" / "curve.svg")) {
                record_output("reports/curve.svg");
                manifest.dataset_paths["curve_svg"] = "reports/curve.svg";
            }
            manifest.dataset_paths["fit_json"] = "reports/fit.json";
            break;
        }
    }
    return outputs;
}

RunManifest Orchestrator::run(const std::vector<Stage>& stages) {
    auto findings = validate_config(config_);
    if (!findings.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& f : findings) msg += "\n  " + f.key + ": " + f.message;
        throw ConfigError(msg);
    }

    RunLock lock(run_dir_);
    std::filesystem::path manifest_path = run_dir_ / "manifest.json";

    RunManifest manifest;
    if (std::filesystem::exists(manifest_path)) {
        manifest = RunManifest::load(manifest_path);
    }
    manifest.run_id = config_.get_or("run.id", run_dir_.filename().string());
    manifest.tool_version = kToolVersion;
    manifest.config_hash = sha256_hex(config_.canonical());
    if (auto grid = config_.get("fusion.grid")) {
        manifest.alpha_grid = parse_double_list(*grid);
    }
    for (Stage s : all_stages()) {
        if (!manifest.stage_status.count(stage_name(s))) {
            manifest.stage_status[stage_name(s)] = StageStatus::PENDING;
        }
    }

    std::vector<Stage> requested = stages.empty() ? all_stages() : stages;
    // Execute in canonical order regardless of how the subset was given.
    std::vector<Stage> plan;
    for (Stage s : all_stages()) {
        if (std::find(requested.begin(), requested.end(), s) != requested.end()) {
            plan.push_back(s);
        }
    }

    for (Stage stage : plan) {
        const std::string name = stage_name(stage);
        std::string fingerprint = stage_fingerprint(stage);
        if (manifest.stage_status[name] == StageStatus::DONE &&
            manifest.stage_fingerprint[name] == fingerprint && outputs_intact(manifest, name)) {
            std::fprintf(stderr, "%s: up to date, skipping\n", name.c_str());
            continue;
        }

        manifest.stage_status[name] = StageStatus::RUNNING;
        manifest.save(manifest_path);
        try {
            auto outputs = execute_stage(stage, manifest);
            manifest.stage_status[name] = StageStatus::DONE;
            // Fingerprint inputs may have been produced by this very run
            // (verify hashes records.jsonl), so recompute after execution.
            manifest.stage_fingerprint[name] = stage_fingerprint(stage);
            manifest.stage_outputs[name] = std::move(outputs);
            manifest.save(manifest_path);
            std::fprintf(stderr, "%s: done\n", name.c_str());
        } catch (const ConfigError&) {
            manifest.stage_status[name] = StageStatus::FAILED;
            manifest.save(manifest_path);
            throw;  // config problems exit with the config error code
        } catch (const std::exception& e) {
            manifest.stage_status[name] = StageStatus::FAILED;
            manifest.save(manifest_path);
            throw StageFailure(stage, e.what());
        }
    }
    return manifest;
}

}  // namespace dart::pipeline
