#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dart/config.hpp"
#include "dart/openai_client.hpp"

namespace dart::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Stage { FUSE, GENERATE, VERIFY, CURATE, METRICS, ANALYZE };
const char* stage_name(Stage s);
std::vector<Stage> all_stages();
Stage stage_from_name(const std::string& name);

enum class StageStatus { PENDING, RUNNING, DONE, FAILED };
const char* stage_status_name(StageStatus s);

struct StageOutput {
    std::string path;  // relative to the run directory
    std::string sha256;
};

struct RunManifest {
    std::string run_id;
    std::string tool_version = kToolVersion;
    std::string config_hash;
    std::vector<double> alpha_grid;
    std::map<std::string, StageStatus> stage_status;       // stage name -> status
    std::map<std::string, std::string> stage_fingerprint;  // stage name -> input hash
    std::map<std::string, std::vector<StageOutput>> stage_outputs;
    std::map<std::string, std::string> dataset_paths;  // logical name -> relative path

    static RunManifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;  // atomic
};

// Holds an advisory lock file inside the run directory for the lifetime of
// the object. A live-pid lock from another process refuses to start; stale
// locks from dead processes are taken over.
class RunLock {
public:
    explicit RunLock(const std::filesystem::path& run_dir);
    ~RunLock();
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

// Drives the stage sequence fuse -> generate -> verify -> curate -> metrics /
// analyze over one run directory. Stages whose fingerprint (config subset +
// input hashes) is unchanged and whose recorded outputs still hash-match are
// skipped; anything else re-runs. The manifest is rewritten atomically after
// every stage transition, so a killed run resumes where it stopped.
class Orchestrator {
public:
    Orchestrator(Config config, std::filesystem::path run_dir,
                 gateway::ChatClient client = gateway::ChatClient{});

    // Empty subset means every stage. Throws ConfigError for bad configs and
    // StageFailure when a stage fails (downstream stages are not attempted).
    RunManifest run(const std::vector<Stage>& stages = {});

    const std::filesystem::path& run_dir() const { return run_dir_; }

private:
    struct StagePlan {
        Stage stage;
        std::string fingerprint;
    };

    std::string stage_fingerprint(Stage stage) const;
    std::vector<StageOutput> execute_stage(Stage stage, RunManifest& manifest);
    bool outputs_intact(const RunManifest& manifest, const std::string& name) const;

    Config config_;
    std::filesystem::path run_dir_;
    gateway::ChatClient client_;
};

class StageFailure : public Error {
public:
    StageFailure(Stage stage, const std::string& what)
        : Error(std::string(stage_name(stage)) + ": " + what), stage(stage) {}
    Stage stage;
};

}  // namespace dart::pipeline
