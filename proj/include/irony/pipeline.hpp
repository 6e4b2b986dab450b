#pragma once

#include "irony/augmentation.hpp"
#include "irony/config.hpp"
#include "irony/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irony {

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Stage { ingest, augment, train, evaluate, report };

std::string to_string(Stage stage);
Stage stage_from_string(std::string_view name);
const std::vector<Stage>& all_stages();

/// A stage was invoked before the stage it depends on produced current
/// artifacts.
class MissingStage : public PipelineError {
public:
    MissingStage(Stage required, const std::string& detail);
    Stage required() const noexcept { return required_; }

private:
    Stage required_;
};

struct SeedRun {
    std::uint64_t seed = 0;
    std::string checkpoint_dir;
    RunHistory history;
};

/// One (strategy, architecture) cell of the grid.
struct CellRecord {
    std::string strategy;
    std::string architecture;
    /// Fingerprints of the classifier inputs, keyed by split.
    std::map<std::string, std::string> data_fingerprints;
    /// Augmentation record files, keyed by split.
    std::map<std::string, std::string> augmentation_records;
    std::vector<SeedRun> runs;
    std::optional<RunAggregate> aggregate;
};

struct ExperimentRecord {
    std::string experiment;
    std::string config_snapshot;
    std::string config_fingerprint;
    std::map<std::string, std::string> dataset_fingerprints;
    std::map<std::string, std::string> augmented_fingerprints;
    std::map<std::string, AugmentStats> augmentation_stats;  // per strategy
    std::vector<CellRecord> cells;
    std::vector<std::string> report_paths;
    std::map<std::string, double> timings;  // seconds per stage
    std::vector<std::string> stages_completed;
    bool complete = false;
    std::string failure;

    bool has_completed(Stage stage) const;
};

nlohmann::ordered_json to_json(const ExperimentRecord& record);
ExperimentRecord experiment_record_from_json(const nlohmann::json& json);

/// Drives the stages against the artifact tree under
/// `<output_dir>/<experiment>/`:
///
///   config.json            resolved configuration snapshot
///   manifest.json          ExperimentRecord
///   stages/<stage>.json    completion markers keyed by input digests
///   splits/                ingested train, dev and test splits (JSONL)
///   augmented/<strategy>/  classifier inputs and augmentation records
///   checkpoints/<strategy>/<architecture>/seed-<n>/
///   reports/               aggregates, report.json, report.txt
class Pipeline {
public:
    /// `client` overrides the client the configuration would build; it is
    /// only contacted for cache misses.
    explicit Pipeline(ExperimentConfig config, std::shared_ptr<LLMClient> client = nullptr);

    const ExperimentConfig& config() const noexcept { return config_; }
    std::string root() const;
    std::string manifest_path() const;

    /// Human-readable plan for `stages`; reads existing markers but writes
    /// nothing.
    std::vector<std::string> plan(const std::vector<Stage>& stages) const;

    /// Runs one stage, updating and persisting the manifest. On failure the
    /// manifest records the error and the exception propagates.
    void run_stage(Stage stage);

    /// All stages in order.
    const ExperimentRecord& run();

    const ExperimentRecord& record() const noexcept { return record_; }

private:
    void ingest();
    void augment();
    void train();
    void evaluate();
    void report();

    std::string stage_digest(Stage stage) const;
    std::optional<nlohmann::json> read_marker(Stage stage) const;
    void write_marker(Stage stage, const std::string& output_digest) const;
    void require(Stage stage) const;
    void persist() const;
    LLMClient& client();
    CellRecord& cell(const std::string& strategy, const std::string& architecture);

    std::string path(const std::string& relative) const;

    ExperimentConfig config_;
    std::shared_ptr<LLMClient> client_;
    ExperimentRecord record_;
};

ExperimentRecord run_experiment(const ExperimentConfig& config, std::shared_ptr<LLMClient> client = nullptr);

}  // namespace irony
