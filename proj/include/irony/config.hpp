#pragma once

#include "irony/augmentation.hpp"
#include "irony/model_spec.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irony {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetSettings {
    std::string train_path;
    std::string test_path;
    std::optional<std::size_t> train_per_class;
    std::optional<std::size_t> test_per_class;
    double dev_fraction = 0.1;
    std::uint64_t seed = 0;
};

struct AugmentSettings {
    std::vector<StrategyId> strategies{StrategyId::none};
    std::string client = "mock";  // mock | chat_completions
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    std::string mock_template = "{text}";
    LLMClientConfig llm;
    ReplacePolicy replace_policy = ReplacePolicy::replace;
    std::vector<SplitName> splits{SplitName::train, SplitName::test};
    std::string cache_path;  // empty: <experiment>/augmented/cache.jsonl
};

struct TrainSettings {
    double learning_rate = 0.00002;
    double dropout = 0.1;
    std::map<Architecture, int> epochs;
    int batch_size = 16;
    std::uint64_t seed = 0;
    AdamSettings adam;
};

struct EvalSettings {
    std::vector<std::uint64_t> seeds;
    std::string baselines_path;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::string output_dir = "out";
    DatasetSettings dataset;
    AugmentSettings augment;
    std::vector<Architecture> architectures{Architecture::encoder};
    std::map<Architecture, BackendSpec> backends;
    TrainSettings train;
    EvalSettings eval;

    std::string experiment_dir() const;
    std::string cache_path() const;
    const BackendSpec& backend_for(Architecture a) const;
    TrainingConfig training_for(Architecture a, std::uint64_t seed) const;
};

/// Parses a YAML experiment file. `${VAR}` and `${VAR:-default}` are
/// expanded from the environment; relative paths resolve against `base_dir`.
/// Every default is filled in, so the result is fully explicit.
ExperimentConfig parse_config(const std::string& yaml_text, const std::string& base_dir);
ExperimentConfig load_config(const std::string& path);

/// Throws ConfigError on a missing input file or an empty seed list.
void validate(const ExperimentConfig& config);

/// Canonical resolved form; `parse_config(to_json(c).dump(), "/")` yields `c`.
nlohmann::ordered_json to_json(const ExperimentConfig& config);
std::string snapshot(const ExperimentConfig& config);

}  // namespace irony
