#pragma once

#include "irony/trainer.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

namespace irony {

struct CheckpointManifest {
    BackendSpec backend;
    TrainingConfig training;
    double threshold = 0.5;
    std::uint64_t seed = 0;
    std::string data_fingerprint;
    std::string tokenizer;
};

nlohmann::ordered_json to_json(const CheckpointManifest& manifest);
CheckpointManifest checkpoint_manifest_from_json(const nlohmann::json& json);

/// Writes `classifier.pt` (head, plus backbone for miniature backends), the
/// backend's own file for exported backends, and `manifest.json`.
void save_checkpoint(const std::string& dir, IronyClassifier& model, const CheckpointManifest& manifest);

struct LoadedCheckpoint {
    CheckpointManifest manifest;
    std::shared_ptr<IronyClassifier> model;
};

/// Throws BackendError when the directory is incomplete or shapes disagree.
LoadedCheckpoint load_checkpoint(const std::string& dir);

}  // namespace irony
