#include "irony/checkpoint.hpp"

#include "irony/util.hpp"

#include <filesystem>

namespace irony {

namespace fs = std::filesystem;

nlohmann::ordered_json to_json(const CheckpointManifest& m) {
    nlohmann::ordered_json j;
    j["architecture"] = to_string(m.backend.architecture);
    j["model_name"] = m.backend.model_name;
    j["hidden_size"] = m.backend.hidden_size;
    j["pooling_rule"] = to_string(m.backend.pooling);
    j["threshold"] = m.threshold;
    j["seed"] = m.seed;
    j["data_fingerprint"] = m.data_fingerprint;
    j["tokenizer"] = m.tokenizer;
    j["backend"] = to_json(m.backend);
    j["training"] = to_json(m.training);
    return j;
}

CheckpointManifest checkpoint_manifest_from_json(const nlohmann::json& j) {
    CheckpointManifest m;
    m.backend = backend_spec_from_json(j.at("backend"));
    m.training = training_config_from_json(j.at("training"));
    m.threshold = j.at("threshold").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.data_fingerprint = j.value("data_fingerprint", std::string{});
    m.tokenizer = j.value("tokenizer", std::string{});
    return m;
}

void save_checkpoint(const std::string& dir, IronyClassifier& model, const CheckpointManifest& manifest) {
    fs::create_directories(dir);
    torch::serialize::OutputArchive archive;
    model.save(archive);
    archive.save_to((fs::path(dir) / "classifier.pt").string());
    if (!model.backend().spec().is_miniature()) {
        model.backend().save_weights((fs::path(dir) / model.backend().weights_file()).string());
    }
    write_file((fs::path(dir) / "manifest.json").string(), to_json(manifest).dump(2) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::string& dir) {
    const auto manifest_path = fs::path(dir) / "manifest.json";
    if (!fs::exists(manifest_path)) throw BackendError("checkpoint " + dir + " has no manifest.json");
    LoadedCheckpoint out;
    out.manifest = checkpoint_manifest_from_json(nlohmann::json::parse(read_file(manifest_path.string())));

    auto spec = out.manifest.backend;
    if (!spec.is_miniature()) spec.torchscript_path = (fs::path(dir) / "backend.torchscript.pt").string();
    auto backend = make_backend(spec, out.manifest.seed);
    out.model = std::make_shared<IronyClassifier>(backend, out.manifest.training.dropout, out.manifest.threshold);
    try {
        torch::serialize::InputArchive archive;
        archive.load_from((fs::path(dir) / "classifier.pt").string());
        out.model->load(archive);
    } catch (const c10::Error& ex) {
        throw BackendError("cannot load checkpoint " + dir + ": " + ex.what_without_backtrace());
    }
    out.model->train(false);
    return out;
}

}  // namespace irony
