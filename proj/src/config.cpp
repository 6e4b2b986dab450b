#include "irony/config.hpp"

#include "irony/util.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <filesystem>
#include <set>

#ifndef IRONY_DATA_DIR
#define IRONY_DATA_DIR "data"
#endif

namespace irony {

namespace fs = std::filesystem;

namespace {

std::string interpolate(const std::string& raw, const std::string& key) {
    std::string out;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const auto open = raw.find("${", pos);
        if (open == std::string::npos) {
            out += raw.substr(pos);
            break;
        }
        const auto close = raw.find('}', open);
        if (close == std::string::npos) throw ConfigError(key + ": unterminated ${ in '" + raw + "'");
        out += raw.substr(pos, open - pos);
        std::string name = raw.substr(open + 2, close - open - 2);
        std::optional<std::string> fallback;
        if (const auto sep = name.find(":-"); sep != std::string::npos) {
            fallback = name.substr(sep + 2);
            name = name.substr(0, sep);
        }
        if (const char* value = std::getenv(name.c_str()); value && *value) {
            out += value;
        } else if (fallback) {
            out += *fallback;
        } else {
            throw ConfigError(key + ": environment variable " + name + " is not set");
        }
        pos = close + 1;
    }
    return out;
}

class Section {
public:
    Section(YAML::Node node, std::string path, std::set<std::string> allowed)
        : node_(std::move(node)), path_(std::move(path)) {
        if (!node_ || node_.IsNull()) return;
        if (!node_.IsMap()) throw ConfigError(path_ + " must be a mapping");
        std::set<std::string> seen;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) throw ConfigError("unknown config key " + qualify(key));
            if (!seen.insert(key).second) throw ConfigError("duplicate config key " + qualify(key));
        }
    }

    bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull(); }
    YAML::Node raw(const std::string& key) const { return has(key) ? node_[key] : YAML::Node(); }
    std::string qualify(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <typename T>
    T get(const std::string& key, T fallback) const {
        if (!has(key)) return fallback;
        try {
            if constexpr (std::is_same_v<T, std::string>) {
                return interpolate(node_[key].as<std::string>(), qualify(key));
            } else {
                // scalars may also come from the environment
                return YAML::Load(interpolate(node_[key].as<std::string>(), qualify(key))).as<T>();
            }
        } catch (const YAML::Exception& ex) {
            throw ConfigError(qualify(key) + ": " + ex.what());
        }
    }

    std::vector<std::string> list(const std::string& key, std::vector<std::string> fallback) const {
        if (!has(key)) return fallback;
        const auto n = node_[key];
        std::vector<std::string> out;
        try {
            if (n.IsSequence()) {
                for (const auto& item : n) out.push_back(interpolate(item.as<std::string>(), qualify(key)));
            } else {
                out.push_back(interpolate(n.as<std::string>(), qualify(key)));
            }
        } catch (const YAML::Exception& ex) {
            throw ConfigError(qualify(key) + ": " + ex.what());
        }
        return out;
    }

private:
    YAML::Node node_;
    std::string path_;
};

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (fs::absolute(fs::path(base_dir)) / p).lexically_normal().string();
}

template <typename Fn>
auto wrap(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(key + ": " + ex.what());
    }
}

void apply_backend_overrides(BackendSpec& spec, const Section& s, const std::string& base_dir) {
    spec.model_name = s.get<std::string>("model_name", spec.model_name);
    spec.hidden_size = s.get<int>("hidden_size", spec.hidden_size);
    spec.max_sequence_length = s.get<int>("max_sequence_length", spec.max_sequence_length);
    if (s.has("pooling_rule")) {
        spec.pooling = wrap(s.qualify("pooling_rule"), [&] { return pooling_from_string(s.get<std::string>("pooling_rule", "")); });
    }
    spec.num_layers = s.get<int>("num_layers", spec.num_layers);
    spec.num_heads = s.get<int>("num_heads", spec.num_heads);
    spec.ffn_size = s.get<int>("ffn_size", spec.ffn_size);
    spec.vocab_size = s.get<int>("vocab_size", spec.vocab_size);
    spec.internal_dropout = s.get<double>("internal_dropout", spec.internal_dropout);
    spec.torchscript_path = resolve_path(base_dir, s.get<std::string>("torchscript_path", spec.torchscript_path));
    spec.vocab_path = resolve_path(base_dir, s.get<std::string>("vocab_path", spec.vocab_path));
    spec.vocab_style = s.get<std::string>("vocab_style", spec.vocab_style);
}

const std::set<std::string> kBackendKeys = {"model_name", "hidden_size", "max_sequence_length", "pooling_rule",
                                            "num_layers", "num_heads", "ffn_size", "vocab_size",
                                            "internal_dropout", "torchscript_path", "vocab_path", "vocab_style",
                                            "architecture"};

std::optional<std::size_t> optional_count(const Section& s, const std::string& key) {
    if (!s.has(key)) return std::nullopt;
    const auto v = s.get<long long>(key, 0);
    if (v <= 0) throw ConfigError(s.qualify(key) + " must be positive");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string ExperimentConfig::experiment_dir() const { return (fs::path(output_dir) / name).string(); }

std::string ExperimentConfig::cache_path() const {
    return augment.cache_path.empty() ? (fs::path(experiment_dir()) / "augmented" / "cache.jsonl").string()
                                      : augment.cache_path;
}

const BackendSpec& ExperimentConfig::backend_for(Architecture a) const {
    auto it = backends.find(a);
    if (it == backends.end()) throw ConfigError("no backend configured for " + to_string(a));
    return it->second;
}

TrainingConfig ExperimentConfig::training_for(Architecture a, std::uint64_t seed) const {
    TrainingConfig c = TrainingConfig::defaults_for(a);
    c.learning_rate = train.learning_rate;
    c.dropout = train.dropout;
    if (auto it = train.epochs.find(a); it != train.epochs.end()) c.epochs = it->second;
    c.batch_size = train.batch_size;
    c.seed = seed;
    c.adam = train.adam;
    return c;
}

ExperimentConfig parse_config(const std::string& yaml_text, const std::string& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& ex) {
        throw ConfigError(std::string("config is not valid YAML: ") + ex.what());
    }
    const Section top(root, "", {"experiment", "output_dir", "dataset", "augment", "model", "train", "eval"});
    ExperimentConfig c;
    c.name = top.get<std::string>("experiment", c.name);
    if (c.name.empty() || c.name.find('/') != std::string::npos) throw ConfigError("experiment must be a plain name");
    c.output_dir = resolve_path(base_dir, top.get<std::string>("output_dir", c.output_dir));

    const Section ds(top.raw("dataset"), "dataset",
                     {"train", "test", "train_per_class", "test_per_class", "dev_fraction", "seed"});
    c.dataset.train_path = resolve_path(base_dir, ds.get<std::string>("train", ""));
    c.dataset.test_path = resolve_path(base_dir, ds.get<std::string>("test", ""));
    c.dataset.train_per_class = optional_count(ds, "train_per_class");
    c.dataset.test_per_class = optional_count(ds, "test_per_class");
    c.dataset.dev_fraction = ds.get<double>("dev_fraction", c.dataset.dev_fraction);
    c.dataset.seed = ds.get<std::uint64_t>("seed", c.dataset.seed);

    const Section aug(top.raw("augment"), "augment",
                      {"strategy", "client", "endpoint", "api_key_env", "mock_template", "model_id", "temperature",
                       "max_attempts", "backoff_ms", "request_timeout_ms", "max_concurrent_requests",
                       "replace_policy", "splits", "cache"});
    c.augment.strategies.clear();
    for (const auto& s : aug.list("strategy", {"none"})) {
        c.augment.strategies.push_back(wrap("augment.strategy", [&] { return PromptStrategy::parse(s).id; }));
    }
    c.augment.client = aug.get<std::string>("client", c.augment.client);
    if (c.augment.client != "mock" && c.augment.client != "chat_completions") {
        throw ConfigError("augment.client must be mock or chat_completions");
    }
    c.augment.endpoint = aug.get<std::string>("endpoint", c.augment.endpoint);
    c.augment.api_key_env = aug.get<std::string>("api_key_env", c.augment.api_key_env);
    c.augment.mock_template = aug.get<std::string>("mock_template", c.augment.mock_template);
    c.augment.llm.model_id = aug.get<std::string>("model_id", c.augment.llm.model_id);
    c.augment.llm.temperature = aug.get<double>("temperature", c.augment.llm.temperature);
    c.augment.llm.max_attempts = aug.get<int>("max_attempts", c.augment.llm.max_attempts);
    c.augment.llm.backoff_base = std::chrono::milliseconds(aug.get<long long>("backoff_ms", c.augment.llm.backoff_base.count()));
    c.augment.llm.request_timeout =
        std::chrono::milliseconds(aug.get<long long>("request_timeout_ms", c.augment.llm.request_timeout.count()));
    c.augment.llm.max_concurrent_requests = aug.get<int>("max_concurrent_requests", c.augment.llm.max_concurrent_requests);
    wrap("augment", [&] {
        c.augment.llm.validate();
        return 0;
    });
    c.augment.replace_policy = wrap("augment.replace_policy", [&] {
        return replace_policy_from_string(aug.get<std::string>("replace_policy", "replace"));
    });
    c.augment.splits.clear();
    for (const auto& s : aug.list("splits", {"train", "test"})) {
        const auto name = wrap("augment.splits", [&] { return split_name_from_string(s); });
        if (name == SplitName::custom) throw ConfigError("augment.splits accepts train and test");
        c.augment.splits.push_back(name);
    }
    c.augment.cache_path = resolve_path(base_dir, aug.get<std::string>("cache", ""));

    const Section model(top.raw("model"), "model",
                        {"architecture", "name", "max_sequence_length", "hidden_size", "num_layers", "num_heads",
                         "ffn_size", "vocab_size", "internal_dropout", "pooling_rule", "backends"});
    c.architectures.clear();
    for (const auto& a : model.list("architecture", {"encoder"})) {
        c.architectures.push_back(wrap("model.architecture", [&] { return architecture_from_string(a); }));
    }
    const auto names = model.raw("name");
    const Section backends(model.raw("backends"), "model.backends", {"encoder", "decoder", "encoder_decoder"});
    for (auto a : c.architectures) {
        auto spec = BackendSpec::miniature(a);
        if (names && names.IsScalar()) spec.model_name = model.get<std::string>("name", spec.model_name);
        if (names && names.IsMap() && names[to_string(a)]) {
            spec.model_name = interpolate(names[to_string(a)].as<std::string>(), "model.name");
        }
        apply_backend_overrides(spec, model, base_dir);
        if (backends.has(to_string(a))) {
            apply_backend_overrides(spec, Section(backends.raw(to_string(a)), "model.backends." + to_string(a), kBackendKeys),
                                    base_dir);
        }
        wrap("model.backends." + to_string(a), [&] {
            spec.validate();
            return 0;
        });
        c.backends[a] = spec;
    }

    const Section tr(top.raw("train"), "train",
                     {"optimizer", "learning_rate", "dropout", "epochs", "batch_size", "seed", "adam"});
    if (tr.get<std::string>("optimizer", "adam") != "adam") throw ConfigError("train.optimizer must be adam");
    c.train.learning_rate = tr.get<double>("learning_rate", c.train.learning_rate);
    c.train.dropout = tr.get<double>("dropout", c.train.dropout);
    c.train.batch_size = tr.get<int>("batch_size", c.train.batch_size);
    c.train.seed = tr.get<std::uint64_t>("seed", c.train.seed);
    const auto epochs = tr.raw("epochs");
    for (auto a : c.architectures) {
        int e = TrainingConfig::defaults_for(a).epochs;
        if (epochs && epochs.IsScalar()) e = tr.get<int>("epochs", e);
        if (epochs && epochs.IsMap() && epochs[to_string(a)]) e = epochs[to_string(a)].as<int>();
        c.train.epochs[a] = e;
    }
    const Section adam(tr.raw("adam"), "train.adam", {"beta1", "beta2", "epsilon", "weight_decay"});
    c.train.adam.beta1 = adam.get<double>("beta1", c.train.adam.beta1);
    c.train.adam.beta2 = adam.get<double>("beta2", c.train.adam.beta2);
    c.train.adam.epsilon = adam.get<double>("epsilon", c.train.adam.epsilon);
    c.train.adam.weight_decay = adam.get<double>("weight_decay", c.train.adam.weight_decay);
    for (auto a : c.architectures) {
        wrap("train", [&] {
            c.training_for(a, 0).validate();
            return 0;
        });
    }

    const Section ev(top.raw("eval"), "eval", {"seeds", "baselines"});
    if (ev.has("seeds")) {
        for (const auto& s : ev.list("seeds", {})) {
            c.eval.seeds.push_back(wrap("eval.seeds", [&] { return static_cast<std::uint64_t>(std::stoull(s)); }));
        }
        if (c.eval.seeds.empty()) throw ConfigError("eval.seeds must not be empty");
    } else {
        c.eval.seeds = {c.train.seed, c.train.seed + 1, c.train.seed + 2};
    }
    c.eval.baselines_path =
        resolve_path(base_dir, ev.get<std::string>("baselines", std::string(IRONY_DATA_DIR) + "/baselines.json"));
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& ex) {
        throw ConfigError(ex.what());
    }
    return parse_config(text, fs::absolute(fs::path(path)).parent_path().string());
}

void validate(const ExperimentConfig& c) {
    auto require_file = [](const std::string& key, const std::string& path) {
        if (path.empty()) throw ConfigError(key + " is required");
        if (!fs::is_regular_file(path)) throw ConfigError(key + ": no such file " + path);
    };
    require_file("dataset.train", c.dataset.train_path);
    require_file("dataset.test", c.dataset.test_path);
    require_file("eval.baselines", c.eval.baselines_path);
    if (c.eval.seeds.empty()) throw ConfigError("eval.seeds must not be empty");
    if (c.augment.strategies.empty()) throw ConfigError("augment.strategy must list at least one strategy");
    if (c.architectures.empty()) throw ConfigError("model.architecture must list at least one architecture");
    if (!(c.dataset.dev_fraction >= 0.0 && c.dataset.dev_fraction < 1.0)) {
        throw ConfigError("dataset.dev_fraction must be in [0, 1)");
    }
    for (auto a : c.architectures) {
        const auto& spec = c.backend_for(a);
        if (!spec.is_miniature()) {
            require_file("model.backends." + to_string(a) + ".torchscript_path", spec.torchscript_path);
            require_file("model.backends." + to_string(a) + ".vocab_path", spec.vocab_path);
        }
    }
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = c.name;
    j["output_dir"] = c.output_dir;

    auto& ds = j["dataset"];
    ds["train"] = c.dataset.train_path;
    ds["test"] = c.dataset.test_path;
    ds["train_per_class"] = c.dataset.train_per_class ? nlohmann::ordered_json(*c.dataset.train_per_class) : nlohmann::ordered_json(nullptr);
    ds["test_per_class"] = c.dataset.test_per_class ? nlohmann::ordered_json(*c.dataset.test_per_class) : nlohmann::ordered_json(nullptr);
    ds["dev_fraction"] = c.dataset.dev_fraction;
    ds["seed"] = c.dataset.seed;

    auto& aug = j["augment"];
    aug["strategy"] = nlohmann::ordered_json::array();
    for (auto s : c.augment.strategies) aug["strategy"].push_back(std::string(to_string(s)));
    aug["client"] = c.augment.client;
    aug["endpoint"] = c.augment.endpoint;
    aug["api_key_env"] = c.augment.api_key_env;
    aug["mock_template"] = c.augment.mock_template;
    aug["model_id"] = c.augment.llm.model_id;
    aug["temperature"] = c.augment.llm.temperature;
    aug["max_attempts"] = c.augment.llm.max_attempts;
    aug["backoff_ms"] = c.augment.llm.backoff_base.count();
    aug["request_timeout_ms"] = c.augment.llm.request_timeout.count();
    aug["max_concurrent_requests"] = c.augment.llm.max_concurrent_requests;
    aug["replace_policy"] = std::string(to_string(c.augment.replace_policy));
    aug["splits"] = nlohmann::ordered_json::array();
    for (auto s : c.augment.splits) aug["splits"].push_back(to_string(s));
    aug["cache"] = c.augment.cache_path;

    auto& model = j["model"];
    model["architecture"] = nlohmann::ordered_json::array();
    for (auto a : c.architectures) model["architecture"].push_back(to_string(a));
    model["backends"] = nlohmann::ordered_json::object();
    for (auto a : c.architectures) {
        auto spec = to_json(c.backend_for(a));
        spec.erase("architecture");
        model["backends"][to_string(a)] = spec;
    }

    auto& tr = j["train"];
    tr["optimizer"] = "adam";
    tr["learning_rate"] = c.train.learning_rate;
    tr["dropout"] = c.train.dropout;
    tr["epochs"] = nlohmann::ordered_json::object();
    for (auto a : c.architectures) tr["epochs"][to_string(a)] = c.train.epochs.at(a);
    tr["batch_size"] = c.train.batch_size;
    tr["seed"] = c.train.seed;
    tr["adam"] = {{"beta1", c.train.adam.beta1},
                  {"beta2", c.train.adam.beta2},
                  {"epsilon", c.train.adam.epsilon},
                  {"weight_decay", c.train.adam.weight_decay}};

    j["eval"] = {{"seeds", c.eval.seeds}, {"baselines", c.eval.baselines_path}};
    return j;
}

std::string snapshot(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

}  // namespace irony
