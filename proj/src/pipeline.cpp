#include "irony/pipeline.hpp"

#include "irony/checkpoint.hpp"
#include "irony/log.hpp"
#include "irony/report.hpp"
#include "irony/trainer.hpp"
#include "irony/util.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace irony {

namespace fs = std::filesystem;

namespace {

const char* kSplitFiles[] = {"train", "dev", "test"};

std::string sha_of_parts(std::initializer_list<std::string_view> parts) {
    std::string buffer;
    for (auto p : parts) {
        buffer += std::to_string(p.size());
        buffer += ':';
        buffer += p;
    }
    return sha256_hex(buffer);
}

std::string file_digest(const std::string& path) { return sha256_hex(read_file(path)); }

DatasetSplit load_jsonl(const std::string& path, SplitName name) { return from_jsonl(read_file(path), name); }

SplitName split_name_for(const std::string& file) {
    if (file == "train") return SplitName::train;
    if (file == "test") return SplitName::test;
    return SplitName::custom;
}

nlohmann::ordered_json stats_json(const AugmentStats& s) {
    return {{"hits", s.hits},
            {"misses", s.misses},
            {"fallbacks", s.fallbacks},
            {"passthrough", s.passthrough},
            {"hit_rate", s.hit_rate()}};
}

AugmentStats stats_from_json(const nlohmann::json& j) {
    AugmentStats s;
    s.hits = j.at("hits").get<std::size_t>();
    s.misses = j.at("misses").get<std::size_t>();
    s.fallbacks = j.at("fallbacks").get<std::size_t>();
    s.passthrough = j.at("passthrough").get<std::size_t>();
    return s;
}

std::string seed_dir_name(std::uint64_t seed) { return "seed-" + std::to_string(seed); }

std::size_t count_lines(const std::string& path) {
    std::ifstream in(path);
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) ++n;
    }
    return n;
}

bool selection_improves(const EpochRecord& e, const std::optional<double>& best, bool use_dev) {
    const auto& m = use_dev ? e.dev : e.test;
    if (!m) return !best;
    return !best || m->f1 > *best;
}

}  // namespace

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::ingest: return "ingest";
        case Stage::augment: return "augment";
        case Stage::train: return "train";
        case Stage::evaluate: return "evaluate";
        case Stage::report: return "report";
    }
    return "unknown";
}

Stage stage_from_string(std::string_view name) {
    for (auto s : all_stages()) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown stage '" + std::string(name) + "'");
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages{Stage::ingest, Stage::augment, Stage::train, Stage::evaluate,
                                           Stage::report};
    return stages;
}

MissingStage::MissingStage(Stage required, const std::string& detail)
    : PipelineError("missing prerequisite stage '" + to_string(required) + "': " + detail), required_(required) {}

bool ExperimentRecord::has_completed(Stage stage) const {
    return std::find(stages_completed.begin(), stages_completed.end(), to_string(stage)) != stages_completed.end();
}

nlohmann::ordered_json to_json(const ExperimentRecord& r) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["complete"] = r.complete;
    j["failure"] = r.failure.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.failure);
    j["stages_completed"] = r.stages_completed;
    j["config_fingerprint"] = r.config_fingerprint;
    j["config_snapshot"] = r.config_snapshot;
    j["dataset_fingerprints"] = r.dataset_fingerprints;
    j["augmented_fingerprints"] = r.augmented_fingerprints;
    j["augmentation_stats"] = nlohmann::ordered_json::object();
    for (const auto& [strategy, stats] : r.augmentation_stats) j["augmentation_stats"][strategy] = stats_json(stats);
    j["cells"] = nlohmann::ordered_json::array();
    for (const auto& c : r.cells) {
        nlohmann::ordered_json cell;
        cell["strategy"] = c.strategy;
        cell["architecture"] = c.architecture;
        cell["data_fingerprints"] = c.data_fingerprints;
        cell["augmentation_records"] = c.augmentation_records;
        cell["runs"] = nlohmann::ordered_json::array();
        for (const auto& run : c.runs) {
            cell["runs"].push_back(
                {{"seed", run.seed}, {"checkpoint", run.checkpoint_dir}, {"history", to_json(run.history)}});
        }
        cell["aggregate"] = c.aggregate ? to_json(*c.aggregate) : nlohmann::ordered_json(nullptr);
        j["cells"].push_back(std::move(cell));
    }
    j["report_paths"] = r.report_paths;
    j["timings"] = r.timings;
    return j;
}

ExperimentRecord experiment_record_from_json(const nlohmann::json& j) {
    ExperimentRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.complete = j.at("complete").get<bool>();
    if (!j.at("failure").is_null()) r.failure = j.at("failure").get<std::string>();
    r.stages_completed = j.at("stages_completed").get<std::vector<std::string>>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.config_snapshot = j.at("config_snapshot").get<std::string>();
    r.dataset_fingerprints = j.at("dataset_fingerprints").get<std::map<std::string, std::string>>();
    r.augmented_fingerprints = j.at("augmented_fingerprints").get<std::map<std::string, std::string>>();
    for (const auto& [strategy, stats] : j.at("augmentation_stats").items()) {
        r.augmentation_stats[strategy] = stats_from_json(stats);
    }
    for (const auto& c : j.at("cells")) {
        CellRecord cell;
        cell.strategy = c.at("strategy").get<std::string>();
        cell.architecture = c.at("architecture").get<std::string>();
        cell.data_fingerprints = c.at("data_fingerprints").get<std::map<std::string, std::string>>();
        cell.augmentation_records = c.at("augmentation_records").get<std::map<std::string, std::string>>();
        for (const auto& run : c.at("runs")) {
            cell.runs.push_back({run.at("seed").get<std::uint64_t>(), run.at("checkpoint").get<std::string>(),
                                 run_history_from_json(run.at("history"))});
        }
        if (!c.at("aggregate").is_null()) cell.aggregate = run_aggregate_from_json(c.at("aggregate"));
        r.cells.push_back(std::move(cell));
    }
    r.report_paths = j.at("report_paths").get<std::vector<std::string>>();
    r.timings = j.at("timings").get<std::map<std::string, double>>();
    return r;
}

Pipeline::Pipeline(ExperimentConfig config, std::shared_ptr<LLMClient> client)
    : config_(std::move(config)), client_(std::move(client)) {
    validate(config_);
    record_.experiment = config_.name;
    record_.config_snapshot = snapshot(config_);
    record_.config_fingerprint = sha256_hex(record_.config_snapshot);
    if (fs::is_regular_file(manifest_path())) {
        try {
            auto previous = experiment_record_from_json(nlohmann::json::parse(read_file(manifest_path())));
            if (previous.config_fingerprint == record_.config_fingerprint) record_ = std::move(previous);
        } catch (const std::exception& ex) {
            log_warn("ignoring unreadable manifest " + manifest_path() + ": " + ex.what());
        }
    }
}

std::string Pipeline::root() const { return config_.experiment_dir(); }

std::string Pipeline::manifest_path() const { return path("manifest.json"); }

std::string Pipeline::path(const std::string& relative) const { return (fs::path(root()) / relative).string(); }

LLMClient& Pipeline::client() {
    if (!client_) {
        if (config_.augment.client == "mock") {
            client_ = std::make_shared<MockLLMClient>(config_.augment.mock_template);
        } else {
            client_ = std::make_shared<ChatCompletionsClient>(config_.augment.endpoint, config_.augment.api_key_env,
                                                              config_.augment.llm.request_timeout);
        }
    }
    return *client_;
}

CellRecord& Pipeline::cell(const std::string& strategy, const std::string& architecture) {
    for (auto& c : record_.cells) {
        if (c.strategy == strategy && c.architecture == architecture) return c;
    }
    record_.cells.push_back({strategy, architecture, {}, {}, {}, std::nullopt});
    return record_.cells.back();
}

std::optional<nlohmann::json> Pipeline::read_marker(Stage stage) const {
    const auto file = path("stages/" + to_string(stage) + ".json");
    if (!fs::is_regular_file(file)) return std::nullopt;
    try {
        return nlohmann::json::parse(read_file(file));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string Pipeline::stage_digest(Stage stage) const {
    const auto cfg = to_json(config_);
    auto upstream = [&](Stage s) -> std::string {
        const auto marker = read_marker(s);
        return marker ? marker->value("output_digest", std::string{}) : std::string{};
    };
    switch (stage) {
        case Stage::ingest:
            return sha_of_parts({"ingest", cfg.at("dataset").dump(), file_digest(config_.dataset.train_path),
                                 file_digest(config_.dataset.test_path)});
        case Stage::augment: {
            auto aug = cfg.at("augment");
            for (const char* operational : {"max_attempts", "backoff_ms", "request_timeout_ms",
                                            "max_concurrent_requests", "cache", "endpoint", "api_key_env"}) {
                aug.erase(operational);
            }
            return sha_of_parts({"augment", aug.dump(), upstream(Stage::ingest)});
        }
        case Stage::train:
            return sha_of_parts({"train", cfg.at("model").dump(), cfg.at("train").dump(),
                                 cfg.at("eval").at("seeds").dump(), upstream(Stage::augment)});
        case Stage::evaluate:
            return sha_of_parts({"evaluate", upstream(Stage::train)});
        case Stage::report:
            return sha_of_parts({"report", file_digest(config_.eval.baselines_path), upstream(Stage::evaluate)});
    }
    return {};
}

void Pipeline::write_marker(Stage stage, const std::string& output_digest) const {
    nlohmann::ordered_json marker;
    marker["stage"] = to_string(stage);
    marker["input_digest"] = stage_digest(stage);
    marker["output_digest"] = output_digest;
    marker["meta"] = {{"completed_at", utc_timestamp()}};
    write_file(path("stages/" + to_string(stage) + ".json"), marker.dump(2) + "\n");
}

void Pipeline::require(Stage stage) const {
    const auto marker = read_marker(stage);
    if (!marker) {
        throw MissingStage(stage, "no completed " + to_string(stage) + " stage under " + root() + "; run `" +
                                      to_string(stage) + "` first");
    }
    if (marker->value("input_digest", std::string{}) != stage_digest(stage)) {
        throw MissingStage(stage, to_string(stage) + " artifacts under " + root() +
                                      " are stale for the current configuration; rerun `" + to_string(stage) + "`");
    }
}

void Pipeline::persist() const {
    write_file(path("config.json"), record_.config_snapshot);
    write_file(manifest_path(), to_json(record_).dump(2) + "\n");
}

void Pipeline::run_stage(Stage stage) {
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (stage) {
            case Stage::ingest: ingest(); break;
            case Stage::augment: augment(); break;
            case Stage::train: train(); break;
            case Stage::evaluate: evaluate(); break;
            case Stage::report: report(); break;
        }
    } catch (const MissingStage&) {
        throw;
    } catch (const std::exception& ex) {
        record_.failure = to_string(stage) + ": " + ex.what();
        record_.complete = false;
        persist();
        throw;
    }
    record_.timings[to_string(stage)] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record_.failure.clear();

    // a rerun upstream stage invalidates downstream markers that no longer match
    record_.stages_completed.clear();
    for (auto s : all_stages()) {
        const auto marker = read_marker(s);
        if (marker && marker->value("input_digest", std::string{}) == stage_digest(s)) {
            record_.stages_completed.push_back(to_string(s));
        }
    }
    record_.complete = record_.stages_completed.size() == all_stages().size();
    persist();
}

const ExperimentRecord& Pipeline::run() {
    for (auto s : all_stages()) run_stage(s);
    return record_;
}

void Pipeline::ingest() {
    const auto& ds = config_.dataset;
    const auto raw_train = load_split(ds.train_path, SplitName::train);
    const auto raw_test = load_split(ds.test_path, SplitName::test);
    for (const auto* split : {&raw_train, &raw_test}) {
        const auto report = validate_split(*split);
        if (!report.passed()) {
            throw PipelineError("ingest: " + to_string(split->name()) + " split failed validation: " + report.summary());
        }
        const auto counts = split->class_counts();
        log_info("ingest: " + to_string(split->name()) + " has " + std::to_string(split->size()) + " examples (" +
                 std::to_string(counts.at(Label::ironic)) + " ironic, " +
                 std::to_string(counts.at(Label::non_ironic)) + " non-ironic)");
    }

    auto train = ds.train_per_class ? subsample(raw_train, *ds.train_per_class, ds.seed) : raw_train;
    auto test = ds.test_per_class ? subsample(raw_test, *ds.test_per_class, ds.seed) : raw_test;
    std::optional<DatasetSplit> dev;
    if (ds.dev_fraction > 0.0) {
        auto [remaining, held_out] = split_holdout(train, ds.dev_fraction, ds.seed);
        train = std::move(remaining);
        dev = std::move(held_out);
    }

    record_.dataset_fingerprints.clear();
    record_.dataset_fingerprints["source_train"] = fingerprint(raw_train);
    record_.dataset_fingerprints["source_test"] = fingerprint(raw_test);
    std::string outputs;
    auto emit = [&](const std::string& name, const DatasetSplit& split) {
        const auto text = to_jsonl(split);
        write_file(path("splits/" + name + ".jsonl"), text);
        record_.dataset_fingerprints[name] = fingerprint(split);
        outputs += record_.dataset_fingerprints[name];
    };
    emit("train", train);
    if (dev) {
        emit("dev", *dev);
    } else {
        fs::remove(path("splits/dev.jsonl"));
    }
    emit("test", test);
    write_marker(Stage::ingest, sha256_hex(outputs));
}

void Pipeline::augment() {
    require(Stage::ingest);
    std::vector<std::pair<std::string, DatasetSplit>> splits;
    for (const char* name : kSplitFiles) {
        const auto file = path(std::string("splits/") + name + ".jsonl");
        if (fs::is_regular_file(file)) splits.emplace_back(name, load_jsonl(file, split_name_for(name)));
    }

    const auto& settings = config_.augment;
    auto wants = [&](const std::string& split) {
        const auto target = split == "test" ? SplitName::test : SplitName::train;
        return std::find(settings.splits.begin(), settings.splits.end(), target) != settings.splits.end();
    };
    const bool needs_client = std::any_of(settings.strategies.begin(), settings.strategies.end(),
                                          [](StrategyId s) { return s != StrategyId::none; });
    MockLLMClient unused_client;
    LLMClient& llm = needs_client ? client() : static_cast<LLMClient&>(unused_client);

    AugmentationCache cache(config_.cache_path());
    Augmenter augmenter(llm, cache, settings.llm);

    std::string outputs;
    for (auto strategy_id : settings.strategies) {
        const auto strategy = std::string(to_string(strategy_id));
        AugmentStats stats;
        std::map<std::string, std::string> record_paths;
        for (const auto& [name, split] : splits) {
            const auto applied = wants(name) ? PromptStrategy::of(strategy_id) : PromptStrategy::of(StrategyId::none);
            const auto result = augmenter.augment_split(split, applied, settings.replace_policy);
            stats += result.stats;

            const auto split_file = "augmented/" + strategy + "/" + name + ".jsonl";
            const auto records_file = "augmented/" + strategy + "/" + name + ".records.jsonl";
            const auto split_text = to_jsonl(result.split);
            std::string records_text;
            for (const auto& r : result.records) records_text += to_json(r).dump() + "\n";
            write_file(path(split_file), split_text);
            write_file(path(records_file), records_text);
            outputs += sha256_hex(split_text) + sha256_hex(records_text);

            record_.augmented_fingerprints[strategy + "/" + name] = fingerprint(result.split);
            record_paths[name] = path(records_file);
        }
        record_.augmentation_stats[strategy] = stats;
        for (auto a : config_.architectures) cell(strategy, to_string(a)).augmentation_records = record_paths;

        std::ostringstream msg;
        msg << "augment: " << strategy << " hits=" << stats.hits << " misses=" << stats.misses
            << " fallbacks=" << stats.fallbacks << " passthrough=" << stats.passthrough
            << " hit_rate=" << format_double(stats.hit_rate());
        log_info(msg.str());
    }
    write_marker(Stage::augment, sha256_hex(outputs));
}

void Pipeline::train() {
    require(Stage::augment);
    std::string outputs;
    for (auto strategy_id : config_.augment.strategies) {
        const auto strategy = std::string(to_string(strategy_id));
        std::map<std::string, DatasetSplit> data;
        for (const char* name : kSplitFiles) {
            const auto file = path("augmented/" + strategy + "/" + name + ".jsonl");
            if (fs::is_regular_file(file)) data.emplace(name, load_jsonl(file, split_name_for(name)));
        }
        if (!data.count("train") || !data.count("test")) {
            throw MissingStage(Stage::augment, "no augmented splits for strategy " + strategy + "; rerun `augment`");
        }
        const DatasetSplit* dev = data.count("dev") ? &data.at("dev") : nullptr;
        const DatasetSplit& train_split = data.at("train");
        const DatasetSplit& test_split = data.at("test");

        for (auto arch : config_.architectures) {
            auto& c = cell(strategy, to_string(arch));
            c.data_fingerprints.clear();
            for (const auto& [name, split] : data) c.data_fingerprints[name] = fingerprint(split);
            c.runs.clear();
            c.aggregate.reset();

            const auto& spec = config_.backend_for(arch);
            for (auto seed : config_.eval.seeds) {
                const auto rel = "checkpoints/" + strategy + "/" + to_string(arch) + "/" + seed_dir_name(seed);
                const auto dir = path(rel);
                const auto tc = config_.training_for(arch, seed);
                const auto digest = sha_of_parts({to_json(tc).dump(), to_json(spec).dump(),
                                                  c.data_fingerprints["train"], c.data_fingerprints["dev"],
                                                  c.data_fingerprints["test"]});
                const auto done_file = dir + "/done.json";
                const auto history_file = dir + "/history.json";
                if (fs::is_regular_file(done_file) && fs::is_regular_file(history_file)) {
                    try {
                        const auto done = nlohmann::json::parse(read_file(done_file));
                        if (done.value("input_digest", std::string{}) == digest) {
                            const auto history_text = read_file(history_file);
                            c.runs.push_back({seed, dir, run_history_from_json(nlohmann::json::parse(history_text))});
                            outputs += sha256_hex(history_text);
                            log_info("train: " + rel + " is up to date");
                            continue;
                        }
                    } catch (const std::exception& ex) {
                        log_warn("train: retraining " + rel + ": " + ex.what());
                    }
                }

                log_info("train: " + rel);
                fs::remove(done_file);
                auto model = std::make_shared<IronyClassifier>(make_backend(spec, seed), tc.dropout);
                CheckpointManifest manifest{spec, tc, 0.5, seed, fingerprint(train_split),
                                            model->backend().tokenizer().describe()};
                const bool select_on_dev = dev != nullptr;
                std::optional<double> best;
                auto on_epoch = [&](const EpochRecord& e) {
                    if (!selection_improves(e, best, select_on_dev)) return;
                    const auto& m = select_on_dev ? e.dev : e.test;
                    best = m ? m->f1 : 0.0;
                    save_checkpoint(dir, *model, manifest);
                };
                RunHistory history;
                history.seed = seed;
                history.epochs = irony::train(*model, train_split, tc, {dev, &test_split}, on_epoch);
                if (history.epochs.empty()) save_checkpoint(dir, *model, manifest);

                const auto history_text = to_json(history).dump(2) + "\n";
                write_file(history_file, history_text);
                nlohmann::ordered_json done{{"input_digest", digest}, {"history_digest", sha256_hex(history_text)}};
                write_file(done_file, done.dump(2) + "\n");
                outputs += sha256_hex(history_text);
                c.runs.push_back({seed, dir, std::move(history)});
            }
        }
    }
    write_marker(Stage::train, sha256_hex(outputs));
}

void Pipeline::evaluate() {
    require(Stage::train);
    nlohmann::ordered_json aggregates = nlohmann::ordered_json::array();
    for (auto strategy_id : config_.augment.strategies) {
        const auto strategy = std::string(to_string(strategy_id));
        const auto test = load_jsonl(path("augmented/" + strategy + "/test.jsonl"), SplitName::test);
        for (auto arch : config_.architectures) {
            auto& c = cell(strategy, to_string(arch));
            c.runs.clear();
            std::vector<RunHistory> histories;
            for (auto seed : config_.eval.seeds) {
                const auto dir =
                    path("checkpoints/" + strategy + "/" + to_string(arch) + "/" + seed_dir_name(seed));
                if (!fs::is_regular_file(dir + "/done.json")) {
                    throw MissingStage(Stage::train, "no completed run in " + dir + "; run `train` first");
                }
                auto history = run_history_from_json(nlohmann::json::parse(read_file(dir + "/history.json")));
                const auto loaded = load_checkpoint(dir);
                const auto predictions = predict_split(*loaded.model, test);
                const auto m = metrics(confusion(std::span<const Prediction>(predictions), test));

                std::string lines;
                std::map<std::int64_t, Label> gold;
                for (const auto& e : test.examples()) gold[e.id] = e.label;
                for (const auto& p : predictions) {
                    nlohmann::ordered_json row{{"id", p.id},
                                               {"probability", p.probability},
                                               {"label", to_int(p.label)},
                                               {"gold", to_int(gold.at(p.id))}};
                    lines += row.dump() + "\n";
                }
                write_file(dir + "/predictions.jsonl", lines);

                nlohmann::ordered_json summary{{"seed", seed}, {"test", to_json(m)}};
                if (!history.epochs.empty()) {
                    const auto best = select_best_epoch(history);
                    const auto& recorded = history.epochs[best].test;
                    summary["best_epoch"] = history.epochs[best].epoch;
                    if (recorded && !(*recorded == m)) {
                        throw PipelineError("evaluate: checkpoint " + dir +
                                            " does not reproduce the test metrics recorded during training");
                    }
                }
                write_file(dir + "/evaluation.json", summary.dump(2) + "\n");
                c.runs.push_back({seed, dir, history});
                histories.push_back(std::move(history));
            }
            c.aggregate = aggregate(std::span<const RunHistory>(histories));
            nlohmann::ordered_json row;
            row["strategy"] = strategy;
            row["architecture"] = to_string(arch);
            row["data_fingerprints"] = c.data_fingerprints;
            row["aggregate"] = to_json(*c.aggregate);
            aggregates.push_back(std::move(row));
        }
    }
    const auto text = aggregates.dump(2) + "\n";
    write_file(path("reports/aggregates.json"), text);
    write_marker(Stage::evaluate, sha256_hex(text));
}

void Pipeline::report() {
    require(Stage::evaluate);
    const auto aggregates = nlohmann::json::parse(read_file(path("reports/aggregates.json")));
    ResultGrid grid;
    for (const auto& row : aggregates) {
        grid[{row.at("strategy").get<std::string>(), row.at("architecture").get<std::string>()}] =
            run_aggregate_from_json(row.at("aggregate"));
    }
    ReportMeta meta;
    meta.config_fingerprint = record_.config_fingerprint;
    meta.generated_at = utc_timestamp();
    meta.seeds = config_.eval.seeds;
    meta.extra["experiment"] = config_.name;
    meta.extra["manifest"] = manifest_path();
    meta.extra["dataset_fingerprints"] = record_.dataset_fingerprints;
    const auto doc = render_report(grid, load_baselines(config_.eval.baselines_path), meta);

    const auto json_path = path("reports/report.json");
    const auto text_path = path("reports/report.txt");
    write_file(json_path, doc.json.dump(2) + "\n");
    write_file(text_path, doc.text);
    record_.report_paths = {json_path, text_path, path("reports/aggregates.json")};
    write_marker(Stage::report, sha256_hex(doc.text));
}

std::vector<std::string> Pipeline::plan(const std::vector<Stage>& stages) const {
    std::vector<std::string> lines;
    lines.push_back("experiment " + config_.name + " -> " + root());
    const auto n_strategies = config_.augment.strategies.size();
    const auto n_arch = config_.architectures.size();
    const auto n_seeds = config_.eval.seeds.size();
    for (auto s : stages) {
        std::ostringstream line;
        line << to_string(s) << ": ";
        switch (s) {
            case Stage::ingest: {
                const auto& ds = config_.dataset;
                line << "read " << ds.train_path << " and " << ds.test_path;
                if (ds.train_per_class) line << "; subsample train to " << *ds.train_per_class << " per class";
                if (ds.test_per_class) line << "; subsample test to " << *ds.test_per_class << " per class";
                if (ds.dev_fraction > 0.0) line << "; hold out " << format_double(ds.dev_fraction) << " of train as dev";
                line << "; write splits/";
                break;
            }
            case Stage::augment: {
                line << "strategies [";
                for (std::size_t i = 0; i < n_strategies; ++i) {
                    line << (i ? ", " : "") << to_string(config_.augment.strategies[i]);
                }
                line << "] on [";
                for (std::size_t i = 0; i < config_.augment.splits.size(); ++i) {
                    line << (i ? ", " : "") << to_string(config_.augment.splits[i]);
                }
                line << "] via " << config_.augment.client << " (" << config_.augment.llm.model_id << ", temperature "
                     << format_double(config_.augment.llm.temperature) << "), policy "
                     << to_string(config_.augment.replace_policy) << "; cache " << config_.cache_path() << " holds "
                     << count_lines(config_.cache_path()) << " records";
                break;
            }
            case Stage::train:
                line << n_strategies << " strategies x " << n_arch << " architectures x " << n_seeds
                     << " seeds = " << n_strategies * n_arch * n_seeds << " runs; write checkpoints/";
                break;
            case Stage::evaluate:
                line << "score " << n_strategies * n_arch * n_seeds
                     << " checkpoints on the test split, aggregate over seeds; write reports/aggregates.json";
                break;
            case Stage::report:
                line << "render " << n_strategies << "x" << n_arch << " grid and ranking with baselines from "
                     << config_.eval.baselines_path << "; write reports/report.{txt,json}";
                break;
        }
        const auto marker = read_marker(s);
        bool current = false;
        try {
            current = marker && marker->value("input_digest", std::string{}) == stage_digest(s);
        } catch (const std::exception&) {
        }
        line << (current ? " [up to date]" : " [pending]");
        lines.push_back(line.str());
    }
    return lines;
}

ExperimentRecord run_experiment(const ExperimentConfig& config, std::shared_ptr<LLMClient> client) {
    Pipeline pipeline(config, std::move(client));
    return pipeline.run();
}

}  // namespace irony
