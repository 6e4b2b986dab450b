#include "irony/checkpoint.hpp"
#include "irony/trainer.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace irony;

namespace {

const Architecture kArchitectures[] = {Architecture::encoder, Architecture::decoder, Architecture::encoder_decoder};

DatasetSplit toy_split(std::size_t per_class) {
    std::vector<LabeledExample> rows;
    for (std::size_t i = 0; i < per_class; ++i) {
        rows.push_back({static_cast<std::int64_t>(2 * i), "I love being stuck in traffic #not " + std::to_string(i % 3),
                        Label::ironic});
        rows.push_back({static_cast<std::int64_t>(2 * i + 1), "a lovely walk on the beach " + std::to_string(i % 3),
                        Label::non_ironic});
    }
    return DatasetSplit(SplitName::train, rows);
}

std::string temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "irony-tests" / name;
    std::filesystem::remove_all(dir);
    return dir.string();
}

std::vector<float> flat_parameters(IronyClassifier& model) {
    std::vector<float> out;
    for (const auto& p : model.parameters()) {
        auto t = p.detach().contiguous().view(-1);
        out.insert(out.end(), t.data_ptr<float>(), t.data_ptr<float>() + t.numel());
    }
    return out;
}

}  // namespace

TEST_CASE("table defaults per architecture") {
    const auto enc = TrainingConfig::defaults_for(Architecture::encoder);
    CHECK(enc.learning_rate == 0.00002);
    CHECK(enc.dropout == 0.1);
    CHECK(enc.epochs == 7);
    CHECK(enc.batch_size == 16);
    CHECK(enc.optimizer == "adam");
    CHECK(TrainingConfig::defaults_for(Architecture::decoder).epochs == 10);
    CHECK(TrainingConfig::defaults_for(Architecture::encoder_decoder).epochs == 10);
    CHECK(training_config_from_json(to_json(enc)).epochs == 7);
}

TEST_CASE("canonical pooling rules") {
    CHECK(canonical_pooling(Architecture::encoder) == PoolingRule::first_token);
    CHECK(canonical_pooling(Architecture::decoder) == PoolingRule::last_token);
    CHECK(canonical_pooling(Architecture::encoder_decoder) == PoolingRule::decoder_start);
    for (auto a : kArchitectures) {
        CHECK(BackendSpec::miniature(a).pooling == canonical_pooling(a));
        CHECK(architecture_from_string(to_string(a)) == a);
        const auto spec = BackendSpec::miniature(a);
        const auto back = backend_spec_from_json(to_json(spec));
        CHECK(back.pooling == spec.pooling);
        CHECK(back.hidden_size == spec.hidden_size);
    }
}

TEST_CASE("encode shape, determinism and truncation consistency") {
    for (auto a : kArchitectures) {
        auto spec = BackendSpec::miniature(a);
        spec.hidden_size = 32;
        spec.max_sequence_length = 12;
        auto backend = make_backend(spec, 1);
        const std::string text = "so happy to wake up for physio at five in the morning, what a treat #not 😒";
        const auto h1 = backend->encode(text);
        const auto h2 = backend->encode(text);
        CHECK(h1.size() == 32);
        CHECK(h1.values == h2.values);
        const auto truncated = truncate_to_tokens(backend->tokenizer(), text, backend->content_budget());
        CHECK(truncated.size() < text.size());
        CHECK(backend->encode(truncated).values == h1.values);
        CHECK(backend->encode("a different tweet").values != h1.values);
    }
}

TEST_CASE("same seed builds identical backends") {
    for (auto a : kArchitectures) {
        const auto spec = BackendSpec::miniature(a);
        CHECK(make_backend(spec, 4)->encode("x y z").values == make_backend(spec, 4)->encode("x y z").values);
        CHECK(make_backend(spec, 4)->encode("x y z").values != make_backend(spec, 5)->encode("x y z").values);
    }
}

TEST_CASE("pooled batch matches single encodes") {
    auto backend = make_backend(BackendSpec::miniature(Architecture::decoder), 2);
    backend->eval();
    torch::NoGradGuard guard;
    const std::vector<std::string> texts{"short", "a somewhat longer tweet with more words"};
    const auto pooled = backend->pooled(backend->tokenize(texts)).to(torch::kDouble);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const auto single = backend->encode(texts[i]);
        for (std::size_t j = 0; j < single.size(); ++j) {
            CHECK(pooled[i][j].item<double>() == doctest::Approx(single.values[j]).epsilon(1e-5));
        }
    }
}

TEST_CASE("backend spec validation") {
    auto spec = BackendSpec::miniature(Architecture::encoder);
    spec.hidden_size = 30;  // not divisible by 4 heads
    CHECK_THROWS_AS(spec.validate(), BackendError);
    spec = BackendSpec::miniature(Architecture::encoder);
    spec.max_sequence_length = 1;
    CHECK_THROWS_AS(spec.validate(), BackendError);
}

TEST_CASE("training lowers the loss on a separable fixture") {
    for (auto a : kArchitectures) {
        auto model = std::make_shared<IronyClassifier>(make_backend(BackendSpec::miniature(a), 0), 0.1);
        auto config = TrainingConfig::defaults_for(a);
        config.learning_rate = 1e-3;
        config.batch_size = 4;
        config.epochs = 3;
        const auto split = toy_split(10);
        const auto history = train(*model, split, config);
        REQUIRE(history.size() == 3);
        CHECK(history.back().train_loss < history.front().train_loss);
        CHECK_FALSE(history[0].dev.has_value());
    }
}

TEST_CASE("zero epochs leave parameters untouched") {
    auto model = std::make_shared<IronyClassifier>(make_backend(BackendSpec::miniature(Architecture::encoder), 0), 0.1);
    const auto before = flat_parameters(*model);
    auto config = TrainingConfig::defaults_for(Architecture::encoder);
    config.epochs = 0;
    CHECK(train(*model, toy_split(2), config).empty());
    CHECK(flat_parameters(*model) == before);
    CHECK_THROWS_AS(train(*model, DatasetSplit(SplitName::train, {}), TrainingConfig{}), EmptySplit);
}

TEST_CASE("training is reproducible for a fixed seed") {
    auto run = [] {
        auto model = std::make_shared<IronyClassifier>(make_backend(BackendSpec::miniature(Architecture::encoder), 3), 0.1);
        auto config = TrainingConfig::defaults_for(Architecture::encoder);
        config.learning_rate = 1e-3;
        config.epochs = 2;
        config.seed = 3;
        const auto split = toy_split(6);
        train(*model, split, config, {&split, &split});
        return std::make_pair(flat_parameters(*model), predict_split(*model, split));
    };
    const auto a = run();
    const auto b = run();
    CHECK(a.first == b.first);
    REQUIRE(a.second.size() == b.second.size());
    for (std::size_t i = 0; i < a.second.size(); ++i) CHECK(a.second[i].probability == b.second[i].probability);
}

TEST_CASE("history carries dev and test metrics when supplied") {
    auto model = std::make_shared<IronyClassifier>(make_backend(BackendSpec::miniature(Architecture::decoder), 0), 0.1);
    auto config = TrainingConfig::defaults_for(Architecture::decoder);
    config.epochs = 2;
    const auto split = toy_split(4);
    int callbacks = 0;
    const auto history = train(*model, split, config, {&split, &split}, [&](const EpochRecord&) { ++callbacks; });
    CHECK(callbacks == 2);
    for (const auto& e : history) {
        CHECK(e.dev.has_value());
        CHECK(e.test.has_value());
    }
}

TEST_CASE("predictions are ordered, deterministic and follow the head") {
    auto model = std::make_shared<IronyClassifier>(make_backend(BackendSpec::miniature(Architecture::encoder), 0), 0.1);
    const auto split = toy_split(5);
    const auto p1 = predict_split(*model, split, 3);
    const auto p2 = predict_split(*model, split, 7);
    REQUIRE(p1.size() == split.size());
    for (std::size_t i = 0; i < split.size(); ++i) {
        CHECK(p1[i].id == split.examples()[i].id);
        CHECK(p1[i].probability == doctest::Approx(p2[i].probability).epsilon(1e-6));
    }
    model->set_head(ClassifierHead(64));
    for (const auto& p : predict_split(*model, split)) {
        CHECK(p.probability == 0.5);
        CHECK(p.label == Label::ironic);
    }
}

TEST_CASE("checkpoint round trip") {
    for (auto a : kArchitectures) {
        const auto spec = BackendSpec::miniature(a);
        auto model = std::make_shared<IronyClassifier>(make_backend(spec, 8), 0.1);
        auto config = TrainingConfig::defaults_for(a);
        config.epochs = 1;
        config.learning_rate = 1e-3;
        const auto split = toy_split(4);
        train(*model, split, config);
        const auto dir = temp_dir("ckpt-" + to_string(a));
        CheckpointManifest manifest{spec, config, 0.5, 8, fingerprint(split), model->backend().tokenizer().describe()};
        save_checkpoint(dir, *model, manifest);
        CHECK(std::filesystem::exists(dir + "/manifest.json"));
        const auto loaded = load_checkpoint(dir);
        CHECK(loaded.manifest.seed == 8);
        CHECK(loaded.manifest.data_fingerprint == fingerprint(split));
        CHECK(loaded.manifest.backend.architecture == a);
        CHECK(flat_parameters(*loaded.model) == flat_parameters(*model));
        const auto before = predict_split(*model, split);
        const auto after = predict_split(*loaded.model, split);
        for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i].probability == after[i].probability);
    }
    CHECK_THROWS_AS(load_checkpoint(temp_dir("missing")), BackendError);
}
