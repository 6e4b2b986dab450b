#include "irony/config.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace irony;

namespace {

const std::string kData = IRONY_DATA_DIR;

std::string minimal() {
    return "experiment: t\n"
           "dataset:\n"
           "  train: " + kData + "/synthetic/train.txt\n"
           "  test: " + kData + "/synthetic/test.txt\n";
}

}  // namespace

TEST_CASE("defaults fill every setting") {
    const auto c = parse_config(minimal(), "/base");
    CHECK(c.name == "t");
    CHECK(c.output_dir == "/base/out");
    CHECK(c.augment.strategies == std::vector<StrategyId>{StrategyId::none});
    CHECK(c.augment.llm.model_id == "gpt-4");
    CHECK(c.augment.llm.temperature == 0.0);
    CHECK(c.augment.llm.max_attempts == 3);
    CHECK(c.augment.replace_policy == ReplacePolicy::replace);
    CHECK(c.augment.splits == std::vector<SplitName>{SplitName::train, SplitName::test});
    CHECK(c.architectures == std::vector<Architecture>{Architecture::encoder});
    CHECK(c.train.learning_rate == 0.00002);
    CHECK(c.train.dropout == 0.1);
    CHECK(c.train.batch_size == 16);
    CHECK(c.train.epochs.at(Architecture::encoder) == 7);
    CHECK(c.eval.seeds == std::vector<std::uint64_t>{0, 1, 2});
    CHECK(c.dataset.dev_fraction == 0.1);
    CHECK(c.eval.baselines_path == kData + "/baselines.json");
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("lists, per-architecture maps and backend overrides") {
    const auto c = parse_config(minimal() +
                                    "augment:\n"
                                    "  strategy: [emotion, comprehensive]\n"
                                    "  replace_policy: concat\n"
                                    "  splits: train\n"
                                    "model:\n"
                                    "  architecture: [encoder, decoder]\n"
                                    "  name: {encoder: bert-mini, decoder: gpt-mini}\n"
                                    "  max_sequence_length: 256\n"
                                    "  backends:\n"
                                    "    decoder: {hidden_size: 32}\n"
                                    "train:\n"
                                    "  epochs: {decoder: 4}\n"
                                    "  seed: 10\n",
                                "/base");
    CHECK(c.augment.strategies == std::vector<StrategyId>{StrategyId::emotion, StrategyId::comprehensive});
    CHECK(c.augment.replace_policy == ReplacePolicy::concat);
    CHECK(c.augment.splits == std::vector<SplitName>{SplitName::train});
    CHECK(c.backend_for(Architecture::encoder).model_name == "bert-mini");
    CHECK(c.backend_for(Architecture::decoder).model_name == "gpt-mini");
    CHECK(c.backend_for(Architecture::encoder).max_sequence_length == 256);
    CHECK(c.backend_for(Architecture::decoder).hidden_size == 32);
    CHECK(c.backend_for(Architecture::encoder).hidden_size == 64);
    CHECK(c.backend_for(Architecture::decoder).pooling == PoolingRule::last_token);
    CHECK(c.train.epochs.at(Architecture::encoder) == 7);
    CHECK(c.train.epochs.at(Architecture::decoder) == 4);
    CHECK(c.eval.seeds == std::vector<std::uint64_t>{10, 11, 12});
    CHECK(c.training_for(Architecture::decoder, 11).seed == 11);
    CHECK(c.training_for(Architecture::decoder, 11).epochs == 4);
}

TEST_CASE("environment interpolation") {
    ::setenv("IRONY_CFG_TEST_DIR", "/from/env", 1);
    ::unsetenv("IRONY_CFG_TEST_MISSING");
    const auto c = parse_config(minimal() + "output_dir: ${IRONY_CFG_TEST_DIR}/runs\n"
                                            "augment: {model_id: \"${IRONY_CFG_TEST_MISSING:-gpt-4o}\"}\n",
                                "/base");
    CHECK(c.output_dir == "/from/env/runs");
    CHECK(c.augment.llm.model_id == "gpt-4o");
    CHECK_THROWS_AS(parse_config(minimal() + "output_dir: ${IRONY_CFG_TEST_MISSING}\n", "/base"), ConfigError);
}

TEST_CASE("invalid settings are rejected") {
    CHECK_THROWS_AS(parse_config(minimal() + "augment: {strategy: sarcasm}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "model: {architecture: rnn}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "train: {learning_rate: fast}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "train: {dropout: 1.5}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "augment: {max_attempts: 0}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "augment: {max_concurrent_requests: 0}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "eval: {seeds: []}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "trian: {}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "augment: {api_key: sk-123}\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment: [unclosed\n", "/"), ConfigError);
    CHECK_THROWS_AS(parse_config(minimal() + "dataset: {train: a.txt}\n", "/"), ConfigError);
    const auto bad_path = parse_config("dataset: {train: /nope/train.txt, test: /nope/test.txt}\n", "/");
    CHECK_THROWS_AS(validate(bad_path), ConfigError);
}

TEST_CASE("the resolved snapshot re-parses to itself") {
    const auto c = parse_config("experiment: t\n"
                                "augment: {strategy: [none, emotion, context, comprehensive], temperature: 0.3}\n"
                                "model: {architecture: [encoder, encoder_decoder, decoder]}\n"
                                "train: {learning_rate: 0.001, epochs: 2, batch_size: 8}\n"
                                "dataset: {train: a.txt, test: b.txt, train_per_class: 100, dev_fraction: 0.15}\n",
                                "/base");
    CHECK(c.dataset.train_path == "/base/a.txt");
    const auto text = snapshot(c);
    const auto again = parse_config(text, "/elsewhere");
    CHECK(snapshot(again) == text);
    CHECK(again.dataset.train_path == "/base/a.txt");
    CHECK(again.dataset.train_per_class == std::optional<std::size_t>(100));
    CHECK_FALSE(again.dataset.test_per_class.has_value());
}
