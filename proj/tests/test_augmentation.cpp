#include "irony/augmentation.hpp"
#include "irony/util.hpp"

#include <nlohmann/json.hpp>

#include <doctest.h>

#include <filesystem>
#include <set>

using namespace irony;

namespace {

DatasetSplit sample_split(std::size_t n) {
    std::vector<LabeledExample> rows;
    for (std::size_t i = 0; i < n; ++i) {
        rows.push_back({static_cast<std::int64_t>(1000 - i), "tweet " + std::to_string(i),
                        i % 3 == 0 ? Label::ironic : Label::non_ironic});
    }
    return DatasetSplit(SplitName::train, rows);
}

LLMClientConfig fast_config(int concurrency = 4) {
    LLMClientConfig c;
    c.max_concurrent_requests = concurrency;
    c.backoff_base = std::chrono::milliseconds(0);
    return c;
}

const auto kNoSleep = [](std::chrono::milliseconds) {};

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "irony-tests";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::filesystem::remove(p);
    return p.string();
}

}  // namespace

TEST_CASE("strategy none passes text through without a client call") {
    MockLLMClient client;
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const LabeledExample ex{5, "I love waiting", Label::ironic};
    const auto record = augmenter.augment_example(ex, PromptStrategy::of(StrategyId::none));
    CHECK(record.augmented_text == ex.text);
    CHECK(record.prompt_sent.empty());
    CHECK_FALSE(record.fallback_used);
    CHECK(client.calls() == 0);
}

TEST_CASE("a canned response becomes the augmented text") {
    MockLLMClient client;
    client.set_canned({{"I love waiting", "  \"I love waiting for ages, said nobody.\"  "}});
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const LabeledExample ex{5, "I love waiting", Label::ironic};
    const auto record = augmenter.augment_example(ex, PromptStrategy::of(StrategyId::emotion));
    CHECK(record.augmented_text == "I love waiting for ages, said nobody.");
    CHECK_FALSE(record.fallback_used);
    CHECK(record.prompt_sent == build_prompt(PromptStrategy::of(StrategyId::emotion), ex.text));
    CHECK(record.model_id == "gpt-4");
    CHECK(record.example_id == 5);
    CHECK(client.calls() == 1);

    // second lookup is served by the cache
    const auto again = augmenter.augment_example(ex, PromptStrategy::of(StrategyId::emotion));
    CHECK(again == record);
    CHECK(client.calls() == 1);
}

TEST_CASE("exhausted retries fall back to the original text") {
    MockLLMClient client;
    client.fail_first(3);
    AugmentationCache cache;
    std::vector<std::chrono::milliseconds> sleeps;
    auto config = fast_config();
    config.backoff_base = std::chrono::milliseconds(100);
    Augmenter augmenter(client, cache, config, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    const LabeledExample ex{1, "original", Label::non_ironic};
    AugmentStats stats;
    const auto record = augmenter.augment_example(ex, PromptStrategy::of(StrategyId::context), &stats);
    CHECK(record.fallback_used);
    CHECK(record.augmented_text == ex.text);
    CHECK_FALSE(record.failure.empty());
    CHECK(client.calls() == 3);
    CHECK(stats.fallbacks == 1);
    CHECK(sleeps == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(100), std::chrono::milliseconds(200)});
    CHECK(cache.size() == 0);
}

TEST_CASE("a transient failure is retried and succeeds") {
    MockLLMClient client("expanded: {text}");
    client.fail_first(2);
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const auto record =
        augmenter.augment_example({1, "hello", Label::ironic}, PromptStrategy::of(StrategyId::comprehensive));
    CHECK_FALSE(record.fallback_used);
    CHECK(record.augmented_text == "expanded: hello");
    CHECK(client.calls() == 3);
}

TEST_CASE("empty responses count as failures") {
    MockLLMClient client;
    client.set_canned({{"hello", "  \"\"  "}});
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const auto record = augmenter.augment_example({1, "hello", Label::ironic}, PromptStrategy::of(StrategyId::emotion));
    CHECK(record.fallback_used);
    CHECK(record.augmented_text == "hello");
    CHECK(client.calls() == 3);
}

TEST_CASE("augment_split keeps ids, labels and order") {
    MockLLMClient client("more about {text}");
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const auto split = sample_split(200);
    const auto out = augmenter.augment_split(split, PromptStrategy::of(StrategyId::emotion));
    REQUIRE(out.split.size() == 200);
    REQUIRE(out.records.size() == 200);
    for (std::size_t i = 0; i < split.size(); ++i) {
        const auto& in = split.examples()[i];
        CHECK(out.split.examples()[i].id == in.id);
        CHECK(out.split.examples()[i].label == in.label);
        CHECK(out.split.examples()[i].text == "more about " + in.text);
        CHECK(out.records[i].example_id == in.id);
        CHECK(out.records[i].prompt_sent.find(in.text) != std::string::npos);
    }
    CHECK(out.stats.misses == 200);
    CHECK(out.split.name() == split.name());
}

TEST_CASE("strategy none leaves the split unchanged") {
    MockLLMClient client("changed");
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const auto split = sample_split(17);
    const auto out = augmenter.augment_split(split, PromptStrategy::of(StrategyId::none));
    CHECK(out.split == split);
    CHECK(client.calls() == 0);
    CHECK(out.stats.passthrough == 17);
}

TEST_CASE("a warm cache serves a split with zero client calls") {
    MockLLMClient client("x {text}");
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const auto split = sample_split(3);
    const auto first = augmenter.augment_split(split, PromptStrategy::of(StrategyId::context));
    client.reset_counters();
    const auto second = augmenter.augment_split(split, PromptStrategy::of(StrategyId::context));
    CHECK(client.calls() == 0);
    CHECK(second.stats.hits == 3);
    CHECK(second.stats.hit_rate() == 1.0);
    CHECK(second.split == first.split);
}

TEST_CASE("in-flight requests never exceed the concurrency bound") {
    for (int bound : {1, 2, 4}) {
        MockLLMClient client;
        client.set_latency(std::chrono::milliseconds(5));
        AugmentationCache cache;
        Augmenter augmenter(client, cache, fast_config(bound), kNoSleep);
        augmenter.augment_split(sample_split(24), PromptStrategy::of(StrategyId::emotion));
        CHECK(client.max_in_flight() <= bound);
        CHECK(client.max_in_flight() >= 1);
        CHECK(client.calls() == 24);
    }
}

TEST_CASE("concat policy prepends the original") {
    MockLLMClient client("expanded");
    AugmentationCache cache;
    Augmenter augmenter(client, cache, fast_config(), kNoSleep);
    const auto out = augmenter.augment_split(sample_split(2), PromptStrategy::of(StrategyId::emotion), ReplacePolicy::concat);
    CHECK(out.split.examples()[0].text == "tweet 0 expanded");
    CHECK(replace_policy_from_string(to_string(ReplacePolicy::concat)) == ReplacePolicy::concat);
}

TEST_CASE("cache keys are deterministic and sensitive to every field") {
    const auto k = cache_key(StrategyId::emotion, "gpt-4", 0.0, "text");
    CHECK(k == cache_key(StrategyId::emotion, "gpt-4", 0.0, "text"));
    CHECK(k.size() == 64);
    CHECK(k != cache_key(StrategyId::context, "gpt-4", 0.0, "text"));
    CHECK(k != cache_key(StrategyId::emotion, "gpt-3.5", 0.0, "text"));
    CHECK(k != cache_key(StrategyId::emotion, "gpt-4", 0.5, "text"));
    CHECK(k != cache_key(StrategyId::emotion, "gpt-4", 0.0, "text "));
    // field boundaries cannot be shifted
    CHECK(cache_key(StrategyId::emotion, "gpt-4a", 0.0, "b") != cache_key(StrategyId::emotion, "gpt-4", 0.0, "ab"));
}

TEST_CASE("cache keys differ for every one-character edit of a tweet") {
    const std::string base = "so happy to wake up for physio";
    std::set<std::string> variants{base};
    for (std::size_t i = 0; i < base.size(); ++i) {
        std::string del = base;
        del.erase(i, 1);
        variants.insert(del);
        std::string sub = base;
        sub[i] = sub[i] == 'x' ? 'y' : 'x';
        variants.insert(sub);
        std::string ins = base;
        ins.insert(i, "!");
        variants.insert(ins);
    }
    std::set<std::string> keys;
    for (const auto& v : variants) keys.insert(cache_key(StrategyId::emotion, "gpt-4", 0.0, v));
    CHECK(keys.size() == variants.size());
}

TEST_CASE("postprocess strips whitespace and one quote pair") {
    CHECK(postprocess_response("  \"quoted\"  ") == "quoted");
    CHECK(postprocess_response("'single'") == "single");
    CHECK(postprocess_response("“curly”") == "curly");
    CHECK(postprocess_response("\"\"twice\"\"") == "\"twice\"");
    CHECK(postprocess_response("\"unbalanced") == "\"unbalanced");
    CHECK(postprocess_response("   ").empty());
}

TEST_CASE("cache persists records as JSON lines with the key first") {
    const auto path = temp_path("cache.jsonl");
    AugmentationRecord stored;
    {
        MockLLMClient client("about {text}");
        AugmentationCache cache(path);
        Augmenter augmenter(client, cache, fast_config(), kNoSleep);
        stored = augmenter.augment_example({3, "tweet", Label::ironic}, PromptStrategy::of(StrategyId::emotion));
    }
    const auto text = read_file(path);
    CHECK(text.rfind("{\"key\":\"" + stored.key + "\"", 0) == 0);

    // a torn trailing line is skipped on reload
    write_file(path, text + "{\"key\":\"trunc");
    AugmentationCache reloaded(path);
    CHECK(reloaded.size() == 1);
    REQUIRE(reloaded.lookup(stored.key).has_value());
    CHECK(*reloaded.lookup(stored.key) == stored);
    CHECK(record_from_json(nlohmann::json::parse(to_json(stored).dump())) == stored);
}

TEST_CASE("client config validation") {
    LLMClientConfig c;
    CHECK_NOTHROW(c.validate());
    c.max_attempts = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.max_concurrent_requests = 0;
    CHECK_THROWS(c.validate());
    c = {};
    c.temperature = -0.1;
    CHECK_THROWS(c.validate());
}
