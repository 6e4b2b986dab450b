#pragma once

#include "irony/dataset.hpp"
#include "irony/llm_client.hpp"
#include "irony/prompts.hpp"

#include <nlohmann/json_fwd.hpp>

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace irony {

struct AugmentationRecord {
    std::string key;
    std::int64_t example_id = 0;
    StrategyId strategy = StrategyId::none;
    std::string original_text;
    std::string prompt_sent;
    std::string augmented_text;
    std::string model_id;
    std::string created_at;
    bool fallback_used = false;
    /// Last transport error when `fallback_used`, empty otherwise.
    std::string failure;

    friend bool operator==(const AugmentationRecord&, const AugmentationRecord&) = default;
};

/// Serialized with `key` first so cache files grep cleanly.
nlohmann::ordered_json to_json(const AugmentationRecord& record);
AugmentationRecord record_from_json(const nlohmann::json& json);

/// SHA-256 over a length-prefixed encoding of the four fields.
std::string cache_key(StrategyId strategy, std::string_view model_id, double temperature,
                      std::string_view text);

/// Strips surrounding whitespace and one enclosing pair of matching quotes.
std::string postprocess_response(std::string_view response);

/// Append-only JSON Lines store of augmentation records keyed by cache_key.
/// Lookups may run concurrently; stores are serialized.
class AugmentationCache {
public:
    /// In-memory only.
    AugmentationCache() = default;
    /// Loads `path` if present and appends new records to it. A torn final
    /// line from an interrupted write is skipped.
    explicit AugmentationCache(std::string path);

    std::optional<AugmentationRecord> lookup(const std::string& key) const;
    void store(const AugmentationRecord& record);
    std::size_t size() const;
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, AugmentationRecord> records_;
};

enum class ReplacePolicy { replace, concat };

ReplacePolicy replace_policy_from_string(std::string_view name);
std::string_view to_string(ReplacePolicy policy);

struct AugmentStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
    std::size_t fallbacks = 0;
    std::size_t passthrough = 0;

    /// hits / (hits + misses); 1 when nothing needed a lookup.
    double hit_rate() const;
    AugmentStats& operator+=(const AugmentStats& other);
};

struct AugmentedSplit {
    DatasetSplit split;
    std::vector<AugmentationRecord> records;
    AugmentStats stats;
};

/// The text a classifier sees for one record under `policy`.
std::string classifier_text(const AugmentationRecord& record, ReplacePolicy policy);

class Augmenter {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    Augmenter(LLMClient& client, AugmentationCache& cache, LLMClientConfig config,
              Sleeper sleeper = {});

    AugmentationRecord augment_example(const LabeledExample& example, const PromptStrategy& strategy,
                                       AugmentStats* stats = nullptr);

    /// Keeps ids, labels and order. At most `max_concurrent_requests` client
    /// calls are in flight.
    AugmentedSplit augment_split(const DatasetSplit& split, const PromptStrategy& strategy,
                                 ReplacePolicy policy = ReplacePolicy::replace);

private:
    AugmentationRecord call_with_retries(const LabeledExample& example, const PromptStrategy& strategy,
                                         const std::string& key);

    LLMClient& client_;
    AugmentationCache& cache_;
    LLMClientConfig config_;
    Sleeper sleeper_;
};

}  // namespace irony
