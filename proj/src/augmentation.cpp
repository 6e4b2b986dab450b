#include "irony/augmentation.hpp"

#include "irony/util.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

namespace irony {

namespace {

void append_field(std::string& out, std::string_view field) {
    out += std::to_string(field.size());
    out.push_back(':');
    out += field;
}

bool is_quote_pair(std::string_view s) {
    static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
        {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}};
    for (const auto& [open, close] : kPairs) {
        if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
            s.substr(s.size() - close.size()) == close) {
            return true;
        }
    }
    return false;
}

std::size_t opening_quote_length(std::string_view s) {
    return static_cast<unsigned char>(s.front()) < 0x80 ? 1 : 3;
}

}  // namespace

nlohmann::ordered_json to_json(const AugmentationRecord& r) {
    nlohmann::ordered_json j;
    j["key"] = r.key;
    j["example_id"] = r.example_id;
    j["strategy_id"] = std::string(to_string(r.strategy));
    j["original_text"] = r.original_text;
    j["prompt_sent"] = r.prompt_sent;
    j["augmented_text"] = r.augmented_text;
    j["model_id"] = r.model_id;
    j["created_at"] = r.created_at;
    j["fallback_used"] = r.fallback_used;
    if (!r.failure.empty()) j["failure"] = r.failure;
    return j;
}

AugmentationRecord record_from_json(const nlohmann::json& j) {
    AugmentationRecord r;
    r.key = j.at("key").get<std::string>();
    r.example_id = j.at("example_id").get<std::int64_t>();
    r.strategy = PromptStrategy::parse(j.at("strategy_id").get<std::string>()).id;
    r.original_text = j.at("original_text").get<std::string>();
    r.prompt_sent = j.at("prompt_sent").get<std::string>();
    r.augmented_text = j.at("augmented_text").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.created_at = j.at("created_at").get<std::string>();
    r.fallback_used = j.at("fallback_used").get<bool>();
    r.failure = j.value("failure", std::string{});
    return r;
}

std::string cache_key(StrategyId strategy, std::string_view model_id, double temperature,
                      std::string_view text) {
    std::string encoded = "irony-augment-v1|";
    append_field(encoded, to_string(strategy));
    append_field(encoded, model_id);
    append_field(encoded, format_double(temperature));
    append_field(encoded, text);
    return sha256_hex(encoded);
}

std::string postprocess_response(std::string_view response) {
    auto s = trim(response);
    if (is_quote_pair(s)) {
        const auto open = opening_quote_length(s);
        const auto close = static_cast<unsigned char>(s.back()) < 0x80 ? 1 : 3;
        s = trim(s.substr(open, s.size() - open - close));
    }
    return std::string(s);
}

AugmentationCache::AugmentationCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            auto record = record_from_json(nlohmann::json::parse(line));
            records_.insert_or_assign(record.key, std::move(record));
        } catch (const std::exception& ex) {
            spdlog::warn("augmentation cache {}: skipping unreadable line {}: {}", path_, line_no, ex.what());
        }
    }
}

std::optional<AugmentationRecord> AugmentationCache::lookup(const std::string& key) const {
    std::shared_lock lock(mutex_);
    auto it = records_.find(key);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void AugmentationCache::store(const AugmentationRecord& record) {
    std::unique_lock lock(mutex_);
    if (!path_.empty()) {
        const auto parent = std::filesystem::path(path_).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        std::ofstream out(path_, std::ios::app | std::ios::binary);
        if (!out) throw std::runtime_error("cannot append to augmentation cache " + path_);
        out << to_json(record).dump() << '\n';
        out.flush();
    }
    records_.insert_or_assign(record.key, record);
}

std::size_t AugmentationCache::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

ReplacePolicy replace_policy_from_string(std::string_view name) {
    if (name == "replace") return ReplacePolicy::replace;
    if (name == "concat") return ReplacePolicy::concat;
    throw std::invalid_argument("unknown replace policy '" + std::string(name) + "'");
}

std::string_view to_string(ReplacePolicy policy) {
    return policy == ReplacePolicy::replace ? "replace" : "concat";
}

double AugmentStats::hit_rate() const {
    const auto lookups = hits + misses;
    return lookups == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(lookups);
}

AugmentStats& AugmentStats::operator+=(const AugmentStats& other) {
    hits += other.hits;
    misses += other.misses;
    fallbacks += other.fallbacks;
    passthrough += other.passthrough;
    return *this;
}

std::string classifier_text(const AugmentationRecord& record, ReplacePolicy policy) {
    if (policy == ReplacePolicy::replace || record.fallback_used || record.strategy == StrategyId::none) {
        return record.augmented_text;
    }
    return record.original_text + " " + record.augmented_text;
}

Augmenter::Augmenter(LLMClient& client, AugmentationCache& cache, LLMClientConfig config, Sleeper sleeper)
    : client_(client), cache_(cache), config_(std::move(config)), sleeper_(std::move(sleeper)) {
    config_.validate();
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

AugmentationRecord Augmenter::augment_example(const LabeledExample& example, const PromptStrategy& strategy,
                                              AugmentStats* stats) {
    const auto key = cache_key(strategy.id, config_.model_id, config_.temperature, example.text);
    if (strategy.id == StrategyId::none) {
        if (stats) ++stats->passthrough;
        // pass-through records carry no timestamp so replays stay byte-identical
        return {key, example.id, strategy.id, example.text, "", example.text, config_.model_id,
                "", false, ""};
    }
    if (auto cached = cache_.lookup(key)) {
        if (stats) ++stats->hits;
        // the cache is keyed by text, so another example may have produced it
        cached->example_id = example.id;
        return *cached;
    }
    if (stats) ++stats->misses;
    auto record = call_with_retries(example, strategy, key);
    if (record.fallback_used) {
        if (stats) ++stats->fallbacks;
    } else {
        cache_.store(record);
    }
    return record;
}

AugmentationRecord Augmenter::call_with_retries(const LabeledExample& example, const PromptStrategy& strategy,
                                                const std::string& key) {
    const auto prompt = build_prompt(strategy, example.text);
    const ChatRequest request{config_.model_id, config_.temperature, prompt};
    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        try {
            auto text = postprocess_response(client_.complete(request));
            if (!text.empty()) {
                return {key, example.id, strategy.id, example.text, prompt, std::move(text),
                        config_.model_id, utc_timestamp(), false, ""};
            }
            last_error = "empty response";
        } catch (const TransportError& ex) {
            last_error = ex.what();
        }
        if (attempt < config_.max_attempts) sleeper_(config_.backoff_base * (1LL << (attempt - 1)));
    }
    spdlog::warn("augmentation of example {} ({}) fell back to the original text after {} attempt(s): {}",
                 example.id, strategy.name(), config_.max_attempts, last_error);
    return {key, example.id, strategy.id, example.text, prompt, example.text,
            config_.model_id, utc_timestamp(), true, last_error};
}

AugmentedSplit Augmenter::augment_split(const DatasetSplit& split, const PromptStrategy& strategy,
                                        ReplacePolicy policy) {
    const auto& examples = split.examples();
    AugmentedSplit out;
    out.records.resize(examples.size());

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto key = cache_key(strategy.id, config_.model_id, config_.temperature, examples[i].text);
        if (strategy.id == StrategyId::none || cache_.lookup(key)) {
            out.records[i] = augment_example(examples[i], strategy, &out.stats);
        } else {
            pending.push_back(i);
        }
    }

    if (!pending.empty()) {
        std::mutex stats_mutex;
        std::exception_ptr failure;
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (auto slot = next++; slot < pending.size(); slot = next++) {
                const auto i = pending[slot];
                AugmentStats local;
                try {
                    out.records[i] = augment_example(examples[i], strategy, &local);
                } catch (...) {
                    std::lock_guard lock(stats_mutex);
                    if (!failure) failure = std::current_exception();
                    next = pending.size();
                    return;
                }
                std::lock_guard lock(stats_mutex);
                out.stats += local;
            }
        };
        const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config_.max_concurrent_requests),
                                                     pending.size());
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
        workers.clear();
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<std::string> texts;
    texts.reserve(out.records.size());
    for (const auto& r : out.records) texts.push_back(classifier_text(r, policy));
    out.split = split.with_texts(std::move(texts));
    return out;
}

}  // namespace irony
