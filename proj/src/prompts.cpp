#include "irony/prompts.hpp"

#include "irony/util.hpp"

namespace irony {

PromptStrategy PromptStrategy::of(StrategyId id) {
    switch (id) {
        case StrategyId::none: return {id, {}};
        case StrategyId::emotion: return {id, kEmotionTemplate};
        case StrategyId::context: return {id, kContextTemplate};
        case StrategyId::comprehensive: return {id, kComprehensiveTemplate};
    }
    throw std::invalid_argument("unknown strategy id");
}

PromptStrategy PromptStrategy::parse(std::string_view name) {
    for (auto id : all_strategies()) {
        if (to_string(id) == name) return of(id);
    }
    throw std::invalid_argument("unknown prompt strategy '" + std::string(name) +
                                "' (expected none, emotion, context or comprehensive)");
}

std::string_view PromptStrategy::name() const { return to_string(id); }

std::string_view to_string(StrategyId id) {
    switch (id) {
        case StrategyId::none: return "none";
        case StrategyId::emotion: return "emotion";
        case StrategyId::context: return "context";
        case StrategyId::comprehensive: return "comprehensive";
    }
    return "none";
}

const std::array<StrategyId, 4>& all_strategies() {
    static constexpr std::array<StrategyId, 4> kAll = {StrategyId::none, StrategyId::emotion,
                                                       StrategyId::context, StrategyId::comprehensive};
    return kAll;
}

std::string build_prompt(const PromptStrategy& strategy, std::string_view text) {
    if (trim(text).empty()) throw EmptyText("build_prompt: text is empty");
    if (strategy.id == StrategyId::none) {
        throw std::invalid_argument("build_prompt: strategy 'none' sends no prompt");
    }
    std::string prompt;
    prompt.reserve(strategy.template_text.size() + kSentencePrefix.size() + text.size() + 1);
    prompt += strategy.template_text;
    prompt.push_back('\n');
    prompt += kSentencePrefix;
    prompt += text;
    return prompt;
}

std::string_view sentence_of(std::string_view prompt) {
    const auto nl = prompt.find('\n');
    if (nl == std::string_view::npos) return {};
    auto rest = prompt.substr(nl + 1);
    if (rest.substr(0, kSentencePrefix.size()) != kSentencePrefix) return {};
    return rest.substr(kSentencePrefix.size());
}

}  // namespace irony
