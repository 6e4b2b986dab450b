#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace irony {

enum class StrategyId { none, emotion, context, comprehensive };

/// A fixed expansion instruction. `none` has an empty template and passes
/// text through untouched.
struct PromptStrategy {
    StrategyId id = StrategyId::none;
    std::string_view template_text;

    static PromptStrategy of(StrategyId id);
    static PromptStrategy parse(std::string_view name);

    std::string_view name() const;
};

inline constexpr std::string_view kEmotionTemplate =
    "Expand this sentence to retain the original meaning and expand the emotion words, "
    "format: sentence.";
inline constexpr std::string_view kContextTemplate =
    "Expand this sentence to retain the original meaning and expand the background of the "
    "tweet, format: sentence.";
inline constexpr std::string_view kComprehensiveTemplate =
    "Expand this sentence to retain the original meaning, including elaborating on emotions, "
    "and expand the background of the tweet, format: sentence.";

inline constexpr std::string_view kSentencePrefix = "Sentence: ";

std::string_view to_string(StrategyId id);
const std::array<StrategyId, 4>& all_strategies();

class EmptyText : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// `<template>\nSentence: <text>`. Throws EmptyText on blank text and
/// std::invalid_argument for the pass-through strategy.
std::string build_prompt(const PromptStrategy& strategy, std::string_view text);

/// Recovers the sentence from a prompt built by `build_prompt`, or an empty
/// view when the prompt has no sentence line.
std::string_view sentence_of(std::string_view prompt);

}  // namespace irony
