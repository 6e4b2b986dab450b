#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace irony {

struct Token {
    std::int64_t id = 0;
    std::size_t begin = 0;  // byte offsets into the source text
    std::size_t end = 0;
};

struct SpecialTokens {
    std::int64_t pad = 0;
    std::int64_t cls = 1;  // classification / start-of-sequence
    std::int64_t sep = 2;  // separator / end-of-sequence
    std::int64_t unk = 3;
};

class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::vector<Token> tokenize(std::string_view text) const = 0;
    virtual std::int64_t vocab_size() const = 0;
    virtual const SpecialTokens& specials() const = 0;
    virtual std::string describe() const = 0;
};

/// Text prefix covering the first `max_tokens` tokens. Feeding the result
/// back through the tokenizer yields exactly those tokens.
std::string truncate_to_tokens(const Tokenizer& tokenizer, std::string_view text, std::size_t max_tokens);

/// Lowercased word/punctuation tokenizer that hashes each piece into a fixed
/// number of buckets. Needs no vocabulary file, so miniature backends can be
/// built from a seed alone. Emoji and other non-ASCII runs stay intact.
class HashingTokenizer : public Tokenizer {
public:
    explicit HashingTokenizer(std::int64_t vocab_size = 8192);

    std::vector<Token> tokenize(std::string_view text) const override;
    std::int64_t vocab_size() const override { return vocab_size_; }
    const SpecialTokens& specials() const override { return specials_; }
    std::string describe() const override;

private:
    std::int64_t vocab_size_;
    SpecialTokens specials_;
};

/// Greedy longest-match subword tokenizer over a one-token-per-line vocab
/// file. Covers WordPiece-style vocabularies (`##` continuation pieces) and
/// word-start-marker vocabularies (`▁` or `Ġ` prefixes).
class VocabTokenizer : public Tokenizer {
public:
    struct Options {
        bool lowercase = true;
        std::string continuation_prefix = "##";
        std::string word_start_marker;  // e.g. "▁"; exclusive with continuation_prefix
        std::string pad_token = "[PAD]";
        std::string cls_token = "[CLS]";
        std::string sep_token = "[SEP]";
        std::string unk_token = "[UNK]";
    };

    VocabTokenizer(const std::vector<std::string>& vocab, Options options);
    static std::unique_ptr<VocabTokenizer> from_file(const std::string& path, Options options);

    std::vector<Token> tokenize(std::string_view text) const override;
    std::int64_t vocab_size() const override { return static_cast<std::int64_t>(size_); }
    const SpecialTokens& specials() const override { return specials_; }
    std::string describe() const override;

private:
    std::int64_t id_of(const std::string& piece, std::int64_t fallback) const;

    Options options_;
    std::unordered_map<std::string, std::int64_t> ids_;
    std::size_t size_ = 0;
    SpecialTokens specials_;
};

}  // namespace irony
