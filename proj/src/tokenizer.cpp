#include "irony/tokenizer.hpp"

#include "irony/util.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace irony {

namespace {

bool is_word_byte(unsigned char c) {
    return c >= 0x80 || std::isalnum(c) || c == '#' || c == '@' || c == '\'' || c == '_';
}

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

/// Byte ranges of words and single punctuation marks.
std::vector<std::pair<std::size_t, std::size_t>> pre_tokenize(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_word_byte(c)) {
            std::size_t j = i;
            while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
            out.emplace_back(i, j);
            i = j;
        } else {
            out.emplace_back(i, i + 1);
            ++i;
        }
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

bool is_continuation_byte(unsigned char c) { return (c & 0xc0) == 0x80; }

}  // namespace

std::string truncate_to_tokens(const Tokenizer& tokenizer, std::string_view text, std::size_t max_tokens) {
    const auto tokens = tokenizer.tokenize(text);
    if (tokens.size() <= max_tokens) return std::string(text);
    if (max_tokens == 0) return {};
    return std::string(text.substr(0, tokens[max_tokens - 1].end));
}

HashingTokenizer::HashingTokenizer(std::int64_t vocab_size) : vocab_size_(vocab_size) {
    if (vocab_size_ <= 4) throw std::invalid_argument("HashingTokenizer: vocab_size must exceed 4");
}

std::vector<Token> HashingTokenizer::tokenize(std::string_view text) const {
    std::vector<Token> tokens;
    const auto buckets = static_cast<std::uint64_t>(vocab_size_ - 4);
    for (const auto& [begin, end] : pre_tokenize(text)) {
        std::uint64_t hash = 14695981039346656037ULL;
        for (std::size_t k = begin; k < end; ++k) {
            hash ^= static_cast<unsigned char>(std::tolower(static_cast<unsigned char>(text[k])));
            hash *= 1099511628211ULL;
        }
        tokens.push_back({4 + static_cast<std::int64_t>(hash % buckets), begin, end});
    }
    return tokens;
}

std::string HashingTokenizer::describe() const { return "hashing:" + std::to_string(vocab_size_); }

VocabTokenizer::VocabTokenizer(const std::vector<std::string>& vocab, Options options)
    : options_(std::move(options)), size_(vocab.size()) {
    for (std::size_t i = 0; i < vocab.size(); ++i) ids_.emplace(vocab[i], static_cast<std::int64_t>(i));
    const auto unk = ids_.find(options_.unk_token);
    if (unk == ids_.end()) throw std::invalid_argument("vocabulary lacks unknown token " + options_.unk_token);
    specials_.unk = unk->second;
    specials_.pad = id_of(options_.pad_token, specials_.unk);
    specials_.cls = id_of(options_.cls_token, specials_.unk);
    specials_.sep = id_of(options_.sep_token, specials_.unk);
}

std::unique_ptr<VocabTokenizer> VocabTokenizer::from_file(const std::string& path, Options options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocabulary " + path);
    std::vector<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        vocab.push_back(line);
    }
    return std::make_unique<VocabTokenizer>(vocab, std::move(options));
}

std::int64_t VocabTokenizer::id_of(const std::string& piece, std::int64_t fallback) const {
    auto it = ids_.find(piece);
    return it == ids_.end() ? fallback : it->second;
}

std::vector<Token> VocabTokenizer::tokenize(std::string_view text) const {
    std::vector<Token> tokens;
    for (const auto& [begin, end] : pre_tokenize(text)) {
        const std::string word = options_.lowercase ? ascii_lower(text.substr(begin, end - begin))
                                                    : std::string(text.substr(begin, end - begin));
        std::vector<Token> pieces;
        std::size_t start = 0;
        bool failed = false;
        while (start < word.size()) {
            std::size_t stop = word.size();
            std::int64_t found = -1;
            while (stop > start) {
                std::string candidate = word.substr(start, stop - start);
                if (start == 0 && !options_.word_start_marker.empty()) {
                    candidate = options_.word_start_marker + candidate;
                } else if (start > 0 && options_.word_start_marker.empty()) {
                    candidate = options_.continuation_prefix + candidate;
                }
                if (auto it = ids_.find(candidate); it != ids_.end()) {
                    found = it->second;
                    break;
                }
                --stop;
                while (stop > start && is_continuation_byte(static_cast<unsigned char>(word[stop]))) --stop;
            }
            if (found < 0) {
                failed = true;
                break;
            }
            pieces.push_back({found, begin + start, begin + stop});
            start = stop;
        }
        if (failed) {
            tokens.push_back({specials_.unk, begin, end});
        } else {
            tokens.insert(tokens.end(), pieces.begin(), pieces.end());
        }
    }
    return tokens;
}

std::string VocabTokenizer::describe() const { return "vocab:" + std::to_string(size_); }

}  // namespace irony
