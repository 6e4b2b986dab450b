#include "irony/backend.hpp"

#include <torch/script.h>

#include <cmath>
#include <limits>

namespace irony {

namespace {

torch::nn::TransformerEncoderLayerOptions encoder_layer_options(const BackendSpec& s) {
    return torch::nn::TransformerEncoderLayerOptions(s.hidden_size, s.num_heads)
        .dim_feedforward(s.ffn_size)
        .dropout(s.internal_dropout)
        .activation(torch::kGELU);
}

/// Token + learned position embeddings, shared by all miniature backends.
class Embedder : public torch::nn::Module {
public:
    explicit Embedder(const BackendSpec& s)
        : tokens_(register_module("tokens", torch::nn::Embedding(s.vocab_size, s.hidden_size))),
          positions_(register_module("positions", torch::nn::Embedding(s.max_sequence_length, s.hidden_size))),
          norm_(register_module("norm", torch::nn::LayerNorm(torch::nn::LayerNormOptions({s.hidden_size})))),
          dropout_(register_module("dropout", torch::nn::Dropout(s.internal_dropout))) {}

    /// ids [batch, time] -> [time, batch, hidden]
    torch::Tensor forward(const torch::Tensor& ids) {
        const auto time = ids.size(1);
        auto pos = torch::arange(time, torch::kLong).unsqueeze(0);
        auto x = tokens_->forward(ids) + positions_->forward(pos);
        return dropout_->forward(norm_->forward(x)).transpose(0, 1);
    }

    torch::Tensor embed_tokens(const torch::Tensor& ids) { return tokens_->forward(ids); }
    torch::Tensor embed_positions(std::int64_t time) {
        return positions_->forward(torch::arange(time, torch::kLong).unsqueeze(0));
    }
    torch::Tensor finish(const torch::Tensor& x) { return dropout_->forward(norm_->forward(x)); }

private:
    torch::nn::Embedding tokens_;
    torch::nn::Embedding positions_;
    torch::nn::LayerNorm norm_;
    torch::nn::Dropout dropout_;
};

/// Bidirectional encoder stack; pooled on the leading classification token.
class EncoderBackend : public Backend {
public:
    EncoderBackend(BackendSpec s, std::shared_ptr<const Tokenizer> tok)
        : Backend(std::move(s), std::move(tok)),
          embed_(register_module("embed", std::make_shared<Embedder>(spec_))),
          stack_(register_module("encoder", torch::nn::TransformerEncoder(torch::nn::TransformerEncoderOptions(encoder_layer_options(spec_), spec_.num_layers)))) {}

    torch::Tensor pooled(const TokenBatch& batch) override {
        auto hidden = stack_->forward(embed_->forward(batch.ids), {}, batch.padding_mask);
        return pool(hidden.transpose(0, 1), batch);
    }

protected:
    std::size_t framing_tokens() const override { return 2; }
    std::vector<std::int64_t> frame_tokens(std::vector<std::int64_t> content) const override {
        content.insert(content.begin(), tokenizer_->specials().cls);
        content.push_back(tokenizer_->specials().sep);
        return content;
    }

private:
    std::shared_ptr<Embedder> embed_;
    torch::nn::TransformerEncoder stack_;
};

/// Autoregressive stack: each position attends to itself and earlier ones.
class DecoderBackend : public Backend {
public:
    DecoderBackend(BackendSpec s, std::shared_ptr<const Tokenizer> tok)
        : Backend(std::move(s), std::move(tok)),
          embed_(register_module("embed", std::make_shared<Embedder>(spec_))),
          stack_(register_module("decoder", torch::nn::TransformerEncoder(torch::nn::TransformerEncoderOptions(encoder_layer_options(spec_), spec_.num_layers)))) {}

    torch::Tensor pooled(const TokenBatch& batch) override {
        const auto time = batch.ids.size(1);
        auto causal = torch::triu(torch::ones({time, time}, torch::kBool), 1);
        auto hidden = stack_->forward(embed_->forward(batch.ids), causal, batch.padding_mask);
        return pool(hidden.transpose(0, 1), batch);
    }

protected:
    std::size_t framing_tokens() const override { return 1; }
    std::vector<std::int64_t> frame_tokens(std::vector<std::int64_t> content) const override {
        content.push_back(tokenizer_->specials().sep);
        return content;
    }

private:
    std::shared_ptr<Embedder> embed_;
    torch::nn::TransformerEncoder stack_;
};

/// Encoder over the text, decoder run for a single start token that
/// cross-attends to the encoded input.
class EncoderDecoderBackend : public Backend {
public:
    EncoderDecoderBackend(BackendSpec s, std::shared_ptr<const Tokenizer> tok)
        : Backend(std::move(s), std::move(tok)),
          embed_(register_module("embed", std::make_shared<Embedder>(spec_))),
          encoder_(register_module("encoder", torch::nn::TransformerEncoder(torch::nn::TransformerEncoderOptions(encoder_layer_options(spec_), spec_.num_layers)))),
          decoder_(register_module(
              "decoder",
              torch::nn::TransformerDecoder(torch::nn::TransformerDecoderOptions(
                  torch::nn::TransformerDecoderLayerOptions(spec_.hidden_size, spec_.num_heads)
                      .dim_feedforward(spec_.ffn_size)
                      .dropout(spec_.internal_dropout)
                      .activation(torch::kGELU),
                  spec_.num_layers)))) {}

    torch::Tensor pooled(const TokenBatch& batch) override {
        auto memory = encoder_->forward(embed_->forward(batch.ids), {}, batch.padding_mask);
        if (spec_.pooling != PoolingRule::decoder_start) return pool(memory.transpose(0, 1), batch);

        const auto n = batch.ids.size(0);
        auto start_ids = torch::full({n, 1}, tokenizer_->specials().cls, torch::kLong);
        auto start = embed_->finish(embed_->embed_tokens(start_ids) + embed_->embed_positions(1)).transpose(0, 1);
        auto out = decoder_->forward(start, memory, {}, {}, {}, batch.padding_mask);
        return out.squeeze(0);
    }

protected:
    std::size_t framing_tokens() const override { return 1; }
    std::vector<std::int64_t> frame_tokens(std::vector<std::int64_t> content) const override {
        content.push_back(tokenizer_->specials().sep);
        return content;
    }

private:
    std::shared_ptr<Embedder> embed_;
    torch::nn::TransformerEncoder encoder_;
    torch::nn::TransformerDecoder decoder_;
};

VocabTokenizer::Options vocab_options(const std::string& style) {
    VocabTokenizer::Options o;
    if (style == "wordpiece") return o;
    if (style == "sentencepiece") {
        o.lowercase = false;
        o.word_start_marker = "▁";
        o.pad_token = "<pad>";
        o.cls_token = "<pad>";  // T5 starts decoding from the pad id
        o.sep_token = "</s>";
        o.unk_token = "<unk>";
        return o;
    }
    if (style == "bpe") {
        o.lowercase = false;
        o.word_start_marker = "Ġ";
        o.pad_token = "<|endoftext|>";
        o.cls_token = "<|endoftext|>";
        o.sep_token = "<|endoftext|>";
        o.unk_token = "<|endoftext|>";
        return o;
    }
    throw BackendError("unknown vocab style '" + style + "'");
}

/// A TorchScript export of a pretrained model. The exported callable maps
/// (input_ids [B,T], attention_mask [B,T]) to hidden states [B,T',H]; for
/// encoder-decoder exports T' is the decoder length (1 start token).
class TorchScriptBackend : public Backend {
public:
    TorchScriptBackend(BackendSpec s, std::shared_ptr<const Tokenizer> tok)
        : Backend(std::move(s), std::move(tok)) {
        load_weights(spec_.torchscript_path);
    }

    torch::Tensor pooled(const TokenBatch& batch) override {
        auto attention = batch.padding_mask.logical_not().to(torch::kLong);
        auto out = module_.forward({batch.ids, attention}).toTensor();
        if (out.dim() != 3 || out.size(2) != spec_.hidden_size) {
            throw BackendError("torchscript backend returned shape " + std::to_string(out.dim()) +
                               "-d, expected [batch, time, " + std::to_string(spec_.hidden_size) + "]");
        }
        if (spec_.pooling == PoolingRule::decoder_start) return out.select(1, 0);
        return pool(out, batch);
    }

    std::vector<torch::Tensor> trainable_parameters() override {
        std::vector<torch::Tensor> out;
        for (const auto& p : module_.parameters()) out.push_back(p);
        return out;
    }

    void train(bool on) override {
        Backend::train(on);
        module_.train(on);
    }

    void save_weights(const std::string& path) const override { module_.save(path); }
    void load_weights(const std::string& path) override {
        try {
            module_ = torch::jit::load(path);
        } catch (const c10::Error& ex) {
            throw BackendError("cannot load torchscript module " + path + ": " + ex.what_without_backtrace());
        }
    }
    std::string weights_file() const override { return "backend.torchscript.pt"; }

protected:
    std::size_t framing_tokens() const override {
        return spec_.architecture == Architecture::encoder ? 2 : 1;
    }
    std::vector<std::int64_t> frame_tokens(std::vector<std::int64_t> content) const override {
        if (spec_.architecture == Architecture::encoder) content.insert(content.begin(), tokenizer_->specials().cls);
        content.push_back(tokenizer_->specials().sep);
        return content;
    }

private:
    mutable torch::jit::Module module_;
};

}  // namespace

Backend::Backend(BackendSpec spec, std::shared_ptr<const Tokenizer> tokenizer)
    : spec_(std::move(spec)), tokenizer_(std::move(tokenizer)) {}

std::size_t Backend::content_budget() const {
    return static_cast<std::size_t>(spec_.max_sequence_length) - framing_tokens();
}

std::vector<std::int64_t> Backend::frame(std::string_view text) const {
    const auto tokens = tokenizer_->tokenize(text);
    std::vector<std::int64_t> ids;
    const auto keep = std::min(tokens.size(), content_budget());
    ids.reserve(keep + framing_tokens());
    for (std::size_t i = 0; i < keep; ++i) ids.push_back(tokens[i].id);
    return frame_tokens(std::move(ids));
}

TokenBatch Backend::tokenize(std::span<const std::string> texts) const {
    std::vector<std::vector<std::int64_t>> framed;
    framed.reserve(texts.size());
    std::size_t longest = 1;
    for (const auto& t : texts) {
        framed.push_back(frame(t));
        longest = std::max(longest, framed.back().size());
    }
    const auto n = static_cast<std::int64_t>(texts.size());
    const auto time = static_cast<std::int64_t>(longest);
    TokenBatch batch;
    batch.ids = torch::full({n, time}, tokenizer_->specials().pad, torch::kLong);
    batch.padding_mask = torch::ones({n, time}, torch::kBool);
    batch.lengths = torch::empty({n}, torch::kLong);
    auto ids = batch.ids.accessor<std::int64_t, 2>();
    auto mask = batch.padding_mask.accessor<bool, 2>();
    auto lengths = batch.lengths.accessor<std::int64_t, 1>();
    for (std::int64_t b = 0; b < n; ++b) {
        const auto& row = framed[static_cast<std::size_t>(b)];
        for (std::size_t t = 0; t < row.size(); ++t) {
            ids[b][static_cast<std::int64_t>(t)] = row[t];
            mask[b][static_cast<std::int64_t>(t)] = false;
        }
        lengths[b] = static_cast<std::int64_t>(row.size());
    }
    return batch;
}

torch::Tensor Backend::pool(const torch::Tensor& hidden, const TokenBatch& batch) const {
    switch (spec_.pooling) {
        case PoolingRule::first_token:
        case PoolingRule::decoder_start:
            return hidden.select(1, 0);
        case PoolingRule::last_token: {
            auto index = (batch.lengths - 1).view({-1, 1, 1}).expand({hidden.size(0), 1, hidden.size(2)});
            return hidden.gather(1, index).squeeze(1);
        }
        case PoolingRule::mean: {
            auto keep = batch.padding_mask.logical_not().unsqueeze(-1).to(hidden.dtype());
            return (hidden * keep).sum(1) / keep.sum(1).clamp_min(1.0);
        }
    }
    throw BackendError("unhandled pooling rule");
}

PooledRepresentation Backend::encode(std::string_view text) {
    const bool was_training = is_training();
    train(false);
    torch::NoGradGuard no_grad;
    const std::string owned(text);
    auto out = pooled(tokenize(std::span<const std::string>(&owned, 1))).to(torch::kDouble).contiguous();
    train(was_training);
    if (out.dim() != 2 || out.size(1) != spec_.hidden_size) throw BackendError("backend produced a malformed representation");
    if (!torch::isfinite(out).all().item<bool>()) throw BackendError("backend produced non-finite values");
    PooledRepresentation rep;
    rep.values.assign(out.data_ptr<double>(), out.data_ptr<double>() + out.size(1));
    return rep;
}

void Backend::save_weights(const std::string& path) const {
    torch::serialize::OutputArchive archive;
    save(archive);
    archive.save_to(path);
}

void Backend::load_weights(const std::string& path) {
    try {
        torch::serialize::InputArchive archive;
        archive.load_from(path);
        load(archive);
    } catch (const c10::Error& ex) {
        throw BackendError("cannot load backend weights " + path + ": " + ex.what_without_backtrace());
    }
}

std::shared_ptr<Backend> make_backend(const BackendSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (!spec.is_miniature()) {
        std::shared_ptr<const Tokenizer> tok = VocabTokenizer::from_file(spec.vocab_path, vocab_options(spec.vocab_style));
        return std::make_shared<TorchScriptBackend>(spec, std::move(tok));
    }
    torch::manual_seed(seed);
    auto tok = std::make_shared<const HashingTokenizer>(spec.vocab_size);
    switch (spec.architecture) {
        case Architecture::encoder: return std::make_shared<EncoderBackend>(spec, tok);
        case Architecture::decoder: return std::make_shared<DecoderBackend>(spec, tok);
        case Architecture::encoder_decoder: return std::make_shared<EncoderDecoderBackend>(spec, tok);
    }
    throw BackendError("unhandled architecture");
}

}  // namespace irony
