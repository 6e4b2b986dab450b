#pragma once

#include "irony/head.hpp"
#include "irony/model_spec.hpp"
#include "irony/tokenizer.hpp"

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace irony {


/// Padded, framed token ids for a batch of texts. `padding_mask` is true at
/// padding positions.
struct TokenBatch {
    torch::Tensor ids;           // [batch, time] int64
    torch::Tensor padding_mask;  // [batch, time] bool
    torch::Tensor lengths;       // [batch] int64
};

/// A text encoder producing one pooled vector of `hidden_size` per text.
class Backend : public torch::nn::Module {
public:
    Backend(BackendSpec spec, std::shared_ptr<const Tokenizer> tokenizer);

    const BackendSpec& spec() const noexcept { return spec_; }
    const Tokenizer& tokenizer() const noexcept { return *tokenizer_; }

    /// Number of text tokens kept after framing tokens are added.
    std::size_t content_budget() const;
    std::vector<std::int64_t> frame(std::string_view text) const;
    TokenBatch tokenize(std::span<const std::string> texts) const;

    /// Pooled representations, [batch, hidden_size].
    virtual torch::Tensor pooled(const TokenBatch& batch) = 0;

    /// Evaluation-mode encoding of one text.
    PooledRepresentation encode(std::string_view text);

    virtual std::vector<torch::Tensor> trainable_parameters() { return parameters(); }
    virtual void save_weights(const std::string& path) const;
    virtual void load_weights(const std::string& path);
    /// File name used inside a checkpoint directory.
    virtual std::string weights_file() const { return "backend.pt"; }

protected:
    virtual std::size_t framing_tokens() const = 0;
    virtual std::vector<std::int64_t> frame_tokens(std::vector<std::int64_t> content) const = 0;

    torch::Tensor pool(const torch::Tensor& hidden, const TokenBatch& batch) const;

    BackendSpec spec_;
    std::shared_ptr<const Tokenizer> tokenizer_;
};

/// Builds a backend; miniature weights are drawn from `seed`.
std::shared_ptr<Backend> make_backend(const BackendSpec& spec, std::uint64_t seed);

}  // namespace irony
