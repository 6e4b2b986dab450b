#pragma once

#include "irony/backend.hpp"
#include "irony/evaluation.hpp"
#include "irony/model_spec.hpp"

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include <functional>
#include <optional>
#include <stdexcept>

namespace irony {

class EmptySplit : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonFiniteLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};


/// Backend + dropout on the pooled vector + linear head.
class IronyClassifier : public torch::nn::Module {
public:
    IronyClassifier(std::shared_ptr<Backend> backend, double dropout, double threshold = 0.5);

    /// Logits z for a batch, [batch].
    torch::Tensor logits(const TokenBatch& batch);

    /// Snapshot of the linear layer as W, b.
    ClassifierHead head() const;
    void set_head(const ClassifierHead& head);

    Backend& backend() noexcept { return *backend_; }
    const Backend& backend() const noexcept { return *backend_; }
    std::vector<torch::Tensor> trainable_parameters();

private:
    std::shared_ptr<Backend> backend_;
    torch::nn::Dropout dropout_;
    torch::nn::Linear linear_;
    double threshold_;
};

struct EvalSplits {
    const DatasetSplit* dev = nullptr;
    const DatasetSplit* test = nullptr;
};

/// Called after each epoch's record is complete, before the next epoch starts.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on binary cross-entropy. Returns one record per epoch;
/// zero epochs leaves the parameters untouched.
std::vector<EpochRecord> train(IronyClassifier& model, const DatasetSplit& split, const TrainingConfig& config,
                               const EvalSplits& eval = {}, const EpochCallback& on_epoch = {});

/// One prediction per example, input order, evaluation mode. Probabilities
/// come from the double-precision head on the backend's pooled vectors.
std::vector<Prediction> predict_split(IronyClassifier& model, const DatasetSplit& split, int batch_size = 32);

/// Mean binary cross-entropy over a split in evaluation mode.
double evaluate_loss(IronyClassifier& model, const DatasetSplit& split, int batch_size = 32);

}  // namespace irony
