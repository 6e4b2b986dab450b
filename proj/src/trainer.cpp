#include "irony/trainer.hpp"

#include "irony/util.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace irony {

namespace {

std::vector<std::string> texts_of(const DatasetSplit& split, std::span<const std::size_t> order) {
    std::vector<std::string> texts;
    texts.reserve(order.size());
    for (auto i : order) texts.push_back(split.examples()[i].text);
    return texts;
}

torch::Tensor targets_of(const DatasetSplit& split, std::span<const std::size_t> order) {
    auto t = torch::empty({static_cast<std::int64_t>(order.size())}, torch::kFloat);
    auto acc = t.accessor<float, 1>();
    for (std::size_t k = 0; k < order.size(); ++k) {
        acc[static_cast<std::int64_t>(k)] = split.examples()[order[k]].label == Label::ironic ? 1.0f : 0.0f;
    }
    return t;
}

MetricSet evaluate_metrics(IronyClassifier& model, const DatasetSplit& split) {
    const auto predictions = predict_split(model, split);
    return metrics(confusion(std::span<const Prediction>(predictions), split));
}

}  // namespace

IronyClassifier::IronyClassifier(std::shared_ptr<Backend> backend, double dropout, double threshold)
    : backend_(register_module("backend", std::move(backend))),
      dropout_(register_module("dropout", torch::nn::Dropout(dropout))),
      linear_(register_module("head", torch::nn::Linear(backend_->spec().hidden_size, 1))),
      threshold_(threshold) {}

torch::Tensor IronyClassifier::logits(const TokenBatch& batch) {
    auto h = dropout_->forward(backend_->pooled(batch));
    return linear_->forward(h).squeeze(-1);
}

ClassifierHead IronyClassifier::head() const {
    auto w = linear_->weight.detach().to(torch::kDouble).contiguous();
    ClassifierHead head(std::vector<double>(w.data_ptr<double>(), w.data_ptr<double>() + w.numel()),
                        linear_->bias.detach().to(torch::kDouble).item<double>(), threshold_);
    return head;
}

void IronyClassifier::set_head(const ClassifierHead& head) {
    head.validate();
    if (static_cast<std::int64_t>(head.hidden_size()) != linear_->weight.size(1)) {
        throw DimensionMismatch("set_head: head width does not match the backend hidden size");
    }
    torch::NoGradGuard no_grad;
    linear_->weight.copy_(torch::tensor(head.weights, torch::kDouble).view({1, -1}).to(torch::kFloat));
    linear_->bias.fill_(head.bias);
    threshold_ = head.threshold;
}

std::vector<torch::Tensor> IronyClassifier::trainable_parameters() {
    auto params = backend_->trainable_parameters();
    for (const auto& p : linear_->parameters()) params.push_back(p);
    return params;
}

std::vector<EpochRecord> train(IronyClassifier& model, const DatasetSplit& split, const TrainingConfig& config,
                               const EvalSplits& eval, const EpochCallback& on_epoch) {
    config.validate();
    if (split.empty()) throw EmptySplit("train: split has no examples");
    std::vector<EpochRecord> history;
    if (config.epochs == 0) return history;

    torch::manual_seed(config.seed);
    std::mt19937_64 engine(config.seed);
    torch::optim::Adam optimizer(model.trainable_parameters(),
                                 torch::optim::AdamOptions(config.learning_rate)
                                     .betas({config.adam.beta1, config.adam.beta2})
                                     .eps(config.adam.epsilon)
                                     .weight_decay(config.adam.weight_decay));

    std::vector<std::size_t> order(split.size());
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[bounded_draw(engine, i)]);
        }

        model.train(true);
        double loss_sum = 0.0;
        const auto batch_size = static_cast<std::size_t>(config.batch_size);
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const auto stop = std::min(order.size(), start + batch_size);
            std::span<const std::size_t> idx(order.data() + start, stop - start);
            const auto texts = texts_of(split, idx);
            auto batch = model.backend().tokenize(texts);
            auto loss = torch::binary_cross_entropy_with_logits(model.logits(batch), targets_of(split, idx));
            const double value = loss.item<double>();
            if (!std::isfinite(value)) {
                throw NonFiniteLoss("non-finite training loss " + format_double(value) + " at epoch " +
                                    std::to_string(epoch) + ", examples " + std::to_string(start) + ".." +
                                    std::to_string(stop - 1) + " (lr " + format_double(config.learning_rate) + ")");
            }
            optimizer.zero_grad();
            loss.backward();
            optimizer.step();
            loss_sum += value * static_cast<double>(idx.size());
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(split.size());
        if (eval.dev) record.dev = evaluate_metrics(model, *eval.dev);
        if (eval.test) record.test = evaluate_metrics(model, *eval.test);
        history.push_back(record);
        if (on_epoch) on_epoch(record);
    }
    model.train(false);
    return history;
}

std::vector<Prediction> predict_split(IronyClassifier& model, const DatasetSplit& split, int batch_size) {
    model.train(false);
    torch::NoGradGuard no_grad;
    const auto head = model.head();
    std::vector<Prediction> out;
    out.reserve(split.size());
    const auto& examples = split.examples();
    for (std::size_t start = 0; start < examples.size(); start += static_cast<std::size_t>(batch_size)) {
        const auto stop = std::min(examples.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<std::string> texts;
        for (std::size_t i = start; i < stop; ++i) texts.push_back(examples[i].text);
        auto pooled = model.backend().pooled(model.backend().tokenize(texts)).to(torch::kDouble).contiguous();
        if (!torch::isfinite(pooled).all().item<bool>()) throw BackendError("backend produced non-finite values");
        const auto width = pooled.size(1);
        const double* data = pooled.data_ptr<double>();
        for (std::size_t i = start; i < stop; ++i) {
            std::span<const double> h(data + static_cast<std::ptrdiff_t>(i - start) * width, static_cast<std::size_t>(width));
            const double p = predict_proba(head_forward(head, h));
            out.push_back({examples[i].id, p, classify(p, head.threshold)});
        }
    }
    return out;
}

double evaluate_loss(IronyClassifier& model, const DatasetSplit& split, int batch_size) {
    if (split.empty()) throw EmptySplit("evaluate_loss: split has no examples");
    model.train(false);
    torch::NoGradGuard no_grad;
    const auto head = model.head();
    double sum = 0.0;
    const auto& examples = split.examples();
    for (std::size_t start = 0; start < examples.size(); start += static_cast<std::size_t>(batch_size)) {
        const auto stop = std::min(examples.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<std::string> texts;
        for (std::size_t i = start; i < stop; ++i) texts.push_back(examples[i].text);
        auto pooled = model.backend().pooled(model.backend().tokenize(texts)).to(torch::kDouble).contiguous();
        const auto width = pooled.size(1);
        const double* data = pooled.data_ptr<double>();
        for (std::size_t i = start; i < stop; ++i) {
            std::span<const double> h(data + static_cast<std::ptrdiff_t>(i - start) * width, static_cast<std::size_t>(width));
            sum += bce_from_logit(head_forward(head, h), examples[i].label);
        }
    }
    return sum / static_cast<double>(examples.size());
}

}  // namespace irony
