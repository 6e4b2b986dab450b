#include "irony/head.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irony {

ClassifierHead::ClassifierHead(std::size_t hidden_size, double bias, double threshold)
    : weights(hidden_size, 0.0), bias(bias), threshold(threshold) {}

ClassifierHead::ClassifierHead(std::vector<double> weights, double bias, double threshold)
    : weights(std::move(weights)), bias(bias), threshold(threshold) {}

void ClassifierHead::validate() const {
    if (!std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); }) ||
        !std::isfinite(bias)) {
        throw std::invalid_argument("classifier head has non-finite parameters");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("classifier threshold must lie in (0, 1)");
    }
}

double head_forward(const ClassifierHead& head, std::span<const double> h) {
    if (h.size() != head.weights.size()) {
        throw DimensionMismatch("head_forward: representation has " + std::to_string(h.size()) +
                                " entries, head expects " + std::to_string(head.weights.size()));
    }
    double z = head.bias;
    for (std::size_t i = 0; i < h.size(); ++i) z += head.weights[i] * h[i];
    if (!std::isfinite(z)) throw NonFiniteInput("head_forward: logit is not finite");
    return z;
}

double predict_proba(double z) {
    if (!std::isfinite(z)) throw NonFiniteInput("predict_proba: logit is not finite");
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Label classify(double probability, double threshold) {
    return probability >= threshold ? Label::ironic : Label::non_ironic;
}

double bce_from_logit(double z, Label label) {
    if (!std::isfinite(z)) throw NonFiniteInput("bce_from_logit: logit is not finite");
    // softplus(z) - y z
    const double y = label == Label::ironic ? 1.0 : 0.0;
    return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
}

HeadGradient bce_gradient(const ClassifierHead& head, std::span<const double> h, Label label) {
    const double z = head_forward(head, h);
    const double residual = predict_proba(z) - (label == Label::ironic ? 1.0 : 0.0);
    HeadGradient g;
    g.d_weights.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) g.d_weights[i] = residual * h[i];
    g.d_bias = residual;
    return g;
}

}  // namespace irony
