#pragma once

#include "irony/dataset.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace irony {

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NonFiniteInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Pooled text representation h produced by a backend.
struct PooledRepresentation {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const double> view() const noexcept { return values; }
};

/// Linear irony head: logit z = W . h + b, probability sigmoid(z),
/// label 1 iff probability >= threshold.
struct ClassifierHead {
    std::vector<double> weights;  // W, one row of width d
    double bias = 0.0;            // b
    double threshold = 0.5;

    ClassifierHead() = default;
    explicit ClassifierHead(std::size_t hidden_size, double bias = 0.0, double threshold = 0.5);
    ClassifierHead(std::vector<double> weights, double bias, double threshold = 0.5);

    std::size_t hidden_size() const noexcept { return weights.size(); }
    /// Throws std::invalid_argument when a parameter is non-finite or the
    /// threshold is outside (0, 1).
    void validate() const;
};

double head_forward(const ClassifierHead& head, std::span<const double> h);

/// 1 / (1 + exp(-z)), evaluated without overflow for any finite z.
double predict_proba(double z);

/// Ties go to the positive class.
Label classify(double probability, double threshold = 0.5);

/// Binary cross-entropy of sigmoid(z) against `label`, computed from the
/// logit so it stays finite where sigmoid saturates.
double bce_from_logit(double z, Label label);

struct HeadGradient {
    std::vector<double> d_weights;
    double d_bias = 0.0;
};

/// Analytic gradient of bce_from_logit(head_forward(head, h), label) with
/// respect to W and b: (sigmoid(z) - y) * h and (sigmoid(z) - y).
HeadGradient bce_gradient(const ClassifierHead& head, std::span<const double> h, Label label);

}  // namespace irony
