#pragma once

#include "irony/dataset.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace irony {

class IdMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EmptyMatrix : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EmptyRuns : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Counts with ironic (label 1) as the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const noexcept { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Fractions in [0, 1]. A zero denominator yields 0 and sets the matching
/// `*_undefined` flag so reports can mark the cell.
struct MetricSet {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;

    friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

struct Prediction {
    std::int64_t id = 0;
    double probability = 0.0;
    Label label = Label::non_ironic;
};

/// Throws IdMismatch unless prediction ids cover gold ids exactly once.
ConfusionMatrix confusion(std::span<const std::pair<std::int64_t, Label>> predictions,
                          const DatasetSplit& gold);
ConfusionMatrix confusion(std::span<const Prediction> predictions, const DatasetSplit& gold);

MetricSet metrics(const ConfusionMatrix& cm);

/// Harmonic mean of precision and recall, 0 when both are 0.
double harmonic_f1(double precision, double recall);

struct EpochRecord {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    std::optional<MetricSet> dev;
    std::optional<MetricSet> test;
};

struct RunHistory {
    std::uint64_t seed = 0;
    std::vector<EpochRecord> epochs;
};

struct RunResult {
    std::uint64_t seed = 0;
    int best_epoch = 0;
    MetricSet metrics;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct MetricSpread {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;

    friend bool operator==(const MetricSpread&, const MetricSpread&) = default;
};

struct RunAggregate {
    std::vector<RunResult> per_run;  // sorted by seed
    MetricSet mean;
    MetricSpread std;  // sample standard deviation, 0 for a single run

    friend bool operator==(const RunAggregate&, const RunAggregate&) = default;
};

/// Index of the epoch with the highest selection F1, earliest on ties. The
/// selection metric is dev F1 when the run has dev metrics, test F1 otherwise.
std::size_t select_best_epoch(const RunHistory& run);

/// Best epoch per run, then the metric-wise mean across runs. The reported
/// metrics of a run are its test metrics at the best epoch (dev when no test).
RunAggregate aggregate(std::span<const RunHistory> runs);

nlohmann::ordered_json to_json(const MetricSet& metrics);
MetricSet metric_set_from_json(const nlohmann::json& json);
nlohmann::ordered_json to_json(const RunHistory& run);
RunHistory run_history_from_json(const nlohmann::json& json);
nlohmann::ordered_json to_json(const RunAggregate& aggregate);
RunAggregate run_aggregate_from_json(const nlohmann::json& json);

}  // namespace irony
