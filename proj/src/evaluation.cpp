#include "irony/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace irony {

namespace {

double ratio(std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

const MetricSet& selection_metrics(const EpochRecord& e, bool use_dev) {
    return use_dev ? *e.dev : *e.test;
}

const MetricSet& reported_metrics(const EpochRecord& e) {
    if (e.test) return *e.test;
    return *e.dev;
}

}  // namespace

ConfusionMatrix confusion(std::span<const std::pair<std::int64_t, Label>> predictions,
                          const DatasetSplit& gold) {
    std::map<std::int64_t, Label> truth;
    for (const auto& e : gold.examples()) truth.emplace(e.id, e.label);

    ConfusionMatrix cm;
    std::map<std::int64_t, bool> seen;
    for (const auto& [id, predicted] : predictions) {
        auto it = truth.find(id);
        if (it == truth.end()) throw IdMismatch("prediction for unknown id " + std::to_string(id));
        if (!seen.emplace(id, true).second) throw IdMismatch("duplicate prediction for id " + std::to_string(id));
        const bool gold_pos = it->second == Label::ironic;
        const bool pred_pos = predicted == Label::ironic;
        if (gold_pos && pred_pos) ++cm.tp;
        else if (!gold_pos && pred_pos) ++cm.fp;
        else if (gold_pos && !pred_pos) ++cm.fn;
        else ++cm.tn;
    }
    if (seen.size() != truth.size()) {
        for (const auto& [id, _] : truth) {
            if (!seen.count(id)) throw IdMismatch("no prediction for id " + std::to_string(id));
        }
    }
    return cm;
}

ConfusionMatrix confusion(std::span<const Prediction> predictions, const DatasetSplit& gold) {
    std::vector<std::pair<std::int64_t, Label>> pairs;
    pairs.reserve(predictions.size());
    for (const auto& p : predictions) pairs.emplace_back(p.id, p.label);
    return confusion(std::span<const std::pair<std::int64_t, Label>>(pairs), gold);
}

MetricSet metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw EmptyMatrix("metrics: confusion matrix is empty");
    MetricSet m;
    m.precision_undefined = cm.tp + cm.fp == 0;
    m.recall_undefined = cm.tp + cm.fn == 0;
    m.precision = m.precision_undefined ? 0.0 : ratio(cm.tp, cm.tp + cm.fp);
    m.recall = m.recall_undefined ? 0.0 : ratio(cm.tp, cm.tp + cm.fn);
    // 2PR/(P+R) reduces to 2tp/(2tp+fp+fn); the count form is exact
    m.f1 = cm.tp == 0 ? 0.0 : ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    m.accuracy = ratio(cm.tp + cm.tn, cm.total());
    return m;
}

double harmonic_f1(double precision, double recall) {
    const double sum = precision + recall;
    return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

std::size_t select_best_epoch(const RunHistory& run) {
    if (run.epochs.empty()) throw EmptyRuns("run with seed " + std::to_string(run.seed) + " has no epochs");
    const bool use_dev = std::all_of(run.epochs.begin(), run.epochs.end(), [](const auto& e) { return e.dev.has_value(); });
    if (!use_dev && !std::all_of(run.epochs.begin(), run.epochs.end(), [](const auto& e) { return e.test.has_value(); })) {
        throw std::invalid_argument("run with seed " + std::to_string(run.seed) +
                                    " lacks dev or test metrics on some epoch");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < run.epochs.size(); ++i) {
        if (selection_metrics(run.epochs[i], use_dev).f1 > selection_metrics(run.epochs[best], use_dev).f1) best = i;
    }
    return best;
}

RunAggregate aggregate(std::span<const RunHistory> runs) {
    if (runs.empty()) throw EmptyRuns("aggregate: no runs");
    RunAggregate agg;
    for (const auto& run : runs) {
        const auto best = select_best_epoch(run);
        agg.per_run.push_back({run.seed, run.epochs[best].epoch, reported_metrics(run.epochs[best])});
    }
    // a canonical order makes the floating-point sums independent of input order
    std::sort(agg.per_run.begin(), agg.per_run.end(), [](const RunResult& a, const RunResult& b) {
        return std::tie(a.seed, a.best_epoch, a.metrics.f1, a.metrics.precision, a.metrics.recall, a.metrics.accuracy) <
               std::tie(b.seed, b.best_epoch, b.metrics.f1, b.metrics.precision, b.metrics.recall, b.metrics.accuracy);
    });

    const double n = static_cast<double>(agg.per_run.size());
    for (const auto& r : agg.per_run) {
        agg.mean.precision += r.metrics.precision;
        agg.mean.recall += r.metrics.recall;
        agg.mean.f1 += r.metrics.f1;
        agg.mean.accuracy += r.metrics.accuracy;
        agg.mean.precision_undefined = agg.mean.precision_undefined || r.metrics.precision_undefined;
        agg.mean.recall_undefined = agg.mean.recall_undefined || r.metrics.recall_undefined;
    }
    agg.mean.precision /= n;
    agg.mean.recall /= n;
    agg.mean.f1 /= n;
    agg.mean.accuracy /= n;

    if (agg.per_run.size() > 1) {
        MetricSpread ss;
        for (const auto& r : agg.per_run) {
            ss.precision += std::pow(r.metrics.precision - agg.mean.precision, 2);
            ss.recall += std::pow(r.metrics.recall - agg.mean.recall, 2);
            ss.f1 += std::pow(r.metrics.f1 - agg.mean.f1, 2);
            ss.accuracy += std::pow(r.metrics.accuracy - agg.mean.accuracy, 2);
        }
        agg.std = {std::sqrt(ss.precision / (n - 1)), std::sqrt(ss.recall / (n - 1)),
                   std::sqrt(ss.f1 / (n - 1)), std::sqrt(ss.accuracy / (n - 1))};
    }
    return agg;
}

}  // namespace irony

namespace irony {

nlohmann::ordered_json to_json(const MetricSet& m) {
    nlohmann::ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["accuracy"] = m.accuracy;
    j["precision_undefined"] = m.precision_undefined;
    j["recall_undefined"] = m.recall_undefined;
    return j;
}

MetricSet metric_set_from_json(const nlohmann::json& j) {
    MetricSet m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.accuracy = j.at("accuracy").get<double>();
    m.precision_undefined = j.value("precision_undefined", false);
    m.recall_undefined = j.value("recall_undefined", false);
    return m;
}

nlohmann::ordered_json to_json(const RunHistory& run) {
    nlohmann::ordered_json j;
    j["seed"] = run.seed;
    j["epochs"] = nlohmann::ordered_json::array();
    for (const auto& e : run.epochs) {
        nlohmann::ordered_json row;
        row["epoch"] = e.epoch;
        row["train_loss"] = e.train_loss;
        row["dev"] = e.dev ? to_json(*e.dev) : nlohmann::ordered_json(nullptr);
        row["test"] = e.test ? to_json(*e.test) : nlohmann::ordered_json(nullptr);
        j["epochs"].push_back(std::move(row));
    }
    return j;
}

RunHistory run_history_from_json(const nlohmann::json& j) {
    RunHistory run;
    run.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& row : j.at("epochs")) {
        EpochRecord e;
        e.epoch = row.at("epoch").get<int>();
        e.train_loss = row.at("train_loss").get<double>();
        if (row.contains("dev") && !row.at("dev").is_null()) e.dev = metric_set_from_json(row.at("dev"));
        if (row.contains("test") && !row.at("test").is_null()) e.test = metric_set_from_json(row.at("test"));
        run.epochs.push_back(e);
    }
    return run;
}

nlohmann::ordered_json to_json(const RunAggregate& agg) {
    nlohmann::ordered_json j;
    j["mean"] = to_json(agg.mean);
    j["std"] = {{"precision", agg.std.precision},
                {"recall", agg.std.recall},
                {"f1", agg.std.f1},
                {"accuracy", agg.std.accuracy}};
    j["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : agg.per_run) {
        j["runs"].push_back({{"seed", r.seed}, {"best_epoch", r.best_epoch}, {"metrics", to_json(r.metrics)}});
    }
    return j;
}

RunAggregate run_aggregate_from_json(const nlohmann::json& j) {
    RunAggregate agg;
    agg.mean = metric_set_from_json(j.at("mean"));
    const auto& sd = j.at("std");
    agg.std = {sd.at("precision").get<double>(), sd.at("recall").get<double>(), sd.at("f1").get<double>(),
               sd.at("accuracy").get<double>()};
    for (const auto& r : j.at("runs")) {
        agg.per_run.push_back(
            {r.at("seed").get<std::uint64_t>(), r.at("best_epoch").get<int>(), metric_set_from_json(r.at("metrics"))});
    }
    return agg;
}

}  // namespace irony
