#include "irony/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace irony;

namespace {

using Pred = std::pair<std::int64_t, Label>;

DatasetSplit gold_of(const std::vector<Label>& labels) {
    std::vector<LabeledExample> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) rows.push_back({static_cast<std::int64_t>(i), "t", labels[i]});
    return DatasetSplit(SplitName::test, rows);
}

Label flip(Label l) { return l == Label::ironic ? Label::non_ironic : Label::ironic; }

EpochRecord epoch(int n, double f1) {
    MetricSet m{f1, f1, f1, f1, false, false};
    return {n, 1.0 / n, m, m};
}

}  // namespace

TEST_CASE("perfect and flipped predictions") {
    std::vector<Label> labels(6, Label::ironic);
    labels.insert(labels.end(), 4, Label::non_ironic);
    const auto gold = gold_of(labels);
    std::vector<Pred> right, wrong;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        right.emplace_back(i, labels[i]);
        wrong.emplace_back(i, flip(labels[i]));
    }
    CHECK(confusion(right, gold) == ConfusionMatrix{6, 0, 0, 4});
    CHECK(confusion(wrong, gold) == ConfusionMatrix{0, 4, 6, 0});
    const auto perfect = metrics(confusion(right, gold));
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.accuracy == 1.0);
}

TEST_CASE("explicit 20-pair fixture") {
    // 5 tp, 2 fp, 3 fn, 10 tn laid out by hand
    std::vector<Label> gold_labels, predicted;
    auto add = [&](int n, Label g, Label p) {
        for (int i = 0; i < n; ++i) {
            gold_labels.push_back(g);
            predicted.push_back(p);
        }
    };
    add(5, Label::ironic, Label::ironic);
    add(2, Label::non_ironic, Label::ironic);
    add(3, Label::ironic, Label::non_ironic);
    add(10, Label::non_ironic, Label::non_ironic);
    std::vector<Pred> preds;
    for (std::size_t i = 0; i < predicted.size(); ++i) preds.emplace_back(i, predicted[i]);
    std::reverse(preds.begin(), preds.end());
    const auto cm = confusion(preds, gold_of(gold_labels));
    CHECK(cm == ConfusionMatrix{5, 2, 3, 10});
    const auto m = metrics(cm);
    CHECK(m.precision == doctest::Approx(5.0 / 7.0));
    CHECK(m.recall == 0.625);
    CHECK(m.f1 == 10.0 / 15.0);
    CHECK(m.accuracy == 0.75);
}

TEST_CASE("id coverage is enforced") {
    const auto gold = gold_of({Label::ironic, Label::non_ironic});
    CHECK_THROWS_AS(confusion(std::vector<Pred>{{0, Label::ironic}}, gold), IdMismatch);
    CHECK_THROWS_AS(confusion(std::vector<Pred>{{0, Label::ironic}, {1, Label::ironic}, {2, Label::ironic}}, gold),
                    IdMismatch);
    CHECK_THROWS_AS(confusion(std::vector<Pred>{{0, Label::ironic}, {0, Label::ironic}}, gold), IdMismatch);
    CHECK_THROWS_AS(metrics(ConfusionMatrix{}), EmptyMatrix);
}

TEST_CASE("zero denominators give 0 and set flags") {
    const auto none_predicted = metrics({0, 0, 4, 6});
    CHECK(none_predicted.precision == 0.0);
    CHECK(none_predicted.precision_undefined);
    CHECK_FALSE(none_predicted.recall_undefined);
    CHECK(none_predicted.f1 == 0.0);
    const auto no_positives = metrics({0, 3, 0, 7});
    CHECK(no_positives.recall_undefined);
    CHECK(no_positives.f1 == 0.0);
}

TEST_CASE("metric properties over all small matrices") {
    for (std::size_t tp = 0; tp < 8; ++tp)
        for (std::size_t fp = 0; fp < 8; ++fp)
            for (std::size_t fn = 0; fn < 8; ++fn)
                for (std::size_t tn = 0; tn < 8; ++tn) {
                    const ConfusionMatrix cm{tp, fp, fn, tn};
                    if (cm.total() == 0) continue;
                    const auto m = metrics(cm);
                    for (double v : {m.precision, m.recall, m.f1, m.accuracy}) {
                        CHECK(v >= 0.0);
                        CHECK(v <= 1.0);
                    }
                    CHECK((m.accuracy == 1.0) == (fp == 0 && fn == 0));
                    if (tp + fp > 0 && tp + fn > 0) {
                        CHECK(m.f1 == 2.0 * tp / (2.0 * tp + fp + fn));
                        if (m.precision + m.recall > 0) {
                            CHECK(m.f1 == doctest::Approx(harmonic_f1(m.precision, m.recall)).epsilon(1e-12));
                        }
                    }
                    // swapping the positive class swaps tp/tn and fp/fn
                    const auto swapped = metrics(ConfusionMatrix{tn, fn, fp, tp});
                    CHECK(swapped.accuracy == m.accuracy);
                }
}

TEST_CASE("harmonic mean arithmetic") {
    CHECK(harmonic_f1(0.5, 0.5) == 0.5);
    CHECK(harmonic_f1(0.0, 0.0) == 0.0);
    CHECK(std::abs(harmonic_f1(78.8, 66.9) - 72.4) <= 0.05);
}

TEST_CASE("aggregate of a single run") {
    RunHistory run{4, {epoch(1, 0.6), epoch(2, 0.8), epoch(3, 0.7)}};
    const auto agg = aggregate(std::vector<RunHistory>{run});
    REQUIRE(agg.per_run.size() == 1);
    CHECK(agg.per_run[0].best_epoch == 2);
    CHECK(agg.mean == run.epochs[1].test.value());
    CHECK(agg.std == MetricSpread{});
}

TEST_CASE("aggregate averages best epochs") {
    const std::vector<RunHistory> runs{{1, {epoch(1, 0.70)}}, {2, {epoch(1, 0.5), epoch(2, 0.80)}}};
    const auto agg = aggregate(runs);
    CHECK(agg.mean.f1 == doctest::Approx(0.75));
    CHECK(agg.std.f1 == doctest::Approx(std::sqrt(0.005)));
    CHECK_THROWS_AS(aggregate(std::vector<RunHistory>{}), EmptyRuns);
}

TEST_CASE("best epoch selection matches an exhaustive scan") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        RunHistory run{static_cast<std::uint64_t>(trial), {}};
        const int n = 1 + static_cast<int>(rng() % 8);
        for (int e = 1; e <= n; ++e) run.epochs.push_back(epoch(e, static_cast<double>(rng() % 5) / 4.0));
        std::size_t best = 0;
        for (std::size_t i = 1; i < run.epochs.size(); ++i) {
            if (run.epochs[i].dev->f1 > run.epochs[best].dev->f1) best = i;
        }
        CHECK(select_best_epoch(run) == best);
    }
}

TEST_CASE("selection uses dev F1 and reports test metrics") {
    RunHistory run{0, {}};
    run.epochs.push_back({1, 0.5, MetricSet{0, 0, 0.9, 0, false, false}, MetricSet{0, 0, 0.1, 0, false, false}});
    run.epochs.push_back({2, 0.4, MetricSet{0, 0, 0.5, 0, false, false}, MetricSet{0, 0, 0.9, 0, false, false}});
    const auto agg = aggregate(std::vector<RunHistory>{run});
    CHECK(agg.per_run[0].best_epoch == 1);
    CHECK(agg.mean.f1 == 0.1);
}

TEST_CASE("aggregate is invariant to run order") {
    std::mt19937_64 rng(31);
    std::vector<RunHistory> runs;
    for (std::uint64_t s = 0; s < 5; ++s) {
        RunHistory r{s * 7, {}};
        for (int e = 1; e <= 3; ++e) {
            std::uniform_real_distribution<double> u(0, 1);
            MetricSet m{u(rng), u(rng), u(rng), u(rng), false, false};
            r.epochs.push_back({e, 1.0, m, m});
        }
        runs.push_back(r);
    }
    const auto reference = aggregate(runs);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(runs.begin(), runs.end(), rng);
        CHECK(aggregate(runs) == reference);
    }
}

TEST_CASE("evaluation json round trips") {
    RunHistory run{9, {epoch(1, 0.1 + 1e-17), epoch(2, 1.0 / 3.0)}};
    run.epochs[0].dev.reset();
    CHECK(to_json(run_history_from_json(to_json(run))) == to_json(run));
    const auto agg = aggregate(std::vector<RunHistory>{{1, {epoch(1, 1.0 / 7.0)}}, {2, {epoch(1, 2.0 / 3.0)}}});
    CHECK(run_aggregate_from_json(nlohmann::json::parse(to_json(agg).dump())) == agg);
}
