#include "irony/report.hpp"

#include "irony/util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

namespace irony {

namespace {

constexpr std::string_view kStrategies[] = {"none", "emotion", "context", "comprehensive"};
constexpr std::string_view kStrategyTitles[] = {"No prompt", "Emotion focus", "Contextual enrichment",
                                                "Comprehensive enhancement"};
constexpr std::string_view kArchitectures[] = {"encoder", "encoder_decoder", "decoder"};

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

nlohmann::ordered_json number_or_null(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string cell(const std::optional<double>& percent, bool flagged = false) {
    if (!percent) return "-";
    return fmt::format("{:.1f}{}", *percent, flagged ? "*" : "");
}

std::string strategy_title(const std::string& id) {
    const int r = strategy_rank(id);
    return r < 4 ? std::string(kStrategyTitles[r]) : id;
}

}  // namespace

int strategy_rank(const std::string& strategy) {
    for (int i = 0; i < 4; ++i) {
        if (kStrategies[i] == strategy) return i;
    }
    return 4;
}

int architecture_rank(const std::string& architecture) {
    for (int i = 0; i < 3; ++i) {
        if (kArchitectures[i] == architecture) return i;
    }
    return 3;
}

std::vector<BaselineRow> parse_baselines(const nlohmann::json& json) {
    std::vector<BaselineRow> rows;
    for (const auto& row : json.at("baselines")) {
        rows.push_back({row.at("name").get<std::string>(), optional_number(row, "precision"),
                        optional_number(row, "recall"), optional_number(row, "f1"),
                        optional_number(row, "accuracy")});
    }
    return rows;
}

std::vector<BaselineRow> load_baselines(const std::string& path) {
    return parse_baselines(nlohmann::json::parse(read_file(path)));
}

std::vector<RankingRow> rank(const ResultGrid& results, const std::vector<BaselineRow>& baselines) {
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& [key, _] : results) keys.push_back(key);
    std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        return std::tuple(strategy_rank(a.first), architecture_rank(a.second)) <
               std::tuple(strategy_rank(b.first), architecture_rank(b.second));
    });
    std::vector<RankingRow> rows;
    for (const auto& key : keys) {
        const auto& m = results.at(key).mean;
        rows.push_back({key.second + " / " + key.first, m.precision * 100.0, m.recall * 100.0, m.f1 * 100.0,
                        m.accuracy * 100.0, false});
    }
    for (const auto& b : baselines) rows.push_back({b.name, b.precision, b.recall, b.f1, b.accuracy, true});

    // rows without an F1 sink to the bottom; ties keep results ahead of baselines
    std::stable_sort(rows.begin(), rows.end(), [](const RankingRow& a, const RankingRow& b) {
        const double fa = a.f1.value_or(-1.0);
        const double fb = b.f1.value_or(-1.0);
        return std::tie(fb, a.is_baseline) < std::tie(fa, b.is_baseline);
    });
    return rows;
}

ReportDocument render_report(const ResultGrid& results, const std::vector<BaselineRow>& baselines,
                             const ReportMeta& meta) {
    std::vector<std::string> strategies;
    std::vector<std::string> architectures;
    for (const auto& [key, _] : results) {
        if (std::find(strategies.begin(), strategies.end(), key.first) == strategies.end()) strategies.push_back(key.first);
        if (std::find(architectures.begin(), architectures.end(), key.second) == architectures.end()) {
            architectures.push_back(key.second);
        }
    }
    std::sort(strategies.begin(), strategies.end(), [](const auto& a, const auto& b) {
        return std::make_tuple(strategy_rank(a), a) < std::make_tuple(strategy_rank(b), b);
    });
    std::sort(architectures.begin(), architectures.end(), [](const auto& a, const auto& b) {
        return std::make_tuple(architecture_rank(a), a) < std::make_tuple(architecture_rank(b), b);
    });

    ReportDocument doc;
    auto& json = doc.json;
    json["grid"] = nlohmann::ordered_json::array();
    for (const auto& s : strategies) {
        for (const auto& a : architectures) {
            auto it = results.find({s, a});
            if (it == results.end()) continue;
            const auto& agg = it->second;
            nlohmann::ordered_json row;
            row["strategy"] = s;
            row["architecture"] = a;
            row["precision"] = agg.mean.precision;
            row["recall"] = agg.mean.recall;
            row["f1"] = agg.mean.f1;
            row["accuracy"] = agg.mean.accuracy;
            row["std"] = {{"precision", agg.std.precision},
                          {"recall", agg.std.recall},
                          {"f1", agg.std.f1},
                          {"accuracy", agg.std.accuracy}};
            row["precision_undefined"] = agg.mean.precision_undefined;
            row["recall_undefined"] = agg.mean.recall_undefined;
            row["runs"] = nlohmann::ordered_json::array();
            for (const auto& r : agg.per_run) {
                nlohmann::ordered_json run;
                run["seed"] = r.seed;
                run["best_epoch"] = r.best_epoch;
                run["metrics"] = to_json(r.metrics);
                row["runs"].push_back(std::move(run));
            }
            json["grid"].push_back(std::move(row));
        }
    }

    const auto ranking = rank(results, baselines);
    json["ranking"] = nlohmann::ordered_json::array();
    for (const auto& r : ranking) {
        nlohmann::ordered_json row;
        row["name"] = r.name;
        row["precision"] = number_or_null(r.precision);
        row["recall"] = number_or_null(r.recall);
        row["f1"] = number_or_null(r.f1);
        row["accuracy"] = number_or_null(r.accuracy);
        row["is_baseline"] = r.is_baseline;
        json["ranking"].push_back(std::move(row));
    }

    json["meta"] = {{"config_fingerprint", meta.config_fingerprint},
                    {"generated_at", meta.generated_at},
                    {"seeds", meta.seeds},
                    {"units", {{"grid", "fraction"}, {"ranking", "percent"}}}};
    for (const auto& [k, v] : meta.extra.items()) json["meta"][k] = v;

    std::ostringstream out;
    bool flagged_any = false;
    out << "Irony detection results (%)\n\n";
    if (!architectures.empty()) {
        std::string header = fmt::format("{:<28}", "Prompt");
        std::string sub = fmt::format("{:<28}", "");
        for (const auto& a : architectures) {
            header += fmt::format("| {:<31}", a);
            sub += fmt::format("| {:>7}{:>8}{:>8}{:>8}", "P", "R", "F1", "Acc");
        }
        out << header << "\n" << sub << "\n" << std::string(sub.size(), '-') << "\n";
        for (const auto& s : strategies) {
            std::string line = fmt::format("{:<28}", strategy_title(s));
            for (const auto& a : architectures) {
                auto it = results.find({s, a});
                if (it == results.end()) {
                    line += fmt::format("| {:>7}{:>8}{:>8}{:>8}", "-", "-", "-", "-");
                    continue;
                }
                const auto& m = it->second.mean;
                const bool f1_flag = m.precision_undefined || m.recall_undefined;
                flagged_any = flagged_any || f1_flag;
                line += fmt::format("| {:>7}{:>8}{:>8}{:>8}", cell(m.precision * 100.0, m.precision_undefined),
                                    cell(m.recall * 100.0, m.recall_undefined), cell(m.f1 * 100.0, f1_flag),
                                    cell(m.accuracy * 100.0));
            }
            out << line << "\n";
        }
    } else {
        out << "(no results)\n";
    }

    out << "\nRanking by F1 (%)\n\n";
    out << fmt::format("{:<4}{:<40}{:>8}{:>8}{:>8}{:>8}\n", "#", "Model", "P", "R", "F1", "Acc");
    out << std::string(76, '-') << "\n";
    int position = 1;
    for (const auto& r : ranking) {
        out << fmt::format("{:<4}{:<40}{:>8}{:>8}{:>8}{:>8}\n", position++,
                           r.name + (r.is_baseline ? " [ref]" : ""), cell(r.precision), cell(r.recall),
                           cell(r.f1), cell(r.accuracy));
    }
    if (flagged_any) out << "\n* zero denominator in at least one run; the value was taken as 0.\n";
    if (!meta.seeds.empty()) {
        out << "\nseeds:";
        for (auto s : meta.seeds) out << ' ' << s;
        out << "\n";
    }
    doc.text = out.str();
    return doc;
}

ResultGrid grid_from_report(const nlohmann::json& report) {
    ResultGrid grid;
    for (const auto& row : report.at("grid")) {
        RunAggregate agg;
        agg.mean.precision = row.at("precision").get<double>();
        agg.mean.recall = row.at("recall").get<double>();
        agg.mean.f1 = row.at("f1").get<double>();
        agg.mean.accuracy = row.at("accuracy").get<double>();
        agg.mean.precision_undefined = row.value("precision_undefined", false);
        agg.mean.recall_undefined = row.value("recall_undefined", false);
        const auto& sd = row.at("std");
        agg.std = {sd.at("precision").get<double>(), sd.at("recall").get<double>(), sd.at("f1").get<double>(),
                   sd.at("accuracy").get<double>()};
        for (const auto& run : row.at("runs")) {
            agg.per_run.push_back({run.at("seed").get<std::uint64_t>(), run.at("best_epoch").get<int>(),
                                   metric_set_from_json(run.at("metrics"))});
        }
        grid.emplace(std::make_pair(row.at("strategy").get<std::string>(), row.at("architecture").get<std::string>()),
                     std::move(agg));
    }
    return grid;
}

}  // namespace irony
