#pragma once

#include "irony/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace irony {

/// A published reference system. Values are percentages; absent cells are
/// rendered as "-".
struct BaselineRow {
    std::string name;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> accuracy;
};

std::vector<BaselineRow> parse_baselines(const nlohmann::json& json);
std::vector<BaselineRow> load_baselines(const std::string& path);

/// (strategy, architecture) -> aggregate over seeds.
using ResultGrid = std::map<std::pair<std::string, std::string>, RunAggregate>;

struct ReportMeta {
    std::string config_fingerprint;
    std::string generated_at;
    std::vector<std::uint64_t> seeds;
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

struct ReportDocument {
    nlohmann::ordered_json json;
    std::string text;
};

struct RankingRow {
    std::string name;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> accuracy;
    bool is_baseline = false;
};

/// Results and baselines merged and sorted by F1, descending. Result values
/// are converted to percentages so both kinds compare on one scale.
std::vector<RankingRow> rank(const ResultGrid& results, const std::vector<BaselineRow>& baselines);

/// Prompt x model grid plus the F1 ranking, as text and JSON. JSON metric
/// values are fractions; the text renders percentages to one decimal.
ReportDocument render_report(const ResultGrid& results, const std::vector<BaselineRow>& baselines,
                             const ReportMeta& meta = {});

/// Rebuilds the grid from a rendered JSON report, bit-exact.
ResultGrid grid_from_report(const nlohmann::json& report);

/// Canonical display order for strategy and architecture identifiers.
int strategy_rank(const std::string& strategy);
int architecture_rank(const std::string& architecture);

}  // namespace irony
