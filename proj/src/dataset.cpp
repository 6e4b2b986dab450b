#include "irony/dataset.hpp"

#include "irony/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>

namespace irony {

namespace {

constexpr std::string_view kHeader = "Tweet index\tLabel\tTweet text";

std::optional<long long> parse_integer(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    long long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
    return value;
}

std::vector<std::size_t> shuffled(std::vector<std::size_t> items, std::mt19937_64& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded_draw(engine, i));
        std::swap(items[i - 1], items[j]);
    }
    return items;
}

std::map<Label, std::vector<std::size_t>> positions_by_class(const DatasetSplit& split) {
    std::map<Label, std::vector<std::size_t>> out{{Label::non_ironic, {}}, {Label::ironic, {}}};
    const auto& examples = split.examples();
    for (std::size_t i = 0; i < examples.size(); ++i) out[examples[i].label].push_back(i);
    return out;
}

DatasetSplit gather(const DatasetSplit& split, std::vector<std::size_t> positions) {
    std::sort(positions.begin(), positions.end());
    std::vector<LabeledExample> picked;
    picked.reserve(positions.size());
    for (auto p : positions) picked.push_back(split.examples()[p]);
    return DatasetSplit(split.name(), std::move(picked));
}

}  // namespace

Label label_from_int(long long value) {
    if (value == 0) return Label::non_ironic;
    if (value == 1) return Label::ironic;
    throw DatasetError("label must be 0 or 1, got " + std::to_string(value));
}

std::string to_string(SplitName name) {
    switch (name) {
        case SplitName::train: return "train";
        case SplitName::test: return "test";
        case SplitName::custom: return "custom";
    }
    return "custom";
}

SplitName split_name_from_string(std::string_view name) {
    if (name == "train") return SplitName::train;
    if (name == "test") return SplitName::test;
    if (name == "custom") return SplitName::custom;
    throw DatasetError("unknown split name '" + std::string(name) + "'");
}

FormatError::FormatError(std::size_t line, const std::string& what)
    : DatasetError("line " + std::to_string(line) + ": " + what), line_(line) {}

DatasetSplit::DatasetSplit(SplitName name, std::vector<LabeledExample> examples)
    : name_(name), examples_(std::move(examples)) {
    class_counts_[Label::non_ironic] = 0;
    class_counts_[Label::ironic] = 0;
    for (const auto& e : examples_) ++class_counts_[e.label];
}

std::size_t DatasetSplit::count(Label label) const {
    auto it = class_counts_.find(label);
    return it == class_counts_.end() ? 0 : it->second;
}

DatasetSplit DatasetSplit::with_texts(std::vector<std::string> texts) const {
    if (texts.size() != examples_.size()) {
        throw DatasetError("with_texts: expected " + std::to_string(examples_.size()) +
                           " texts, got " + std::to_string(texts.size()));
    }
    std::vector<LabeledExample> out = examples_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].text = std::move(texts[i]);
    return DatasetSplit(name_, std::move(out));
}

DatasetSplit parse_split(std::string_view source, SplitName name) {
    if (!is_valid_utf8(source)) throw DecodeError("input is not valid UTF-8");

    std::vector<LabeledExample> examples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < source.size()) {
        auto end = source.find('\n', pos);
        if (end == std::string_view::npos) end = source.size();
        std::string_view line = source.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        if (trim(line).empty()) continue;

        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
        if (tab2 == std::string_view::npos) {
            throw FormatError(line_no, "expected 3 tab-separated columns");
        }
        const auto id = parse_integer(line.substr(0, tab1));
        if (!id || *id < 0) throw FormatError(line_no, "index is not a non-negative integer");
        const auto label = parse_integer(line.substr(tab1 + 1, tab2 - tab1 - 1));
        if (!label) throw FormatError(line_no, "label is not an integer");
        if (*label != 0 && *label != 1) {
            throw FormatError(line_no, "label " + std::to_string(*label) + " is not in {0,1}");
        }
        std::string_view text = line.substr(tab2 + 1);
        if (trim(text).empty()) throw FormatError(line_no, "tweet text is empty");
        examples.push_back({*id, std::string(text), label_from_int(*label)});
    }
    if (examples.empty()) throw EmptyDataset("split '" + to_string(name) + "' has no data rows");
    return DatasetSplit(name, std::move(examples));
}

DatasetSplit parse_split(std::istream& source, SplitName name) {
    std::string bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
    return parse_split(std::string_view(bytes), name);
}

DatasetSplit load_split(const std::string& path, SplitName name) {
    return parse_split(std::string_view(read_file(path)), name);
}

std::string to_tsv(const DatasetSplit& split) {
    std::string out(kHeader);
    out.push_back('\n');
    for (const auto& e : split.examples()) {
        out += std::to_string(e.id);
        out.push_back('\t');
        out += std::to_string(to_int(e.label));
        out.push_back('\t');
        out += e.text;
        out.push_back('\n');
    }
    return out;
}

CountProfile canonical_train_profile() { return {3834, 1911, 1923}; }
CountProfile canonical_test_profile() { return {784, 311, 473}; }

std::string ValidationReport::summary() const {
    if (passed()) return "ok";
    std::ostringstream ss;
    if (!duplicate_ids.empty()) ss << duplicate_ids.size() << " duplicate id(s); ";
    if (!empty_texts.empty()) ss << empty_texts.size() << " empty text(s); ";
    for (const auto& m : count_mismatches) {
        ss << m.field << " expected " << m.expected << " got " << m.actual << "; ";
    }
    auto s = ss.str();
    return s.substr(0, s.size() - 2);
}

ValidationReport validate_split(const DatasetSplit& split, const std::optional<CountProfile>& expected) {
    ValidationReport report;
    std::set<std::int64_t> seen;
    std::set<std::int64_t> reported;
    for (const auto& e : split.examples()) {
        if (!seen.insert(e.id).second && reported.insert(e.id).second) {
            report.duplicate_ids.push_back(e.id);
        }
        if (trim(e.text).empty()) report.empty_texts.push_back(e.id);
    }
    if (expected) {
        auto check = [&](const char* field, std::size_t want, std::size_t got) {
            if (want != got) report.count_mismatches.push_back({field, want, got});
        };
        check("total", expected->total, split.size());
        check("ironic", expected->ironic, split.count(Label::ironic));
        check("non_ironic", expected->non_ironic, split.count(Label::non_ironic));
    }
    return report;
}

DatasetSplit subsample(const DatasetSplit& split, std::size_t n_per_class, std::uint64_t seed) {
    if (n_per_class == 0) throw DatasetError("subsample: n_per_class must be positive");
    std::mt19937_64 engine(seed);
    std::vector<std::size_t> picked;
    for (auto& [label, positions] : positions_by_class(split)) {
        if (positions.size() < n_per_class) {
            throw InsufficientExamples("subsample: class " + std::to_string(to_int(label)) + " has " +
                                       std::to_string(positions.size()) + " examples, need " +
                                       std::to_string(n_per_class));
        }
        auto order = shuffled(std::move(positions), engine);
        picked.insert(picked.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_per_class));
    }
    return gather(split, std::move(picked));
}

std::pair<DatasetSplit, DatasetSplit> split_holdout(const DatasetSplit& split, double fraction,
                                                    std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw DatasetError("split_holdout: fraction must be in [0, 1)");
    }
    std::mt19937_64 engine(seed);
    std::vector<std::size_t> kept;
    std::vector<std::size_t> held;
    for (auto& [label, positions] : positions_by_class(split)) {
        const auto n_held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(positions.size())));
        auto order = shuffled(std::move(positions), engine);
        held.insert(held.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_held));
        kept.insert(kept.end(), order.begin() + static_cast<std::ptrdiff_t>(n_held), order.end());
    }
    auto remaining = gather(split, std::move(kept));
    auto held_out = gather(split, std::move(held));
    return {std::move(remaining), DatasetSplit(SplitName::custom, held_out.examples())};
}

std::string to_jsonl(const DatasetSplit& split) {
    std::string out;
    for (const auto& e : split.examples()) {
        nlohmann::ordered_json row;
        row["id"] = e.id;
        row["text"] = e.text;
        row["label"] = to_int(e.label);
        out += row.dump();
        out.push_back('\n');
    }
    return out;
}

DatasetSplit from_jsonl(std::string_view jsonl, SplitName name) {
    std::vector<LabeledExample> examples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        auto end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        auto line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const auto row = nlohmann::json::parse(line);
            examples.push_back({row.at("id").get<std::int64_t>(), row.at("text").get<std::string>(),
                                label_from_int(row.at("label").get<long long>())});
        } catch (const nlohmann::json::exception& ex) {
            throw FormatError(line_no, ex.what());
        } catch (const DatasetError& ex) {
            throw FormatError(line_no, ex.what());
        }
    }
    return DatasetSplit(name, std::move(examples));
}

std::string fingerprint(const DatasetSplit& split) { return sha256_hex(to_jsonl(split)); }

}  // namespace irony
