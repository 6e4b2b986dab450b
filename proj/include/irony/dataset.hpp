#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irony {

/// Binary irony label. Ironic is the positive class everywhere downstream.
enum class Label : int { non_ironic = 0, ironic = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }
Label label_from_int(long long value);

enum class SplitName { train, test, custom };

std::string to_string(SplitName name);
SplitName split_name_from_string(std::string_view name);

struct LabeledExample {
    std::int64_t id = 0;
    std::string text;
    Label label = Label::non_ironic;

    friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DecodeError : public DatasetError {
public:
    using DatasetError::DatasetError;
};

/// Malformed data row. `line()` is 1-based and counts the header.
class FormatError : public DatasetError {
public:
    FormatError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyDataset : public DatasetError {
public:
    using DatasetError::DatasetError;
};

class InsufficientExamples : public DatasetError {
public:
    using DatasetError::DatasetError;
};

/// An ordered, immutable sequence of examples with derived class counts.
class DatasetSplit {
public:
    DatasetSplit() = default;
    DatasetSplit(SplitName name, std::vector<LabeledExample> examples);

    SplitName name() const noexcept { return name_; }
    const std::vector<LabeledExample>& examples() const noexcept { return examples_; }
    const std::map<Label, std::size_t>& class_counts() const noexcept { return class_counts_; }
    std::size_t count(Label label) const;
    std::size_t size() const noexcept { return examples_.size(); }
    bool empty() const noexcept { return examples_.empty(); }

    /// Same ids, labels and order with each text replaced by `texts[i]`.
    DatasetSplit with_texts(std::vector<std::string> texts) const;

    friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;

private:
    SplitName name_ = SplitName::custom;
    std::vector<LabeledExample> examples_;
    std::map<Label, std::size_t> class_counts_;
};

/// Parses the tab-separated `index<TAB>label<TAB>tweet` format with one
/// header line. Columns past the second are rejoined into the text.
DatasetSplit parse_split(std::string_view source, SplitName name);
DatasetSplit parse_split(std::istream& source, SplitName name);
DatasetSplit load_split(const std::string& path, SplitName name);

/// Writes the header + tab-separated rows accepted by `parse_split`.
std::string to_tsv(const DatasetSplit& split);

struct CountProfile {
    std::size_t total = 0;
    std::size_t ironic = 0;
    std::size_t non_ironic = 0;
};

CountProfile canonical_train_profile();
CountProfile canonical_test_profile();

struct CountMismatch {
    std::string field;  // "total", "ironic" or "non_ironic"
    std::size_t expected = 0;
    std::size_t actual = 0;
};

struct ValidationReport {
    std::vector<std::int64_t> duplicate_ids;
    std::vector<std::int64_t> empty_texts;
    std::vector<CountMismatch> count_mismatches;

    bool passed() const noexcept {
        return duplicate_ids.empty() && empty_texts.empty() && count_mismatches.empty();
    }
    std::string summary() const;
};

ValidationReport validate_split(const DatasetSplit& split,
                                const std::optional<CountProfile>& expected = std::nullopt);

/// Class-balanced sample of `2 * n_per_class` examples drawn without
/// replacement; output keeps the input's relative order.
DatasetSplit subsample(const DatasetSplit& split, std::size_t n_per_class, std::uint64_t seed);

/// Stratified hold-out: returns (remaining, held_out) where held_out takes
/// round(fraction * class size) examples from each class.
std::pair<DatasetSplit, DatasetSplit> split_holdout(const DatasetSplit& split, double fraction,
                                                    std::uint64_t seed);

/// JSON Lines, one `{"id","text","label"}` object per example.
std::string to_jsonl(const DatasetSplit& split);
DatasetSplit from_jsonl(std::string_view jsonl, SplitName name);

/// Content digest over the canonical JSON Lines serialization.
std::string fingerprint(const DatasetSplit& split);

}  // namespace irony
