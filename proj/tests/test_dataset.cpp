#include "irony/dataset.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace irony;

namespace {

const std::string kHeader = "Tweet index\tLabel\tTweet text\n";

DatasetSplit make_split(std::size_t ironic, std::size_t literal, std::uint64_t seed = 1) {
    std::vector<LabeledExample> rows;
    std::mt19937_64 rng(seed);
    std::int64_t id = 0;
    for (std::size_t i = 0; i < ironic + literal; ++i) {
        rows.push_back({id++, "tweet number " + std::to_string(rng() % 100000),
                        i < ironic ? Label::ironic : Label::non_ironic});
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    return DatasetSplit(SplitName::custom, rows);
}

}  // namespace

TEST_CASE("parse_split reads a single data row") {
    const auto split = parse_split(kHeader + "1\t1\tso excited for monday\n", SplitName::train);
    REQUIRE(split.size() == 1);
    CHECK(split.examples()[0].id == 1);
    CHECK(split.examples()[0].label == Label::ironic);
    CHECK(split.examples()[0].text == "so excited for monday");
    CHECK(split.name() == SplitName::train);
    CHECK(split.count(Label::ironic) == 1);
    CHECK(split.count(Label::non_ironic) == 0);
}

TEST_CASE("parse_split rejects a non-binary label with its line number") {
    try {
        parse_split(kHeader + "2\t5\ttext\n", SplitName::train);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("parse_split error cases") {
    CHECK_THROWS_AS(parse_split(kHeader, SplitName::train), EmptyDataset);
    CHECK_THROWS_AS(parse_split(kHeader + "\n\n", SplitName::train), EmptyDataset);
    CHECK_THROWS_AS(parse_split(kHeader + "1\t1\n", SplitName::train), FormatError);
    CHECK_THROWS_AS(parse_split(kHeader + "1\tx\ttext\n", SplitName::train), FormatError);
    CHECK_THROWS_AS(parse_split(kHeader + "1\t1.5\ttext\n", SplitName::train), FormatError);
    CHECK_THROWS_AS(parse_split(kHeader + "a\t1\ttext\n", SplitName::train), FormatError);
    CHECK_THROWS_AS(parse_split(kHeader + "1\t1\t   \n", SplitName::train), FormatError);
    CHECK_THROWS_AS(parse_split(kHeader + "1\t1\tbad \xff byte\n", SplitName::train), DecodeError);
    try {
        parse_split(kHeader + "1\t0\tfine\n2\t1\tfine\n3\t2\tbad\n", SplitName::train);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("parse_split keeps tabs inside the text and strips CRLF") {
    const auto split = parse_split(kHeader + "3\t0\tleft\tright\r\n4\t1\t😒 emoji kept\r\n", SplitName::test);
    REQUIRE(split.size() == 2);
    CHECK(split.examples()[0].text == "left\tright");
    CHECK(split.examples()[1].text == "😒 emoji kept");
}

TEST_CASE("parse_split preserves file order and class counts sum to size") {
    std::string text = kHeader;
    for (int i = 0; i < 50; ++i) text += std::to_string(100 - i) + "\t" + std::to_string(i % 3 == 0) + "\trow " + std::to_string(i) + "\n";
    std::istringstream in(text);
    const auto split = parse_split(in, SplitName::train);
    REQUIRE(split.size() == 50);
    for (int i = 0; i < 50; ++i) {
        CHECK(split.examples()[i].id == 100 - i);
        CHECK(split.examples()[i].text == "row " + std::to_string(i));
    }
    std::size_t sum = 0;
    for (const auto& [_, n] : split.class_counts()) sum += n;
    CHECK(sum == split.size());
}

TEST_CASE("tsv and jsonl round trips reproduce the split") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto split = make_split(7 + seed, 5 + 2 * seed, seed);
        auto rows = split.examples();
        rows[0].text = "with\ttab and \"quotes\" and ünïcödé 🙃";
        split = DatasetSplit(SplitName::train, rows);
        CHECK(parse_split(to_tsv(split), SplitName::train) == split);
        CHECK(from_jsonl(to_jsonl(split), SplitName::train) == split);
        CHECK(fingerprint(from_jsonl(to_jsonl(split), SplitName::train)) == fingerprint(split));
    }
}

TEST_CASE("jsonl uses the id, text, label keys") {
    const DatasetSplit split(SplitName::train, {{4, "hi", Label::ironic}});
    CHECK(to_jsonl(split) == "{\"id\":4,\"text\":\"hi\",\"label\":1}\n");
}

TEST_CASE("validate_split reports duplicates, empty texts and count mismatches") {
    const DatasetSplit dup(SplitName::custom, {{7, "a", Label::ironic}, {7, "b", Label::non_ironic}});
    auto report = validate_split(dup);
    CHECK_FALSE(report.passed());
    CHECK(report.duplicate_ids == std::vector<std::int64_t>{7});

    const DatasetSplit blank(SplitName::custom, {{1, "  ", Label::ironic}});
    CHECK(validate_split(blank).empty_texts == std::vector<std::int64_t>{1});

    const auto test_like = make_split(311, 473);
    CHECK(validate_split(test_like, canonical_test_profile()).passed());
    auto profile = canonical_test_profile();
    profile.total = 785;
    report = validate_split(test_like, profile);
    REQUIRE(report.count_mismatches.size() == 1);
    CHECK(report.count_mismatches[0].field == "total");
    CHECK(report.count_mismatches[0].expected == 785);
    CHECK(report.count_mismatches[0].actual == 784);
}

TEST_CASE("canonical profiles match the published counts") {
    CHECK(canonical_train_profile().total == 3834);
    CHECK(canonical_train_profile().ironic == 1911);
    CHECK(canonical_train_profile().non_ironic == 1923);
    CHECK(canonical_test_profile().total == 784);
    CHECK(canonical_test_profile().ironic == 311);
    CHECK(canonical_test_profile().non_ironic == 473);
}

TEST_CASE("subsample is balanced, deterministic and drawn without replacement") {
    const auto train = make_split(1911, 1923);
    const auto a = subsample(train, 100, 0);
    const auto b = subsample(train, 100, 0);
    CHECK(a.size() == 200);
    CHECK(a.count(Label::ironic) == 100);
    CHECK(a.count(Label::non_ironic) == 100);
    CHECK(to_jsonl(a) == to_jsonl(b));
    CHECK(to_jsonl(subsample(train, 100, 1)) != to_jsonl(a));

    std::set<std::int64_t> ids;
    for (const auto& e : a.examples()) ids.insert(e.id);
    CHECK(ids.size() == a.size());
    for (const auto& e : a.examples()) {
        const auto it = std::find_if(train.examples().begin(), train.examples().end(),
                                     [&](const LabeledExample& x) { return x.id == e.id; });
        REQUIRE(it != train.examples().end());
        CHECK(*it == e);
    }
}

TEST_CASE("subsample fails when a class is short") {
    const auto test = make_split(311, 473);
    CHECK_THROWS_AS(subsample(test, 400, 0), InsufficientExamples);
    CHECK(subsample(test, 311, 0).size() == 622);
}

TEST_CASE("split_holdout is stratified and partitions the split") {
    const auto train = make_split(100, 120);
    const auto [rest, dev] = split_holdout(train, 0.1, 3);
    CHECK(dev.count(Label::ironic) == 10);
    CHECK(dev.count(Label::non_ironic) == 12);
    CHECK(rest.size() + dev.size() == train.size());
    std::set<std::int64_t> ids;
    for (const auto& e : rest.examples()) ids.insert(e.id);
    for (const auto& e : dev.examples()) CHECK(ids.insert(e.id).second);
    CHECK(dev.name() == SplitName::custom);
}

TEST_CASE("with_texts keeps ids, labels and order") {
    const auto split = make_split(3, 3);
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < split.size(); ++i) texts.push_back("new " + std::to_string(i));
    const auto replaced = split.with_texts(texts);
    for (std::size_t i = 0; i < split.size(); ++i) {
        CHECK(replaced.examples()[i].id == split.examples()[i].id);
        CHECK(replaced.examples()[i].label == split.examples()[i].label);
        CHECK(replaced.examples()[i].text == texts[i]);
    }
    CHECK_THROWS(split.with_texts({"too few"}));
}
