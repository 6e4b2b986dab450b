// Generates a synthetic stand-in for the SemEval-2018 Task 3A files with the
// same layout and class counts. Ironic rows pair upbeat wording with a grim
// situation and usually carry a sarcasm marker; literal rows keep sentiment
// and situation aligned.

#include "irony/dataset.hpp"
#include "irony/util.hpp"

#include <CLI11.hpp>

#include <array>
#include <iostream>
#include <random>
#include <string>
#include <vector>

namespace {

using irony::bounded_draw;

constexpr std::array kPositiveVerbs = {"love", "adore", "really enjoy", "can't wait for", "am so thankful for",
                                       "absolutely love", "appreciate", "am thrilled about"};
constexpr std::array kNegativeVerbs = {"hate", "can't stand", "dread", "am so tired of", "despise",
                                       "am fed up with", "really dislike", "am annoyed by"};
constexpr std::array kGrimSituations = {
    "being stuck in traffic for two hours", "waking up at 5am for physio", "my phone dying mid call",
    "working a double shift on my birthday", "the bus leaving right as I arrive", "getting rained on without an umbrella",
    "spending the weekend doing taxes", "my flight getting delayed again", "the wifi going down during the exam",
    "stepping on lego in the dark", "burning dinner for the third time", "waiting on hold for an hour",
    "a flat tyre on the motorway", "the printer jamming before the deadline", "being sick on my day off",
    "cold coffee on a monday morning", "losing my keys twice today", "a group project where nobody replies",
    "the heating breaking in december", "my alarm not going off"};
constexpr std::array kHappySituations = {
    "spending the weekend with my family", "a long walk on the beach", "fresh bread from the bakery",
    "seeing my best friend after months", "the first snow of the year", "finishing a good book",
    "a sunny afternoon in the park", "getting the job offer today", "my team winning the final",
    "homemade pancakes on sunday", "a quiet evening with tea", "concert tickets for friday",
    "the puppy learning to sit", "a surprise call from grandma", "passing my driving test",
    "summer holidays starting tomorrow", "a warm fire after hiking", "my sister's wedding this weekend",
    "the new cafe around the corner", "a lazy morning in bed"};
constexpr std::array kIronyCues = {"#not", "#sarcasm", "yeah right", "just great", "oh joy", "#blessed",
                                   "what a treat", "fantastic..."};
constexpr std::array kOpeners = {"", "", "", "Honestly, ", "Well, ", "So ", "@user ", "Today: ", "Me: "};
constexpr std::array kClosers = {"", "", "", " lol", " 😒", " 😂", " http://t.co/x1", " #monday", " !!", " :)"};

template <typename Array>
const char* pick(std::mt19937_64& rng, const Array& items) {
    return items[bounded_draw(rng, items.size())];
}

bool chance(std::mt19937_64& rng, unsigned percent) { return bounded_draw(rng, 100) < percent; }

std::string make_tweet(std::mt19937_64& rng, bool ironic) {
    std::string text = pick(rng, kOpeners);
    text += "I ";
    if (ironic) {
        const bool flipped = chance(rng, 15);  // occasional "hate" + pleasant thing
        text += flipped ? pick(rng, kNegativeVerbs) : pick(rng, kPositiveVerbs);
        text += " ";
        text += flipped ? pick(rng, kHappySituations) : pick(rng, kGrimSituations);
        if (chance(rng, 70)) {
            text += " ";
            text += pick(rng, kIronyCues);
        }
    } else {
        const bool positive = chance(rng, 50);
        text += positive ? pick(rng, kPositiveVerbs) : pick(rng, kNegativeVerbs);
        text += " ";
        text += positive ? pick(rng, kHappySituations) : pick(rng, kGrimSituations);
        if (chance(rng, 8)) {
            text += " ";
            text += pick(rng, kIronyCues);
        }
    }
    text += pick(rng, kClosers);
    return text;
}

irony::DatasetSplit generate(std::size_t ironic, std::size_t literal, std::uint64_t seed, irony::SplitName name) {
    std::mt19937_64 rng(seed);
    std::vector<bool> labels(ironic, true);
    labels.insert(labels.end(), literal, false);
    for (std::size_t i = labels.size(); i > 1; --i) {
        const auto j = bounded_draw(rng, i);
        const bool tmp = labels[i - 1];
        labels[i - 1] = labels[j];
        labels[j] = tmp;
    }
    std::vector<irony::LabeledExample> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        rows.push_back({static_cast<std::int64_t>(i + 1), make_tweet(rng, labels[i]),
                        labels[i] ? irony::Label::ironic : irony::Label::non_ironic});
    }
    return irony::DatasetSplit(name, std::move(rows));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic irony corpus in the SemEval-2018 Task 3A layout"};
    std::string out_dir = "data/synthetic";
    std::uint64_t seed = 2018;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    const auto train_profile = irony::canonical_train_profile();
    const auto test_profile = irony::canonical_test_profile();
    const auto train = generate(train_profile.ironic, train_profile.non_ironic, seed, irony::SplitName::train);
    const auto test = generate(test_profile.ironic, test_profile.non_ironic, seed + 1, irony::SplitName::test);
    irony::write_file(out_dir + "/train.txt", irony::to_tsv(train));
    irony::write_file(out_dir + "/test.txt", irony::to_tsv(test));
    std::cout << "wrote " << train.size() << " train and " << test.size() << " test rows to " << out_dir << "\n";
    return 0;
}
