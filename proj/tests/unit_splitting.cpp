#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "argmine/splitting.hpp"

using namespace argmine;

namespace {

Corpus corpus_with_topics(int n_topics, int sentences_per_topic = 2) {
    std::vector<LabeledSentence> records;
    for (int t = 0; t < n_topics; ++t) {
        for (int s = 0; s < sentences_per_topic; ++s) {
            records.push_back({"t" + std::to_string(t) + "s" + std::to_string(s),
                               "text", "topic" + std::to_string(t), ScoreLabel{0.5}, "d", {}});
        }
    }
    return make_corpus(Task::ArgumentQuality, std::move(records));
}

}  // namespace

TEST_CASE("fold sizes follow floor val/test, remainder to train") {
    const auto ten = make_cross_topic_folds(corpus_with_topics(10), 1, {0.6, 0.2, 0.2}, 7)[0];
    CHECK(ten.train_topics.size() == 6);
    CHECK(ten.val_topics.size() == 2);
    CHECK(ten.test_topics.size() == 2);

    const auto thirty_two = make_cross_topic_folds(corpus_with_topics(32), 1, {0.6, 0.2, 0.2}, 7)[0];
    CHECK(thirty_two.train_topics.size() == 20);
    CHECK(thirty_two.val_topics.size() == 6);
    CHECK(thirty_two.test_topics.size() == 6);
}

TEST_CASE("folds are disjoint, covering, and deterministic") {
    const auto corpus = corpus_with_topics(17);
    const auto a = make_cross_topic_folds(corpus, 10, {0.6, 0.2, 0.2}, 42);
    const auto b = make_cross_topic_folds(corpus, 10, {0.6, 0.2, 0.2}, 42);
    REQUIRE(a.size() == 10);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].train_topics == b[i].train_topics);
        CHECK(a[i].val_topics == b[i].val_topics);
        CHECK(a[i].test_topics == b[i].test_topics);
        std::set<std::string> all;
        for (const auto& t : a[i].train_topics) all.insert(t);
        for (const auto& t : a[i].val_topics) {
            CHECK(all.insert(t).second);
        }
        for (const auto& t : a[i].test_topics) {
            CHECK(all.insert(t).second);
        }
        CHECK(all == corpus.topics);
    }
}

TEST_CASE("too few topics is a configuration error") {
    CHECK_THROWS(make_cross_topic_folds(corpus_with_topics(2), 1, {0.6, 0.2, 0.2}, 1));
}

TEST_CASE("assign_split routes by topic and preserves ids") {
    const auto corpus = corpus_with_topics(5, 3);
    const auto plan = make_cross_topic_folds(corpus, 1, {0.6, 0.2, 0.2}, 3)[0];
    const auto splits = assign_split(corpus, plan);
    CHECK(splits.train.size() + splits.val.size() + splits.test.size() == corpus.size());
    std::multiset<std::string> ids;
    for (const auto* c : {&splits.train, &splits.val, &splits.test}) {
        for (const auto& r : c->records) {
            ids.insert(r.id);
            const auto& topics = c == &splits.train  ? plan.train_topics
                                 : c == &splits.val ? plan.val_topics
                                                    : plan.test_topics;
            CHECK(topics.count(r.topic) == 1);
        }
    }
    std::multiset<std::string> expected;
    for (const auto& r : corpus.records) expected.insert(r.id);
    CHECK(ids == expected);
}

TEST_CASE("assign_split flags routing errors and empty splits") {
    const auto corpus = corpus_with_topics(4);
    FoldPlan plan = make_cross_topic_folds(corpus, 1, {0.5, 0.25, 0.25}, 3)[0];
    FoldPlan missing = plan;
    missing.train_topics.erase(missing.train_topics.begin());
    CHECK_THROWS(assign_split(corpus, missing));

    FoldPlan empty_test = plan;
    for (const auto& t : empty_test.test_topics) empty_test.train_topics.insert(t);
    empty_test.test_topics.clear();
    std::vector<std::string> warnings;
    const auto splits = assign_split(corpus, empty_test, &warnings);
    CHECK(splits.test.size() == 0);
    CHECK(!warnings.empty());
}

TEST_CASE("truncation length is the nearest-rank percentile") {
    CHECK(compute_truncation_length({10, 10, 10, 10}, 50.0) == 10);
    CHECK(compute_truncation_length({5, 5, 5, 100}, 95.0) == 100);
    std::vector<int> lengths;
    for (int i = 1; i <= 100; ++i) lengths.push_back(i);
    CHECK(compute_truncation_length(lengths, 95.0) == 95);
    CHECK(compute_truncation_length(lengths, 99.0) == 99);
    CHECK_THROWS(compute_truncation_length({}, 95.0));
    CHECK_THROWS(compute_truncation_length({1}, 0.0));
    CHECK_THROWS(compute_truncation_length({1}, 100.5));
}

TEST_CASE("fold plans round-trip through json") {
    const auto corpus = corpus_with_topics(8);
    const auto plans = make_cross_topic_folds(corpus, 3, {0.6, 0.2, 0.2}, 11);
    const auto path = (std::filesystem::temp_directory_path() / "plans.json").string();
    save_fold_plans(plans, path);
    const auto again = load_fold_plans(path);
    REQUIRE(again.size() == plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        CHECK(again[i].fold_index == plans[i].fold_index);
        CHECK(again[i].train_topics == plans[i].train_topics);
        CHECK(again[i].val_topics == plans[i].val_topics);
        CHECK(again[i].test_topics == plans[i].test_topics);
    }
}

TEST_CASE("property: random corpora always split without leakage") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n_topics = 3 + static_cast<int>(rng() % 40);
        const auto corpus = corpus_with_topics(n_topics, 1 + static_cast<int>(rng() % 3));
        const auto plans = make_cross_topic_folds(corpus, 2, {0.6, 0.2, 0.2}, rng());
        for (const auto& plan : plans) {
            std::set<std::string> all = plan.train_topics;
            for (const auto& t : plan.val_topics) REQUIRE(all.insert(t).second);
            for (const auto& t : plan.test_topics) REQUIRE(all.insert(t).second);
            REQUIRE(all == corpus.topics);
        }
    }
}
