#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "argmine/analysis.hpp"
#include "argmine/baselines.hpp"
#include "argmine/runner.hpp"
#include "argmine/stats/metrics.hpp"

using namespace argmine;
namespace fs = std::filesystem;

TEST_CASE("pronoun baseline respects word boundaries") {
    CHECK(baselines::pronoun_baseline("I think this is wrong") == EmotionLabel::Emotional);
    CHECK(baselines::pronoun_baseline("Taxes fund public schools") == EmotionLabel::NonEmotional);
    CHECK(baselines::pronoun_baseline("Medicine saves lives") == EmotionLabel::NonEmotional);
    CHECK(baselines::pronoun_baseline("listen to ME now") == EmotionLabel::Emotional);
}

TEST_CASE("majority baseline and its macro-f1 on the training distribution") {
    std::vector<EmotionLabel> labels;
    for (int i = 0; i < 298; ++i) labels.push_back(EmotionLabel::NonEmotional);
    for (int i = 0; i < 225; ++i) labels.push_back(EmotionLabel::Emotional);
    baselines::MajorityBaseline majority(labels);
    CHECK(majority.label() == EmotionLabel::NonEmotional);

    std::vector<int> pred(labels.size(), static_cast<int>(majority.label()));
    std::vector<int> gold;
    for (EmotionLabel l : labels) gold.push_back(static_cast<int>(l));
    CHECK(stats::macro_f1(pred, gold, 2) == doctest::Approx(0.363).epsilon(0.003));

    baselines::MajorityBaseline tie({EmotionLabel::Emotional, EmotionLabel::NonEmotional});
    CHECK(tie.label() == EmotionLabel::NonEmotional);
}

TEST_CASE("nrc lexicon loading and matching") {
    const fs::path path = fs::temp_directory_path() / "nrc.tsv";
    {
        std::ofstream out(path);
        out << "fear\tfear\t1\n";
        out << "fear\tjoy\t0\n";
        out << "table\tneutral\t1\n";
        out << "joyous\tjoy\t1\n";
    }
    const auto lexicon = baselines::load_nrc_lexicon(path.string());
    CHECK(lexicon.terms.count("fear") == 1);
    CHECK(lexicon.terms.count("table") == 0);  // neutral emotion does not qualify
    CHECK(baselines::nrc_baseline("There is fear of crime", lexicon) == EmotionLabel::Emotional);
    CHECK(baselines::nrc_baseline("FEAR wins votes", lexicon) == EmotionLabel::Emotional);
    CHECK(baselines::nrc_baseline("Nothing matches here", lexicon) == EmotionLabel::NonEmotional);
    CHECK_THROWS(baselines::load_nrc_lexicon("/no/such/lexicon.tsv"));
}

TEST_CASE("human performance against majority-of-others") {
    stats::AgreementTable unanimous;
    unanimous.labels = {{1, 1, 1}, {0, 0, 0}, {1, 1, 1}, {0, 0, 0}};
    const auto perfect = baselines::human_performance(unanimous);
    CHECK(perfect.mean_macro_f1 == doctest::Approx(1.0));
    CHECK(perfect.std_macro_f1 == doctest::Approx(0.0));

    // one annotator always disagrees on a balanced binary set; with three
    // annotators the dissenter would make every item a tie for the others, so
    // five annotators are needed for each row to have a majority-of-others
    stats::AgreementTable dissent;
    dissent.labels = {{1, 1, 1, 1, 0}, {0, 0, 0, 0, 1}, {1, 1, 1, 1, 0}, {0, 0, 0, 0, 1}};
    const auto r = baselines::human_performance(dissent);
    REQUIRE(r.per_annotator.size() == 5);
    for (int a = 0; a < 4; ++a) CHECK(r.per_annotator[a] == doctest::Approx(1.0));
    CHECK(r.per_annotator[4] == doctest::Approx(0.0));

    stats::AgreementTable two;
    two.labels = {{1, 0}, {0, 1}};
    CHECK_THROWS(baselines::human_performance(two));
}

namespace {

Corpus shifted_corpus(std::uint64_t seed, double shift, int n_per_group = 200) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<LabeledSentence> records;
    auto clamp01 = [](double v) { return std::min(0.999, std::max(0.001, v)); };
    for (int i = 0; i < n_per_group; ++i) {
        records.push_back({"e" + std::to_string(i), "argument with dread inside",
                           "t" + std::to_string(i % 4), ScoreLabel{clamp01(0.5 + shift + noise(rng))},
                           "syn", {}});
        records.push_back({"n" + std::to_string(i), "argument with facts inside",
                           "t" + std::to_string(i % 4), ScoreLabel{clamp01(0.5 + noise(rng))},
                           "syn", {}});
    }
    return make_corpus(Task::ArgumentQuality, std::move(records));
}

}  // namespace

TEST_CASE("emotion analysis pipeline flags a planted shift") {
    baselines::Lexicon lexicon;
    lexicon.terms.insert("dread");
    const auto scorer = analysis::scorer_from_labeler(
        [&](const std::string& text) { return baselines::nrc_baseline(text, lexicon); });

    const auto corpus = shifted_corpus(1, 0.2);
    const auto predictions = analysis::predict_emotions(corpus, scorer);
    for (const auto& p : predictions) CHECK(p.confidence >= 0.5);

    const auto grouped = analysis::group_quality_by_emotion(corpus, predictions, "nrc");
    CHECK(grouped.emotional.count == 200);
    CHECK(grouped.non_emotional.count == 200);
    CHECK(grouped.emotional.count + grouped.non_emotional.count ==
          static_cast<int>(corpus.size()));
    CHECK(grouped.emotional.mean - grouped.non_emotional.mean == doctest::Approx(0.2).epsilon(0.1));

    const auto report = analysis::significance_report({grouped});
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].defined);
    CHECK(report.rows[0].p < 0.01);
    CHECK(report.rows[0].significant);
}

TEST_CASE("identical groups are not significant; degenerate groups marked NA") {
    analysis::GroupedQuality same;
    same.dataset = "d";
    same.model_name = "m";
    same.emotional.scores = {0.4, 0.5, 0.6};
    same.emotional.count = 3;
    same.non_emotional.scores = {0.4, 0.5, 0.6};
    same.non_emotional.count = 3;
    auto report = analysis::significance_report({same});
    CHECK(report.rows[0].p == doctest::Approx(1.0));
    CHECK_FALSE(report.rows[0].significant);

    analysis::GroupedQuality degenerate = same;
    degenerate.non_emotional.scores = {0.4};
    degenerate.non_emotional.count = 1;
    report = analysis::significance_report({degenerate});
    CHECK_FALSE(report.rows[0].defined);
}

TEST_CASE("grouping requires a prediction for every id") {
    const auto corpus = shifted_corpus(2, 0.0, 3);
    std::vector<analysis::EmotionPrediction> partial{{"e0", EmotionLabel::Emotional, 1.0}};
    CHECK_THROWS(analysis::group_quality_by_emotion(corpus, partial));
}

TEST_CASE("experiment config parses, validates, and hashes stably") {
    const std::string json = R"({
        "kind": "emotion_analysis",
        "datasets": [{"name": "syn", "path": "syn.jsonl", "task": "argument_quality"}],
        "seeds": [1, 2, 3],
        "out": "runs",
        "classifier": {"kind": "pronoun"}
    })";
    const auto config = runner::parse_experiment_config(json);
    CHECK(config.kind == runner::ExperimentKind::EmotionAnalysis);
    CHECK(config.seeds == std::vector<std::uint64_t>{1, 2, 3});
    const auto h1 = runner::config_hash(config);
    const auto h2 = runner::config_hash(runner::parse_experiment_config(json));
    CHECK(h1 == h2);
    CHECK(h1.size() == 16);

    CHECK_THROWS(runner::parse_experiment_config("{not json"));
    CHECK_THROWS(runner::parse_experiment_config(R"({"kind":"cross_corpus","datasets":[]})"));
    CHECK_THROWS(runner::parse_experiment_config(
        R"({"kind":"nope","datasets":[{"name":"a","path":"p"}]})"));
}

TEST_CASE("aggregate_seeds matches the documented example") {
    const auto r = runner::aggregate_seeds({47.0, 48.0, 47.9});
    CHECK(r.mean == doctest::Approx(47.6333).epsilon(1e-4));
    CHECK(r.std == doctest::Approx(0.5508).epsilon(1e-3));
    CHECK_THROWS(runner::aggregate_seeds({}));
}

TEST_CASE("cache directory honors the environment variable") {
    setenv("ARGMINE_CACHE_DIR", "/tmp/argmine-cache-test", 1);
    CHECK(runner::cache_directory() == "/tmp/argmine-cache-test");
    unsetenv("ARGMINE_CACHE_DIR");
    CHECK(runner::cache_directory() == ".argmine-cache");
}

TEST_CASE("run_experiment emotion_analysis end to end writes csvs") {
    const fs::path dir = fs::temp_directory_path() / "argmine_runner_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto corpus = shifted_corpus(3, 0.2, 50);
    save_corpus(corpus, (dir / "syn.jsonl").string());

    runner::ExperimentConfig config;
    config.kind = runner::ExperimentKind::EmotionAnalysis;
    config.datasets = {{"syn", (dir / "syn.jsonl").string(), "", Task::ArgumentQuality}};
    config.out_dir = (dir / "runs").string();
    config.classifier.kind = "pronoun";
    config.validate();

    const auto results = runner::run_experiment(config);
    REQUIRE(!results.empty());
    const fs::path run_dir =
        fs::path(config.out_dir) / ("emotion_analysis-" + runner::config_hash(config));
    CHECK(fs::exists(run_dir / "grouped_quality.csv"));
    CHECK(fs::exists(run_dir / "significance.csv"));
    CHECK(fs::exists(run_dir / "results.csv"));
    CHECK(fs::exists(run_dir / "per_seed.csv"));
}
