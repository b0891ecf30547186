#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "argmine/corpus.hpp"

using namespace argmine;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load_corpus parses well-formed jsonl") {
    const auto path = temp_file(
        "corpus_ok.jsonl",
        R"({"id":"a","text":"one","topic":"t1","label":0.4})"
        "\n"
        R"({"id":"b","text":"two","topic":"t2","label":0.9})"
        "\n");
    DatasetManifest manifest;
    const auto corpus = load_corpus(path.string(), manifest, Task::ArgumentQuality);
    CHECK(corpus.size() == 2);
    CHECK(corpus.topics.size() == 2);
    CHECK(std::get<ScoreLabel>(corpus.records[0].label).value == doctest::Approx(0.4));
}

TEST_CASE("load_corpus rejects out-of-range scores with line numbers") {
    const auto path = temp_file("corpus_bad.jsonl",
                                R"({"id":"a","text":"one","topic":"t1","label":1.3})"
                                "\n");
    DatasetManifest manifest;
    try {
        load_corpus(path.string(), manifest, Task::ArgumentQuality);
        FAIL("expected validation error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
}

TEST_CASE("manifest mismatches warn by default and throw in strict mode") {
    const auto path = temp_file("corpus_counts.jsonl",
                                R"({"id":"a","text":"one","topic":"t1","label":0.4})"
                                "\n");
    DatasetManifest manifest;
    manifest.name = "demo";
    manifest.expected_sentence_count = 2;
    manifest.expected_topic_count = 1;
    std::vector<std::string> warnings;
    const auto corpus = load_corpus(path.string(), manifest, Task::ArgumentQuality, false,
                                    &warnings);
    CHECK(corpus.size() == 1);
    CHECK(!warnings.empty());
    CHECK_THROWS(load_corpus(path.string(), manifest, Task::ArgumentQuality, true));
}

TEST_CASE("corpus round-trips through save and load") {
    std::vector<LabeledSentence> records;
    records.push_back({"a", "some text", "topic one", ScoreLabel{0.25}, "demo", {}});
    records.push_back({"b",
                       "other text",
                       "topic two",
                       ScoreLabel{0.75},
                       "demo",
                       {EmotionLabel::Emotional, EmotionLabel::NonEmotional}});
    const auto corpus = make_corpus(Task::ArgumentQuality, records);
    const fs::path path = fs::temp_directory_path() / "roundtrip.jsonl";
    save_corpus(corpus, path.string());
    DatasetManifest manifest;
    const auto again = load_corpus(path.string(), manifest, Task::ArgumentQuality);
    REQUIRE(again.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(again.records[i].id == corpus.records[i].id);
        CHECK(again.records[i].text == corpus.records[i].text);
        CHECK(again.records[i].topic == corpus.records[i].topic);
        CHECK(std::get<ScoreLabel>(again.records[i].label).value ==
              doctest::Approx(std::get<ScoreLabel>(corpus.records[i].label).value));
        CHECK(again.records[i].annotations == corpus.records[i].annotations);
    }
}

TEST_CASE("make_corpus enforces invariants") {
    std::vector<LabeledSentence> dup;
    dup.push_back({"a", "x", "t", ScoreLabel{0.5}, "d", {}});
    dup.push_back({"a", "y", "t", ScoreLabel{0.5}, "d", {}});
    CHECK_THROWS(make_corpus(Task::ArgumentQuality, dup));

    std::vector<LabeledSentence> wrong_variant;
    wrong_variant.push_back({"a", "x", "t", EmotionLabel::Emotional, "d", {}});
    CHECK_THROWS(make_corpus(Task::ArgumentQuality, wrong_variant));

    std::vector<LabeledSentence> empty_text;
    empty_text.push_back({"a", "", "t", ScoreLabel{0.5}, "d", {}});
    CHECK_THROWS(make_corpus(Task::ArgumentQuality, empty_text));
}

TEST_CASE("label map registry unifies emotion schemas") {
    LabelMapRegistry registry;
    registry.load_directory(std::string(ARGMINE_SOURCE_DIR) + "/configs/label_maps");
    CHECK(registry.has_schema("SemEval-2018"));
    CHECK(registry.unify("joy", "SemEval-2018") == EmotionLabel::Emotional);
    CHECK(registry.unify("neutral", "SemEval-2019") == EmotionLabel::NonEmotional);
    CHECK(registry.unify("others", "SemEval-2019") == EmotionLabel::NonEmotional);
    CHECK(registry.schemas().size() == 7);
    CHECK_THROWS(registry.unify("confused", "SemEval-2018"));
    CHECK_THROWS(registry.unify("joy", "NoSuchSchema"));
}

TEST_CASE("unification is total over a synthetic corpus: counts preserved") {
    LabelMapRegistry registry;
    registry.register_map("toy", {{"joyful", EmotionLabel::Emotional},
                                  {"flat", EmotionLabel::NonEmotional}});
    int n = 0;
    for (int i = 0; i < 1250; ++i) {
        const std::string raw = i % 3 == 0 ? "flat" : "joyful";
        (void)registry.unify(raw, "toy");
        ++n;
    }
    CHECK(n == 1250);
}

TEST_CASE("majority filter keeps strict majorities only") {
    std::vector<LabeledSentence> records;
    LabeledSentence kept{"k", "x", "t", EmotionLabel::NonEmotional, "d", {}};
    kept.annotations = {EmotionLabel::Emotional, EmotionLabel::Emotional, EmotionLabel::Emotional,
                        EmotionLabel::Emotional, EmotionLabel::NonEmotional,
                        EmotionLabel::NonEmotional};
    LabeledSentence tied{"t", "y", "t", EmotionLabel::NonEmotional, "d", {}};
    tied.annotations = {EmotionLabel::Emotional, EmotionLabel::Emotional, EmotionLabel::Emotional,
                        EmotionLabel::NonEmotional, EmotionLabel::NonEmotional,
                        EmotionLabel::NonEmotional};
    records.push_back(kept);
    records.push_back(tied);
    const auto result = majority_filter(records);
    REQUIRE(result.kept.size() == 1);
    CHECK(result.kept[0].id == "k");
    CHECK(std::get<EmotionLabel>(result.kept[0].label) == EmotionLabel::Emotional);
    CHECK(result.dropped_ids == std::vector<std::string>{"t"});
    CHECK(result.kept.size() + result.dropped_ids.size() == records.size());

    std::vector<LabeledSentence> missing{{"m", "z", "t", EmotionLabel::Emotional, "d", {}}};
    CHECK_THROWS(majority_filter(missing));
}

TEST_CASE("majority filter at corpus scale: 600 records, 77 ties") {
    std::vector<LabeledSentence> records;
    auto add = [&](int count, std::vector<EmotionLabel> anns) {
        for (int i = 0; i < count; ++i) {
            LabeledSentence r{"r" + std::to_string(records.size()), "x", "t",
                              EmotionLabel::NonEmotional, "d", {}};
            r.annotations = anns;
            records.push_back(std::move(r));
        }
    };
    using E = EmotionLabel;
    add(225, {E::Emotional, E::Emotional, E::Emotional, E::Emotional, E::NonEmotional,
              E::NonEmotional});
    add(298, {E::NonEmotional, E::NonEmotional, E::NonEmotional, E::NonEmotional, E::Emotional,
              E::Emotional});
    add(77, {E::Emotional, E::Emotional, E::Emotional, E::NonEmotional, E::NonEmotional,
             E::NonEmotional});
    const auto result = majority_filter(records);
    CHECK(result.kept.size() == 523);
    CHECK(result.dropped_ids.size() == 77);
    CHECK(result.kept_emotional == 225);
    CHECK(result.kept_non_emotional == 298);
}

TEST_CASE("manifest files parse key-value lines") {
    const auto path = temp_file("manifest.txt",
                                "name = IBM-Rank-30k\n"
                                "expected_sentence_count = 30497\n"
                                "expected_topic_count = 71\n"
                                "label_kind = score\n"
                                "source_note = demo\n");
    const auto manifest = load_manifest(path.string());
    CHECK(manifest.name == "IBM-Rank-30k");
    CHECK(manifest.expected_sentence_count == 30497);
    CHECK(manifest.expected_topic_count == 71);
    CHECK(manifest.label_kind == "score");
}
