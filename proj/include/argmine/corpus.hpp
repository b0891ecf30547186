#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace argmine {

enum class Task {
    ArgumentQuality,        // regression, score in [0,1]
    ArgumentIdentification, // binary argumentative / non-argumentative
    EvidenceDetection,      // regression, score in [0,1]
    EmotionBinary,          // binary emotional / non-emotional
};

std::string to_string(Task task);
Task task_from_string(const std::string& name);
bool is_regression_task(Task task);

enum class ArgClass { Argumentative = 0, NonArgumentative = 1 };
enum class EmotionLabel { Emotional = 0, NonEmotional = 1 };

std::string to_string(ArgClass c);
std::string to_string(EmotionLabel c);
EmotionLabel emotion_label_from_string(const std::string& name);

struct ScoreLabel {
    double value = 0.0;  // in [0, 1]
};

using Label = std::variant<ScoreLabel, ArgClass, EmotionLabel>;

/// One text unit with its topic, task-typed label and dataset tag.
struct LabeledSentence {
    std::string id;
    std::string text;
    std::string topic;
    Label label;
    std::string dataset;
    std::vector<EmotionLabel> annotations;  // per-annotator labels, may be empty
};

struct DatasetManifest {
    std::string name;
    int expected_sentence_count = 0;
    int expected_topic_count = 0;
    std::string label_kind;  // "score" | "class" | "emotion"
    std::string source_note;
};

/// Validated collection of sentences sharing one task type.
struct Corpus {
    Task task = Task::ArgumentQuality;
    std::vector<LabeledSentence> records;
    std::set<std::string> topics;

    std::size_t size() const { return records.size(); }
};

// Validates label variants against the task, uniqueness of ids and rebuilds
// the topic inventory. Throws std::invalid_argument on violations.
Corpus make_corpus(Task task, std::vector<LabeledSentence> records);

// Reads one JSON object per line: {"id","text","topic","label"[,"annotations"]}.
// Count mismatches against the manifest are warnings by default, errors in
// strict mode. Parse errors carry the 1-based line number.
Corpus load_corpus(const std::string& path, const DatasetManifest& manifest, Task task,
                   bool strict = false, std::vector<std::string>* warnings = nullptr);

// Canonical JSONL writer; load_corpus(save_corpus(c)) round-trips.
void save_corpus(const Corpus& corpus, const std::string& path);

// Manifest files are `key = value` lines (name, expected_sentence_count,
// expected_topic_count, label_kind, source_note).
DatasetManifest load_manifest(const std::string& path);

/// Declarative source-schema -> class -> binary emotion maps.
class LabelMapRegistry {
  public:
    void register_map(const std::string& schema, std::map<std::string, EmotionLabel> classes);

    // JSON file: {"schema": {"class": "emotional" | "non-emotional", ...}, ...}
    void load_file(const std::string& path);
    void load_directory(const std::string& dir);

    bool has_schema(const std::string& schema) const;
    std::vector<std::string> schemas() const;

    // Total on registered schemas; unknown class or schema throws.
    EmotionLabel unify(const std::string& raw_label, const std::string& schema) const;

  private:
    std::map<std::string, std::map<std::string, EmotionLabel>> maps_;
};

struct MajorityFilterResult {
    std::vector<LabeledSentence> kept;  // label replaced by the majority annotation
    std::vector<std::string> dropped_ids;
    int kept_emotional = 0;
    int kept_non_emotional = 0;
};

// Keeps a record iff its annotations have a strict majority; the kept label is
// the modal annotation. Records without annotations are an error.
MajorityFilterResult majority_filter(const std::vector<LabeledSentence>& records);

}  // namespace argmine
