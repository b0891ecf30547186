#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/stats/metrics.hpp"

namespace argmine::runner {

enum class ExperimentKind {
    CrossCorpus,
    LeaveOneOut,
    ZeroShot,
    MultiTask,
    EmotionDetect,
    EmotionAnalysis,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct DatasetSpec {
    std::string name;
    std::string path;
    std::string manifest_path;  // optional
    Task task = Task::ArgumentQuality;
};

struct EncoderSpec {
    int hidden_size = 32;
    int num_layers = 4;
    int vocab_size = 1024;
    int max_positions = 128;
    std::uint64_t seed = 7;
};

struct ClassifierSpec {
    std::string kind = "pronoun";  // "pronoun" | "nrc" | "majority" | "checkpoint"
    std::string lexicon_path;
    std::string checkpoint_path;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::CrossCorpus;
    std::vector<DatasetSpec> datasets;
    std::string preset = "generalization";
    std::vector<std::uint64_t> seeds{1};
    std::string out_dir = "runs";
    EncoderSpec encoder;
    std::array<double, 3> split_ratios{0.7, 0.1, 0.2};
    std::uint64_t split_seed = 13;
    bool strict_manifests = false;
    std::map<std::string, double> training_overrides;  // TrainConfig field -> value
    ClassifierSpec classifier;                          // emotion_analysis only
    std::string lexicon_path;                           // emotion_detect NRC baseline

    void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Stable 64-bit content hash of the canonical config serialization; used for
// content-addressed output paths.
std::string config_hash(const ExperimentConfig& config);

struct ExperimentResult {
    ExperimentKind kind;
    std::string train_source;
    std::string eval_target;
    std::string task;
    std::string metric;
    std::vector<double> per_seed;
    double mean = 0.0;
    double std = 0.0;
};

// Executes the configured protocol end-to-end and persists logs and result
// CSVs under out_dir/<kind>-<hash>/. Returns the aggregated results.
std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config);

stats::MeanStd aggregate_seeds(const std::vector<double>& per_seed_values);

struct LeaveOneOutSizeRow {
    std::string leave_out;
    long computed = 0;                 // sum of the remaining corpora
    std::optional<long> published;     // reference table value, when known
    std::string note;                  // set when computed != published
};

// Union training-set sizes for each leave-one-out configuration, checked
// against the published reference table; divergences carry a note.
std::vector<LeaveOneOutSizeRow> leave_one_out_size_report(
    const std::vector<std::pair<std::string, long>>& dataset_sizes);

// Cache directory override, e.g. for checkpoints: $ARGMINE_CACHE_DIR.
std::string cache_directory();

}  // namespace argmine::runner
