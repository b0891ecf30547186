#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/nn/model.hpp"

namespace argmine::training {

enum class OptimizerKind { SGD, AdamW };
enum class EarlyStoppingMetric { ValidationMSE, ValidationCrossEntropy };

struct TrainConfig {
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    int batch_size = 8;
    OptimizerKind optimizer = OptimizerKind::AdamW;
    double dropout = 0.1;
    EarlyStoppingMetric early_stopping_metric = EarlyStoppingMetric::ValidationMSE;
    int patience = 5;             // epochs without improvement before stopping
    int eval_frequency = 1;       // evaluations per epoch
    double warmup_fraction = 0.0; // of one epoch, linear LR warm-up
    int max_epochs = 200;
    int max_sequence_length = 64;
    std::uint64_t seed = 1;

    void validate() const;
};

// Named optimizer profiles for the three experiment chapters.
//   "generalization": SGD, lr 9.1e-6, wd 0.35, batch 64, patience 5, val-MSE stop
//   "zero_shot":      lr 1e-5, batch 64, 0.1-epoch warm-up, 10 evals/epoch
//   "emotion":        lr 5e-5, batch 32, wd 0.1, patience 3, 4 evals/epoch
TrainConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Loads a preset from a JSON file.  Keys mirror TrainConfig fields; an
/// optional "base" key names a built-in preset to start from.
TrainConfig preset_from_file(const std::string& path);

/// Resolves either a built-in preset name or a path to a preset file.
TrainConfig resolve_preset(const std::string& name_or_path);

struct LogEntry {
    long step = 0;
    double epoch_fraction = 0.0;
    double train_loss = 0.0;
    double val_metric = 0.0;
};

struct TrainingLog {
    std::vector<LogEntry> entries;
    double best_val_metric = 0.0;
    long best_step = 0;
    bool early_stopped = false;

    void save_csv(const std::string& path) const;
};

/// Per-source (dataset or task) loss weights; default uniform.
struct LossWeighting {
    std::map<std::string, double> weights;

    double weight_for(const std::string& source) const;
};

// Fine-tunes the head (and encoder, when trainable) for the corpus task.
// Restores the checkpoint with the best validation metric. Throws on
// task/head mismatch and on NaN loss.
TrainingLog train_single_task(nn::MultiTaskModel& model, const Corpus& train, const Corpus& val,
                              const TrainConfig& cfg);

// Multi-dataset training: each step draws one batch per dataset and combines
// the losses as a weighted mean (uniform by default).
TrainingLog train_multi_dataset(nn::MultiTaskModel& model,
                                const std::vector<std::pair<Corpus, double>>& trains,
                                const Corpus& val, const TrainConfig& cfg);

// Joint multi-task training with round-robin per-task batches; the combined
// objective is the equally weighted mean of per-task losses (configurable via
// `weighting`, keyed by task name). One validation curve per task.
struct MultiTaskLog {
    TrainingLog combined;
    std::map<Task, std::vector<double>> per_task_val;
};
MultiTaskLog train_multi_task(nn::MultiTaskModel& model,
                              const std::map<Task, std::pair<Corpus, Corpus>>& task_corpora,
                              const TrainConfig& cfg, const LossWeighting& weighting = {});

// Union of all corpora except `leave_out` (matched by dataset name).
Corpus leave_one_out_union(const std::vector<Corpus>& corpora, const std::string& leave_out);

// --- inference helpers ------------------------------------------------------
std::vector<double> predict_scores(nn::MultiTaskModel& model, Task task, const Corpus& corpus,
                                   int max_sequence_length);
std::vector<std::array<double, 2>> predict_class_probs(nn::MultiTaskModel& model, Task task,
                                                       const Corpus& corpus,
                                                       int max_sequence_length);
double evaluate_validation_metric(nn::MultiTaskModel& model, Task task, const Corpus& val,
                                  const TrainConfig& cfg);

// --- checkpoints ------------------------------------------------------------
// Container: JSON with a metadata block (hidden size, pooling, head dims)
// plus parameter name -> row-major tensor payload.
void save_checkpoint(nn::MultiTaskModel& model, const std::string& path,
                     const std::map<std::string, std::string>& extra_metadata = {});
std::map<std::string, std::string> checkpoint_metadata(const std::string& path);
void load_checkpoint(nn::MultiTaskModel& model, const std::string& path);

}  // namespace argmine::training
