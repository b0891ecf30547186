#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/nn/encoder.hpp"

namespace argmine::nn {

/// Per-task model output: a score in (0,1) or a class distribution.
struct TaskHeadOutput {
    Task task;
    Var score;          // set for regression tasks
    Var class_probs;    // 1x2 distribution for classification tasks
};

/// 4H -> 100 -> 1 MLP with ReLU, dropout 0.1 and a sigmoid output.
class RegressionHead {
  public:
    RegressionHead(int input_dim, int hidden_dim = 100, double dropout = 0.1,
                   std::uint64_t seed = 11);

    // Returns a 1x1 node strictly inside (0, 1).
    Var forward(const Var& embedding, bool train_mode, std::mt19937_64* rng = nullptr) const;

    int input_dim() const { return input_dim_; }
    int hidden_dim() const { return hidden_dim_; }
    std::vector<std::pair<std::string, Var>> named_parameters(const std::string& prefix) const;

  private:
    int input_dim_;
    int hidden_dim_;
    double dropout_;
    Var w1_, b1_, w2_, b2_;
};

/// Dropout + linear layer over the embedding producing a 2-class softmax.
class ClassificationHead {
  public:
    ClassificationHead(int input_dim, int n_classes = 2, double dropout = 0.1,
                       std::uint64_t seed = 13);

    Var logits(const Var& embedding, bool train_mode, std::mt19937_64* rng = nullptr) const;
    Var forward(const Var& embedding, bool train_mode, std::mt19937_64* rng = nullptr) const;

    int input_dim() const { return input_dim_; }
    int n_classes() const { return n_classes_; }
    std::vector<std::pair<std::string, Var>> named_parameters(const std::string& prefix) const;

  private:
    int input_dim_;
    int n_classes_;
    double dropout_;
    Var w_, b_;
};

using Head = std::variant<RegressionHead, ClassificationHead>;

/// Shared encoder with one head per registered task.
class MultiTaskModel {
  public:
    MultiTaskModel(std::shared_ptr<EncoderBackend> encoder, Pooling pooling = Pooling::FirstToken);

    void register_task(Task task, double dropout = 0.1, std::uint64_t seed = 17);
    bool has_task(Task task) const { return heads_.count(task) > 0; }
    std::vector<Task> tasks() const;

    EncoderBackend& encoder() { return *encoder_; }
    std::shared_ptr<EncoderBackend> encoder_ptr() const { return encoder_; }
    Pooling pooling() const { return pooling_; }

    Var embed(const PairInput& input, bool train_mode = false);
    TaskHeadOutput forward(const PairInput& input, Task task, bool train_mode = false,
                           std::mt19937_64* rng = nullptr);
    TaskHeadOutput forward_embedding(const Var& embedding, Task task, bool train_mode = false,
                                     std::mt19937_64* rng = nullptr);

    const Head& head(Task task) const;

    std::vector<std::pair<std::string, Var>> named_parameters();

  private:
    std::shared_ptr<EncoderBackend> encoder_;
    Pooling pooling_;
    std::map<Task, Head> heads_;
};

Var regression_forward(const Var& embedding, const RegressionHead& head);
Var classification_forward(const Var& embedding, const ClassificationHead& head);

}  // namespace argmine::nn
