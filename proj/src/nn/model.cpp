#include "argmine/nn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace argmine::nn {

namespace {

Matrix glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
}

Var apply_dropout(const Var& x, double rate, bool train_mode, std::mt19937_64* rng) {
    if (!train_mode || rate <= 0.0 || rng == nullptr) return x;
    const double keep = 1.0 - rate;
    std::bernoulli_distribution dist(keep);
    Matrix mask(x->value.rows(), x->value.cols());
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        for (Eigen::Index j = 0; j < mask.cols(); ++j) mask(i, j) = dist(*rng) ? 1.0 : 0.0;
    }
    return dropout_mask(x, mask, keep);
}

void check_dim(const Var& embedding, int expected, const char* what) {
    if (embedding->value.rows() != 1 || embedding->value.cols() != expected) {
        throw std::invalid_argument(std::string(what) + ": embedding dimension mismatch, expected 1x" +
                                    std::to_string(expected));
    }
}

}  // namespace

RegressionHead::RegressionHead(int input_dim, int hidden_dim, double dropout, std::uint64_t seed)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), dropout_(dropout) {
    if (input_dim < 1 || hidden_dim < 1) throw std::invalid_argument("invalid head dimensions");
    std::mt19937_64 rng(seed);
    w1_ = parameter(glorot(input_dim, hidden_dim, rng));
    b1_ = parameter(Matrix::Zero(1, hidden_dim));
    w2_ = parameter(glorot(hidden_dim, 1, rng));
    b2_ = parameter(Matrix::Zero(1, 1));
}

Var RegressionHead::forward(const Var& embedding, bool train_mode, std::mt19937_64* rng) const {
    check_dim(embedding, input_dim_, "regression head");
    Var hidden = relu(add_rowwise(matmul(embedding, w1_), b1_));
    hidden = apply_dropout(hidden, dropout_, train_mode, rng);
    return sigmoid(add(matmul(hidden, w2_), b2_));
}

std::vector<std::pair<std::string, Var>> RegressionHead::named_parameters(
    const std::string& prefix) const {
    return {{prefix + ".w1", w1_}, {prefix + ".b1", b1_},
            {prefix + ".w2", w2_}, {prefix + ".b2", b2_}};
}

ClassificationHead::ClassificationHead(int input_dim, int n_classes, double dropout,
                                       std::uint64_t seed)
    : input_dim_(input_dim), n_classes_(n_classes), dropout_(dropout) {
    if (input_dim < 1 || n_classes < 2) throw std::invalid_argument("invalid head dimensions");
    std::mt19937_64 rng(seed);
    w_ = parameter(glorot(input_dim, n_classes, rng));
    b_ = parameter(Matrix::Zero(1, n_classes));
}

Var ClassificationHead::logits(const Var& embedding, bool train_mode, std::mt19937_64* rng) const {
    check_dim(embedding, input_dim_, "classification head");
    const Var dropped = apply_dropout(embedding, dropout_, train_mode, rng);
    return add_rowwise(matmul(dropped, w_), b_);
}

Var ClassificationHead::forward(const Var& embedding, bool train_mode, std::mt19937_64* rng) const {
    return softmax_rows(logits(embedding, train_mode, rng));
}

std::vector<std::pair<std::string, Var>> ClassificationHead::named_parameters(
    const std::string& prefix) const {
    return {{prefix + ".w", w_}, {prefix + ".b", b_}};
}

Var regression_forward(const Var& embedding, const RegressionHead& head) {
    return head.forward(embedding, /*train_mode=*/false);
}

Var classification_forward(const Var& embedding, const ClassificationHead& head) {
    return head.forward(embedding, /*train_mode=*/false);
}

MultiTaskModel::MultiTaskModel(std::shared_ptr<EncoderBackend> encoder, Pooling pooling)
    : encoder_(std::move(encoder)), pooling_(pooling) {
    if (!encoder_) throw std::invalid_argument("null encoder backend");
}

void MultiTaskModel::register_task(Task task, double dropout, std::uint64_t seed) {
    if (heads_.count(task)) throw std::invalid_argument("task already registered");
    const int dim = 4 * encoder_->hidden_size();
    if (is_regression_task(task)) {
        heads_.emplace(task, RegressionHead(dim, 100, dropout, seed));
    } else {
        heads_.emplace(task, ClassificationHead(dim, 2, dropout, seed));
    }
}

std::vector<Task> MultiTaskModel::tasks() const {
    std::vector<Task> out;
    for (const auto& [task, _] : heads_) out.push_back(task);
    return out;
}

Var MultiTaskModel::embed(const PairInput& input, bool train_mode) {
    return encode_pair(input, *encoder_, pooling_, train_mode);
}

const Head& MultiTaskModel::head(Task task) const {
    const auto it = heads_.find(task);
    if (it == heads_.end()) {
        throw std::invalid_argument("task not registered: " + to_string(task));
    }
    return it->second;
}

TaskHeadOutput MultiTaskModel::forward_embedding(const Var& embedding, Task task, bool train_mode,
                                                 std::mt19937_64* rng) {
    const Head& h = head(task);
    TaskHeadOutput out;
    out.task = task;
    if (const auto* reg = std::get_if<RegressionHead>(&h)) {
        out.score = reg->forward(embedding, train_mode, rng);
    } else {
        out.class_probs = std::get<ClassificationHead>(h).forward(embedding, train_mode, rng);
    }
    return out;
}

TaskHeadOutput MultiTaskModel::forward(const PairInput& input, Task task, bool train_mode,
                                       std::mt19937_64* rng) {
    return forward_embedding(embed(input, train_mode), task, train_mode, rng);
}

std::vector<std::pair<std::string, Var>> MultiTaskModel::named_parameters() {
    std::vector<std::pair<std::string, Var>> params = encoder_->named_parameters();
    for (const auto& [task, h] : heads_) {
        const std::string prefix = "head." + to_string(task);
        const auto head_params =
            std::holds_alternative<RegressionHead>(h)
                ? std::get<RegressionHead>(h).named_parameters(prefix)
                : std::get<ClassificationHead>(h).named_parameters(prefix);
        params.insert(params.end(), head_params.begin(), head_params.end());
    }
    return params;
}

}  // namespace argmine::nn
