#include "argmine/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace argmine::training {

using nn::Matrix;
using nn::Var;

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (eval_frequency < 1) throw std::invalid_argument("eval_frequency must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
    if (warmup_fraction < 0.0) throw std::invalid_argument("warmup_fraction must be >= 0");
}

TrainConfig preset(const std::string& name) {
    TrainConfig cfg;
    if (name == "generalization") {
        cfg.optimizer = OptimizerKind::SGD;
        cfg.learning_rate = 9.1e-6;
        cfg.weight_decay = 0.35;
        cfg.batch_size = 64;
        cfg.patience = 5;
        cfg.early_stopping_metric = EarlyStoppingMetric::ValidationMSE;
        cfg.eval_frequency = 1;
        return cfg;
    }
    if (name == "zero_shot") {
        cfg.optimizer = OptimizerKind::AdamW;
        cfg.learning_rate = 1e-5;
        cfg.weight_decay = 0.0;
        cfg.batch_size = 64;
        cfg.warmup_fraction = 0.1;
        cfg.eval_frequency = 10;
        cfg.patience = 5;
        return cfg;
    }
    if (name == "emotion") {
        cfg.optimizer = OptimizerKind::AdamW;
        cfg.learning_rate = 5e-5;
        cfg.weight_decay = 0.1;
        cfg.batch_size = 32;
        cfg.eval_frequency = 4;
        cfg.patience = 3;
        cfg.early_stopping_metric = EarlyStoppingMetric::ValidationCrossEntropy;
        return cfg;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"generalization", "zero_shot", "emotion"};
}

TrainConfig preset_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open preset file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("invalid preset file " + path + ": " + e.what());
    }
    TrainConfig cfg;
    if (j.contains("base")) cfg = preset(j.at("base").get<std::string>());
    for (const auto& [key, value] : j.items()) {
        if (key == "base") continue;
        else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
        else if (key == "weight_decay") cfg.weight_decay = value.get<double>();
        else if (key == "batch_size") cfg.batch_size = value.get<int>();
        else if (key == "dropout") cfg.dropout = value.get<double>();
        else if (key == "patience") cfg.patience = value.get<int>();
        else if (key == "eval_frequency") cfg.eval_frequency = value.get<int>();
        else if (key == "warmup_fraction") cfg.warmup_fraction = value.get<double>();
        else if (key == "max_epochs") cfg.max_epochs = value.get<int>();
        else if (key == "max_sequence_length") cfg.max_sequence_length = value.get<int>();
        else if (key == "optimizer") {
            const auto name = value.get<std::string>();
            if (name == "sgd") cfg.optimizer = OptimizerKind::SGD;
            else if (name == "adamw") cfg.optimizer = OptimizerKind::AdamW;
            else throw std::invalid_argument("unknown optimizer in preset file: " + name);
        } else if (key == "early_stopping_metric") {
            const auto name = value.get<std::string>();
            if (name == "validation_mse") cfg.early_stopping_metric = EarlyStoppingMetric::ValidationMSE;
            else if (name == "validation_cross_entropy") {
                cfg.early_stopping_metric = EarlyStoppingMetric::ValidationCrossEntropy;
            } else {
                throw std::invalid_argument("unknown early stopping metric in preset file: " + name);
            }
        } else {
            throw std::invalid_argument("unknown preset key: " + key);
        }
    }
    cfg.validate();
    return cfg;
}

TrainConfig resolve_preset(const std::string& name_or_path) {
    if (name_or_path.size() > 5 &&
        name_or_path.compare(name_or_path.size() - 5, 5, ".json") == 0) {
        return preset_from_file(name_or_path);
    }
    return preset(name_or_path);
}

void TrainingLog::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write training log: " + path);
    out << "step,epoch_fraction,train_loss,val_metric\n";
    for (const auto& e : entries) {
        out << e.step << ',' << e.epoch_fraction << ',' << e.train_loss << ','
            << e.val_metric << '\n';
    }
}

double LossWeighting::weight_for(const std::string& source) const {
    const auto it = weights.find(source);
    if (it == weights.end()) return 1.0;
    if (it->second < 0.0) throw std::invalid_argument("loss weight must be >= 0");
    return it->second;
}

namespace {

class Optimizer {
  public:
    Optimizer(std::vector<std::pair<std::string, Var>> params, const TrainConfig& cfg,
              long steps_per_epoch)
        : params_(std::move(params)), cfg_(cfg) {
        warmup_steps_ = static_cast<long>(cfg.warmup_fraction * static_cast<double>(steps_per_epoch));
        if (cfg_.optimizer == OptimizerKind::AdamW) {
            for (const auto& [name, p] : params_) {
                m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
                v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
            }
        }
    }

    void zero_grad() {
        for (auto& [name, p] : params_) {
            if (p->grad.size() != 0) p->grad.setZero();
        }
    }

    void step() {
        ++t_;
        double lr = cfg_.learning_rate;
        if (warmup_steps_ > 0 && t_ <= warmup_steps_) {
            lr *= static_cast<double>(t_) / static_cast<double>(warmup_steps_);
        }
        for (std::size_t i = 0; i < params_.size(); ++i) {
            Var& p = params_[i].second;
            if (p->grad.size() == 0) continue;
            if (cfg_.optimizer == OptimizerKind::SGD) {
                p->value -= lr * (p->grad + cfg_.weight_decay * p->value);
            } else {
                constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
                m_[i] = beta1 * m_[i] + (1.0 - beta1) * p->grad;
                v_[i] = beta2 * v_[i] + (1.0 - beta2) * p->grad.cwiseProduct(p->grad);
                const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
                const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
                const Matrix m_hat = m_[i] / bc1;
                const Matrix v_hat = v_[i] / bc2;
                p->value -= lr * (m_hat.array() / (v_hat.array().sqrt() + eps)).matrix();
                if (cfg_.weight_decay > 0.0) p->value -= lr * cfg_.weight_decay * p->value;
            }
        }
    }

  private:
    std::vector<std::pair<std::string, Var>> params_;
    TrainConfig cfg_;
    long warmup_steps_ = 0;
    long t_ = 0;
    std::vector<Matrix> m_, v_;
};

struct Snapshot {
    std::vector<Matrix> values;
};

Snapshot take_snapshot(const std::vector<std::pair<std::string, Var>>& params) {
    Snapshot s;
    for (const auto& [name, p] : params) s.values.push_back(p->value);
    return s;
}

void restore_snapshot(const std::vector<std::pair<std::string, Var>>& params, const Snapshot& s) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i].second->value = s.values[i];
}

int class_index(const Label& label) {
    if (const auto* c = std::get_if<ArgClass>(&label)) return static_cast<int>(*c);
    if (const auto* e = std::get_if<EmotionLabel>(&label)) return static_cast<int>(*e);
    throw std::invalid_argument("label is not a class label");
}

Var sample_loss(nn::MultiTaskModel& model, const LabeledSentence& record, Task task,
                const TrainConfig& cfg, bool train_mode, std::mt19937_64* rng) {
    nn::PairInput input{record.text, record.topic, cfg.max_sequence_length};
    const Var embedding = model.embed(input, train_mode);
    const nn::Head& head = model.head(task);
    if (const auto* reg = std::get_if<nn::RegressionHead>(&head)) {
        const double target = std::get<ScoreLabel>(record.label).value;
        const Var pred = reg->forward(embedding, train_mode, rng);
        return nn::mse_loss(pred, Matrix::Constant(1, 1, target));
    }
    const auto& cls = std::get<nn::ClassificationHead>(head);
    const Var logits = cls.logits(embedding, train_mode, rng);
    return nn::cross_entropy_with_logits(logits, class_index(record.label));
}

Var batch_loss(nn::MultiTaskModel& model, const Corpus& corpus,
               const std::vector<std::size_t>& indices, std::size_t begin, std::size_t end,
               Task task, const TrainConfig& cfg, std::mt19937_64* rng) {
    std::vector<Var> losses;
    for (std::size_t i = begin; i < end; ++i) {
        losses.push_back(sample_loss(model, corpus.records[indices[i]], task, cfg, true, rng));
    }
    return nn::mean_scalars(losses);
}

void check_task_head(const nn::MultiTaskModel& model, Task task) {
    if (!model.has_task(task)) {
        throw std::invalid_argument("model has no head for task " + to_string(task));
    }
}

void shuffle_indices(std::vector<std::size_t>& indices, std::mt19937_64& rng) {
    for (std::size_t i = indices.size(); i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(indices[i - 1], indices[j]);
    }
}

// Cycles batches over one corpus, reshuffling at each local epoch boundary.
class BatchCursor {
  public:
    BatchCursor(const Corpus& corpus, int batch_size, std::mt19937_64& rng)
        : corpus_(&corpus), batch_size_(static_cast<std::size_t>(batch_size)), rng_(&rng) {
        indices_.resize(corpus.size());
        for (std::size_t i = 0; i < indices_.size(); ++i) indices_[i] = i;
        shuffle_indices(indices_, *rng_);
    }

    Var next_loss(nn::MultiTaskModel& model, Task task, const TrainConfig& cfg,
                  std::mt19937_64* dropout_rng) {
        const std::size_t end = std::min(pos_ + batch_size_, indices_.size());
        const Var loss = batch_loss(model, *corpus_, indices_, pos_, end, task, cfg, dropout_rng);
        pos_ = end;
        if (pos_ >= indices_.size()) {
            pos_ = 0;
            shuffle_indices(indices_, *rng_);
        }
        return loss;
    }

  private:
    const Corpus* corpus_;
    std::size_t batch_size_;
    std::mt19937_64* rng_;
    std::vector<std::size_t> indices_;
    std::size_t pos_ = 0;
};

}  // namespace

double evaluate_validation_metric(nn::MultiTaskModel& model, Task task, const Corpus& val,
                                  const TrainConfig& cfg) {
    if (val.records.empty()) throw std::invalid_argument("empty validation corpus");
    double total = 0.0;
    for (const auto& record : val.records) {
        const Var loss = sample_loss(model, record, task, cfg, false, nullptr);
        total += loss->value(0, 0);
    }
    return total / static_cast<double>(val.size());
}

namespace {

// Shared driver: one arbitrary loss per step, validation metric callback.
TrainingLog run_training(nn::MultiTaskModel& model, const TrainConfig& cfg, long steps_per_epoch,
                         const std::function<Var(std::mt19937_64*)>& step_loss,
                         const std::function<double()>& val_metric,
                         const std::function<void()>& on_eval = {}) {
    cfg.validate();
    auto params = model.named_parameters();
    Optimizer optimizer(params, cfg, steps_per_epoch);
    std::mt19937_64 dropout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    TrainingLog log;
    long step = 0;
    long best_step = 0;
    double best_metric = std::numeric_limits<double>::infinity();
    Snapshot best = take_snapshot(params);
    const long eval_every = std::max<long>(1, steps_per_epoch / cfg.eval_frequency);

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        for (long s = 0; s < steps_per_epoch; ++s) {
            optimizer.zero_grad();
            const Var loss = step_loss(&dropout_rng);
            const double loss_value = loss->value(0, 0);
            if (!std::isfinite(loss_value)) {
                throw std::runtime_error("training diverged: non-finite loss at step " +
                                         std::to_string(step) + " (epoch " +
                                         std::to_string(epoch) + ")");
            }
            nn::backward(loss);
            optimizer.step();
            ++step;
            if (step % eval_every == 0 || s + 1 == steps_per_epoch) {
                const double metric = val_metric();
                log.entries.push_back({step,
                                       static_cast<double>(step) / static_cast<double>(steps_per_epoch),
                                       loss_value, metric});
                if (on_eval) on_eval();
                if (metric < best_metric) {
                    best_metric = metric;
                    best_step = step;
                    best = take_snapshot(params);
                }
            }
        }
        // patience counted in epochs regardless of eval frequency
        const double epochs_since_best =
            static_cast<double>(step - best_step) / static_cast<double>(steps_per_epoch);
        if (epochs_since_best >= static_cast<double>(cfg.patience)) {
            log.early_stopped = true;
            break;
        }
    }
    restore_snapshot(params, best);
    log.best_val_metric = best_metric;
    log.best_step = best_step;
    return log;
}

}  // namespace

TrainingLog train_single_task(nn::MultiTaskModel& model, const Corpus& train, const Corpus& val,
                              const TrainConfig& cfg) {
    if (train.task != val.task) throw std::invalid_argument("train/val task mismatch");
    check_task_head(model, train.task);
    if (train.records.empty()) throw std::invalid_argument("empty training corpus");
    const Task task = train.task;

    std::mt19937_64 shuffle_rng(cfg.seed);
    BatchCursor cursor(train, cfg.batch_size, shuffle_rng);
    const long steps_per_epoch =
        static_cast<long>((train.size() + cfg.batch_size - 1) / cfg.batch_size);

    return run_training(
        model, cfg, steps_per_epoch,
        [&](std::mt19937_64* rng) { return cursor.next_loss(model, task, cfg, rng); },
        [&] { return evaluate_validation_metric(model, task, val, cfg); });
}

TrainingLog train_multi_dataset(nn::MultiTaskModel& model,
                                const std::vector<std::pair<Corpus, double>>& trains,
                                const Corpus& val, const TrainConfig& cfg) {
    if (trains.empty()) throw std::invalid_argument("no training corpora");
    const Task task = trains.front().first.task;
    for (const auto& [corpus, weight] : trains) {
        if (corpus.task != task) throw std::invalid_argument("mixed task types across datasets");
        if (corpus.records.empty()) throw std::invalid_argument("empty training corpus");
        if (weight < 0.0) throw std::invalid_argument("dataset weight must be >= 0");
    }
    if (val.task != task) throw std::invalid_argument("validation task mismatch");
    check_task_head(model, task);

    std::mt19937_64 shuffle_rng(cfg.seed);
    std::vector<BatchCursor> cursors;
    std::vector<double> weights;
    std::size_t largest = 0;
    for (const auto& [corpus, weight] : trains) {
        cursors.emplace_back(corpus, cfg.batch_size, shuffle_rng);
        weights.push_back(weight);
        largest = std::max(largest, corpus.size());
    }
    const long steps_per_epoch =
        static_cast<long>((largest + cfg.batch_size - 1) / cfg.batch_size);

    return run_training(
        model, cfg, steps_per_epoch,
        [&](std::mt19937_64* rng) {
            std::vector<Var> losses;
            for (auto& cursor : cursors) losses.push_back(cursor.next_loss(model, task, cfg, rng));
            return nn::weighted_sum_scalars(losses, weights);
        },
        [&] { return evaluate_validation_metric(model, task, val, cfg); });
}

MultiTaskLog train_multi_task(nn::MultiTaskModel& model,
                              const std::map<Task, std::pair<Corpus, Corpus>>& task_corpora,
                              const TrainConfig& cfg, const LossWeighting& weighting) {
    if (task_corpora.empty()) throw std::invalid_argument("no task corpora");
    for (const auto& [task, corpora] : task_corpora) {
        check_task_head(model, task);
        if (corpora.first.task != task || corpora.second.task != task) {
            throw std::invalid_argument("corpus task mismatch for " + to_string(task));
        }
        if (corpora.first.records.empty()) {
            throw std::invalid_argument("empty training corpus for " + to_string(task));
        }
    }

    std::mt19937_64 shuffle_rng(cfg.seed);
    std::vector<Task> tasks;
    std::vector<BatchCursor> cursors;
    std::vector<double> weights;
    std::size_t largest = 0;
    for (const auto& [task, corpora] : task_corpora) {
        tasks.push_back(task);
        cursors.emplace_back(corpora.first, cfg.batch_size, shuffle_rng);
        weights.push_back(weighting.weight_for(to_string(task)));
        largest = std::max(largest, corpora.first.size());
    }
    const long steps_per_epoch =
        static_cast<long>((largest + cfg.batch_size - 1) / cfg.batch_size);

    MultiTaskLog out;
    auto validation = [&] {
        std::vector<double> metrics;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            metrics.push_back(evaluate_validation_metric(model, tasks[i],
                                                         task_corpora.at(tasks[i]).second, cfg));
        }
        double combined = 0.0, total_w = 0.0;
        for (std::size_t i = 0; i < metrics.size(); ++i) {
            combined += weights[i] * metrics[i];
            total_w += weights[i];
        }
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            out.per_task_val[tasks[i]].push_back(metrics[i]);
        }
        return combined / total_w;
    };

    out.combined = run_training(
        model, cfg, steps_per_epoch,
        [&](std::mt19937_64* rng) {
            // round-robin: one batch per task, equally weighted combined loss
            std::vector<Var> losses;
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                losses.push_back(cursors[i].next_loss(model, tasks[i], cfg, rng));
            }
            return nn::weighted_sum_scalars(losses, weights);
        },
        validation);
    return out;
}

Corpus leave_one_out_union(const std::vector<Corpus>& corpora, const std::string& leave_out) {
    if (corpora.empty()) throw std::invalid_argument("no corpora");
    const Task task = corpora.front().task;
    std::vector<LabeledSentence> records;
    bool found = false;
    for (const auto& corpus : corpora) {
        if (corpus.task != task) throw std::invalid_argument("mixed task types");
        const std::string name = corpus.records.empty() ? "" : corpus.records.front().dataset;
        if (name == leave_out) {
            found = true;
            continue;
        }
        for (const auto& r : corpus.records) {
            LabeledSentence copy = r;
            copy.id = r.dataset + "/" + r.id;  // ids stay unique across datasets
            records.push_back(std::move(copy));
        }
    }
    if (!found) throw std::invalid_argument("left-out dataset not present: " + leave_out);
    return make_corpus(task, std::move(records));
}

std::vector<double> predict_scores(nn::MultiTaskModel& model, Task task, const Corpus& corpus,
                                   int max_sequence_length) {
    check_task_head(model, task);
    std::vector<double> scores;
    for (const auto& r : corpus.records) {
        nn::PairInput input{r.text, r.topic, max_sequence_length};
        const auto out = model.forward(input, task, false);
        if (out.score) {
            scores.push_back(out.score->value(0, 0));
        } else {
            // positive-class probability for classification heads
            scores.push_back(out.class_probs->value(0, 0));
        }
    }
    return scores;
}

std::vector<std::array<double, 2>> predict_class_probs(nn::MultiTaskModel& model, Task task,
                                                       const Corpus& corpus,
                                                       int max_sequence_length) {
    check_task_head(model, task);
    std::vector<std::array<double, 2>> probs;
    for (const auto& r : corpus.records) {
        nn::PairInput input{r.text, r.topic, max_sequence_length};
        const auto out = model.forward(input, task, false);
        if (!out.class_probs) throw std::invalid_argument("task has no classification head");
        probs.push_back({out.class_probs->value(0, 0), out.class_probs->value(0, 1)});
    }
    return probs;
}

void save_checkpoint(nn::MultiTaskModel& model, const std::string& path,
                     const std::map<std::string, std::string>& extra_metadata) {
    nlohmann::json j;
    j["format"] = "argmine-checkpoint-v1";
    nlohmann::json meta;
    meta["hidden_size"] = model.encoder().hidden_size();
    meta["num_layers"] = model.encoder().num_layers();
    meta["pooling"] = model.pooling() == nn::Pooling::FirstToken ? "first_token" : "mean";
    meta["embedding_dim"] = 4 * model.encoder().hidden_size();
    for (const auto& [k, v] : extra_metadata) meta[k] = v;
    j["metadata"] = meta;
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, p] : model.named_parameters()) {
        nlohmann::json t;
        t["rows"] = p->value.rows();
        t["cols"] = p->value.cols();
        std::vector<double> data;
        data.reserve(static_cast<std::size_t>(p->value.size()));
        for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
            for (Eigen::Index c = 0; c < p->value.cols(); ++c) data.push_back(p->value(r, c));
        }
        t["data"] = std::move(data);
        params[name] = std::move(t);
    }
    j["parameters"] = std::move(params);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump();
}

std::map<std::string, std::string> checkpoint_metadata(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    in >> j;
    std::map<std::string, std::string> meta;
    for (const auto& [k, v] : j.at("metadata").items()) {
        meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return meta;
}

void load_checkpoint(nn::MultiTaskModel& model, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "argmine-checkpoint-v1") {
        throw std::runtime_error(path + ": unknown checkpoint format");
    }
    const auto& params = j.at("parameters");
    for (auto& [name, p] : model.named_parameters()) {
        if (!params.contains(name)) {
            throw std::runtime_error(path + ": checkpoint missing parameter " + name);
        }
        const auto& t = params.at(name);
        const auto rows = t.at("rows").get<Eigen::Index>();
        const auto cols = t.at("cols").get<Eigen::Index>();
        if (rows != p->value.rows() || cols != p->value.cols()) {
            throw std::runtime_error(path + ": shape mismatch for parameter " + name);
        }
        const auto data = t.at("data").get<std::vector<double>>();
        std::size_t idx = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) p->value(r, c) = data[idx++];
        }
    }
}

}  // namespace argmine::training
