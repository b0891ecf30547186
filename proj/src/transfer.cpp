#include "argmine/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "argmine/stats/metrics.hpp"
#include "argmine/training.hpp"

namespace argmine::transfer {

double cls_to_score(const std::array<double, 2>& class_probs) {
    const double sum = class_probs[0] + class_probs[1];
    if (class_probs[0] < 0.0 || class_probs[1] < 0.0 || std::fabs(sum - 1.0) > 1e-6) {
        throw std::invalid_argument("class probabilities must be a normalized pair");
    }
    return class_probs[0];
}

ThresholdCalibration calibrate_threshold(const std::vector<double>& scores,
                                         const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size()) {
        throw std::invalid_argument("scores and labels must be equally long and non-empty");
    }
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    constexpr double kEps = 1e-9;
    std::vector<double> candidates;
    candidates.push_back(sorted.front() - kEps);  // everything argumentative
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
    candidates.push_back(sorted.back() + kEps);   // everything non-argumentative

    std::vector<int> gold(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("labels must be 0/1");
        gold[i] = labels[i];
    }

    ThresholdCalibration best;
    best.candidate_count = static_cast<int>(candidates.size());
    best.achieved_macro_f1 = -1.0;
    std::vector<int> preds(scores.size());
    for (double alpha : candidates) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            preds[i] = scores[i] >= alpha ? 1 : 0;
        }
        const double f1 = stats::macro_f1(preds, gold, 2);
        if (f1 > best.achieved_macro_f1) {  // strict > keeps the smallest alpha on ties
            best.achieved_macro_f1 = f1;
            best.alpha = alpha;
        }
    }
    return best;
}

ArgClass apply_threshold(double score, double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("threshold must be finite");
    return score >= alpha ? ArgClass::Argumentative : ArgClass::NonArgumentative;
}

namespace {

std::vector<double> gold_scores(const Corpus& corpus) {
    std::vector<double> out;
    for (const auto& r : corpus.records) out.push_back(std::get<ScoreLabel>(r.label).value);
    return out;
}

std::vector<int> gold_classes(const Corpus& corpus) {
    // 1 = argumentative (positive class)
    std::vector<int> out;
    for (const auto& r : corpus.records) {
        out.push_back(std::get<ArgClass>(r.label) == ArgClass::Argumentative ? 1 : 0);
    }
    return out;
}

std::vector<double> model_scores(nn::MultiTaskModel& model, Task source, const Corpus& corpus,
                                 int max_len) {
    if (is_regression_task(source)) {
        return training::predict_scores(model, source, corpus, max_len);
    }
    std::vector<double> scores;
    for (const auto& probs : training::predict_class_probs(model, source, corpus, max_len)) {
        scores.push_back(cls_to_score(probs));
    }
    return scores;
}

}  // namespace

std::vector<TransferCell> evaluate_transfer_matrix(
    std::map<Task, nn::MultiTaskModel*> models, const std::map<Task, Corpus>& test_sets,
    const Corpus& calibration_set, int max_sequence_length) {
    for (const auto& [task, model] : models) {
        if (model == nullptr) throw std::invalid_argument("null model for " + to_string(task));
        if (!test_sets.count(task)) {
            throw std::invalid_argument("missing test set for " + to_string(task));
        }
    }
    for (const auto& [task, test_set] : test_sets) {
        if (!models.count(task)) {
            throw std::invalid_argument("missing model for " + to_string(task));
        }
    }

    std::vector<TransferCell> cells;
    for (const auto& [source, model] : models) {
        for (const auto& [target, test_set] : test_sets) {
            TransferCell cell;
            cell.source = source;
            cell.target = target;
            if (target == Task::ArgumentIdentification) {
                cell.metric = "macro_f1";
                std::vector<int> preds;
                if (is_regression_task(source)) {
                    // threshold tuned on the calibration split, then applied
                    const auto cal_scores =
                        model_scores(*model, source, calibration_set, max_sequence_length);
                    const auto calibration =
                        calibrate_threshold(cal_scores, gold_classes(calibration_set));
                    for (double s : model_scores(*model, source, test_set, max_sequence_length)) {
                        preds.push_back(apply_threshold(s, calibration.alpha) ==
                                                ArgClass::Argumentative
                                            ? 1
                                            : 0);
                    }
                } else {
                    for (const auto& probs :
                         training::predict_class_probs(*model, source, test_set,
                                                       max_sequence_length)) {
                        preds.push_back(probs[0] >= probs[1] ? 1 : 0);
                    }
                }
                cell.value = stats::macro_f1(preds, gold_classes(test_set), 2);
            } else {
                cell.metric = "spearman";
                const auto scores = model_scores(*model, source, test_set, max_sequence_length);
                cell.value = stats::spearman(scores, gold_scores(test_set));
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

void write_transfer_csv(const std::string& path,
                        const std::map<std::pair<Task, Task>, std::vector<double>>& per_seed_cells,
                        const std::map<std::pair<Task, Task>, std::string>& metrics) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write transfer matrix: " + path);
    out << "source_task,target_task,metric_name,mean,std,n_seeds\n";
    for (const auto& [key, values] : per_seed_cells) {
        const auto agg = stats::mean_std(values);
        out << to_string(key.first) << ',' << to_string(key.second) << ','
            << metrics.at(key) << ',' << agg.mean << ',' << agg.std << ',' << values.size()
            << '\n';
    }
}

}  // namespace argmine::transfer
