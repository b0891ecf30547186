#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/nn/model.hpp"

namespace argmine::transfer {

struct ThresholdCalibration {
    double alpha = 0.5;            // decision threshold
    double achieved_macro_f1 = 0;  // Macro-F1 at alpha on the calibration set
    int candidate_count = 0;
};

// Positive-class (argumentative) probability, unchanged. The pair must be a
// normalized distribution.
double cls_to_score(const std::array<double, 2>& class_probs);

// Scans the finite candidate set {midpoints of adjacent distinct sorted
// scores} plus one threshold below the minimum and one above the maximum;
// this covers every achievable confusion matrix. Ties in Macro-F1 break
// toward the smallest alpha. Labels: 1 = argumentative/positive.
ThresholdCalibration calibrate_threshold(const std::vector<double>& scores,
                                         const std::vector<int>& labels);

// argumentative iff score >= alpha (boundary inclusive).
ArgClass apply_threshold(double score, double alpha);

struct TransferCell {
    Task source;
    Task target;
    std::string metric;  // "macro_f1" | "spearman"
    double value = 0.0;
};

// One matrix cell per (source model, target test set). Targets evaluated with
// Macro-F1 when the target is Argument Identification (regression sources are
// thresholded on the calibration set first), Spearman otherwise.
std::vector<TransferCell> evaluate_transfer_matrix(
    std::map<Task, nn::MultiTaskModel*> models, const std::map<Task, Corpus>& test_sets,
    const Corpus& calibration_set, int max_sequence_length = 64);

void write_transfer_csv(const std::string& path,
                        const std::map<std::pair<Task, Task>, std::vector<double>>& per_seed_cells,
                        const std::map<std::pair<Task, Task>, std::string>& metrics);

}  // namespace argmine::transfer
