#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine::analysis {

struct EmotionPrediction {
    std::string id;
    EmotionLabel label = EmotionLabel::NonEmotional;
    double confidence = 0.5;  // max class probability, in [0.5, 1]
};

/// Binary emotion scorer: probabilities (emotional, non-emotional).
using EmotionScorer = std::function<std::array<double, 2>(const LabeledSentence&)>;

// Wraps a deterministic label-only baseline as a scorer with confidence 1.
EmotionScorer scorer_from_labeler(std::function<EmotionLabel(const std::string&)> labeler);

// One prediction per sentence; label = argmax, confidence = max probability.
std::vector<EmotionPrediction> predict_emotions(const Corpus& corpus, const EmotionScorer& scorer);

struct GroupStats {
    int count = 0;
    double mean = 0.0;            // undefined when count == 0
    double std = 0.0;
    bool mean_defined = false;
    std::vector<double> scores;
};

struct GroupedQuality {
    std::string dataset;
    std::string model_name;
    GroupStats emotional;
    GroupStats non_emotional;
};

// Partitions the AQ corpus scores by predicted emotionality. Every corpus id
// must have a prediction.
GroupedQuality group_quality_by_emotion(const Corpus& aq_corpus,
                                        const std::vector<EmotionPrediction>& predictions,
                                        const std::string& model_name = "model");

struct SignificanceRow {
    std::string dataset;
    std::string model_name;
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    bool significant = false;  // p <= 0.01, inclusive
    bool defined = true;       // false when a group is degenerate (marked NA)
};

struct SignificanceReport {
    std::vector<SignificanceRow> rows;
    double fisher_combined_p = 1.0;   // across defined rows
    double bonferroni_min_p = 1.0;
    bool combined_defined = false;
};

// Welch test emotional vs non-emotional per (dataset, model); significance
// declared at p <= 0.01. Degenerate groups are reported as NA rows.
SignificanceReport significance_report(const std::vector<GroupedQuality>& grouped);

// Tidy outputs: (dataset, model, group, score) rows and the per-test summary.
void write_grouped_quality_csv(const std::vector<GroupedQuality>& grouped,
                               const std::string& path);
void write_significance_csv(const SignificanceReport& report, const std::string& path);

}  // namespace argmine::analysis
