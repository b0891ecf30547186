#pragma once

#include <optional>
#include <span>
#include <vector>

namespace argmine::stats {

/// Two equally long series of real values (predictions vs. gold scores).
struct PairedSeries {
    std::vector<double> predictions;
    std::vector<double> gold;
};

/// Items x annotators table of nominal labels; std::nullopt marks a missing rating.
struct AgreementTable {
    std::vector<std::vector<std::optional<int>>> labels;

    std::size_t n_items() const { return labels.size(); }
    std::size_t n_annotators() const { return labels.empty() ? 0 : labels.front().size(); }
};

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;  // two-sided
};

// Sample Pearson correlation. Throws if lengths differ, n < 2, a series is
// constant, or any value is non-finite.
double pearson(std::span<const double> x, std::span<const double> y);
double pearson(const PairedSeries& series);

// Spearman rank correlation with average-rank tie handling.
double spearman(std::span<const double> x, std::span<const double> y);
double spearman(const PairedSeries& series);

// Average ranks (1-based) of the values, ties share the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

// Unweighted mean of per-class F1. Classes are 0..n_classes-1; when
// n_classes == 0 the inventory is deduced as max label + 1. A class absent
// from both predictions and gold still contributes F1 = 0.
double macro_f1(std::span<const int> predictions, std::span<const int> gold,
                int n_classes = 0);

// Krippendorff's alpha for nominal labels via the coincidence-matrix
// formulation; tolerates missing ratings. Throws if fewer than two pairable
// values exist.
double krippendorff_alpha(const AgreementTable& table);

// Welch's unequal-variance t-test with Welch-Satterthwaite df and a
// two-sided p-value. Each group needs n >= 2 and nonzero combined variance.
WelchResult welch_t_test(std::span<const double> group_a, std::span<const double> group_b);

// Fisher's method: X = -2 sum(ln p_i) ~ chi-squared with 2k df.
double combine_pvalues_fisher(std::span<const double> pvalues);

// Bonferroni alternative: min(1, k * min p).
double combine_pvalues_bonferroni(std::span<const double> pvalues);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;       // sample (n-1) standard deviation; 0 when n == 1
    bool single = false;    // flagged when computed from a single value
};

MeanStd mean_std(std::span<const double> values);

}  // namespace argmine::stats
