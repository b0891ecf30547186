#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"

namespace argmine {

/// Topic-level train/validation/test partition for one CV fold.
struct FoldPlan {
    int fold_index = 0;
    std::set<std::string> train_topics;
    std::set<std::string> val_topics;
    std::set<std::string> test_topics;
    std::array<double, 3> ratios{0.6, 0.2, 0.2};
};

struct TruncationRule {
    double percentile = 95.0;   // in (0, 100]
    int max_length = 1;         // tokens
};

struct SplitCorpora {
    Corpus train;
    Corpus val;
    Corpus test;
};

// Partitions *topics* (not sentences) by ratio: val and test get
// floor(T * ratio) topics, the remainder goes to train. Each fold is an
// independent seeded shuffle of the topic list. Deterministic in
// (corpus topics, seed). Throws when a split would receive zero topics.
std::vector<FoldPlan> make_cross_topic_folds(const Corpus& corpus, int n_folds,
                                             std::array<double, 3> ratios, std::uint64_t seed);

// Routes every sentence by its topic. A sentence whose topic is absent from
// the plan is a routing error; an empty split yields an empty corpus plus a
// warning.
SplitCorpora assign_split(const Corpus& corpus, const FoldPlan& plan,
                          std::vector<std::string>* warnings = nullptr);

// Nearest-rank percentile of the token lengths: the value at sorted rank
// ceil(p/100 * n). Throws on an empty list or percentile outside (0, 100].
int compute_truncation_length(std::vector<int> lengths, double percentile);

// Fold plans round-trip through JSON so training runs are replayable.
std::string fold_plans_to_json(const std::vector<FoldPlan>& plans);
std::vector<FoldPlan> fold_plans_from_json(const std::string& text);
void save_fold_plans(const std::vector<FoldPlan>& plans, const std::string& path);
std::vector<FoldPlan> load_fold_plans(const std::string& path);

}  // namespace argmine
