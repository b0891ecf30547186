#pragma once

#include <set>
#include <string>
#include <vector>

#include "argmine/corpus.hpp"
#include "argmine/stats/metrics.hpp"

namespace argmine::baselines {

/// Lower-cased unigrams flagged as emotion-bearing.
struct Lexicon {
    std::set<std::string> terms;

    bool contains(const std::string& token) const { return terms.count(token) > 0; }
};

// NRC-style file: `term<TAB>emotion<TAB>0|1` triples. Any term with a set flag
// on a non-neutral emotion becomes emotion-bearing.
Lexicon load_nrc_lexicon(const std::string& path);

// Whitespace/punctuation split, lower-cased.
std::vector<std::string> tokenize(const std::string& text);

/// Constant classifier emitting the modal training class; ties break toward
/// non-emotional.
class MajorityBaseline {
  public:
    explicit MajorityBaseline(const std::vector<EmotionLabel>& train_labels);
    EmotionLabel predict(const std::string& /*text*/) const { return label_; }
    EmotionLabel label() const { return label_; }

  private:
    EmotionLabel label_;
};

// emotional iff the text contains the token "i", "you" or "me"
// (case-insensitive, word-boundary match).
EmotionLabel pronoun_baseline(const std::string& text);

// emotional iff >= 1 lower-cased token is in the lexicon.
EmotionLabel nrc_baseline(const std::string& text, const Lexicon& lexicon);

struct HumanPerformance {
    double mean_macro_f1 = 0.0;
    double std_macro_f1 = 0.0;
    std::vector<double> per_annotator;
};

// Each annotator scored against the majority of the remaining annotators;
// items where the others tie are excluded for that annotator. Needs >= 3
// annotators.
HumanPerformance human_performance(const stats::AgreementTable& table);

}  // namespace argmine::baselines
