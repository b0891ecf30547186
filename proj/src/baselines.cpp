#include "argmine/baselines.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace argmine::baselines {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '\'') {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Lexicon load_nrc_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    Lexicon lexicon;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string term, emotion, flag;
        if (!std::getline(ss, term, '\t') || !std::getline(ss, emotion, '\t') ||
            !std::getline(ss, flag)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected term<TAB>emotion<TAB>flag");
        }
        if (flag == "1" && emotion != "neutral") {
            std::string lower;
            for (unsigned char c : term) lower.push_back(static_cast<char>(std::tolower(c)));
            lexicon.terms.insert(lower);
        }
    }
    if (lexicon.terms.empty()) {
        throw std::runtime_error(path + ": lexicon has no emotion-bearing terms");
    }
    return lexicon;
}

MajorityBaseline::MajorityBaseline(const std::vector<EmotionLabel>& train_labels) {
    if (train_labels.empty()) throw std::invalid_argument("empty training labels");
    int emotional = 0;
    for (EmotionLabel l : train_labels) {
        if (l == EmotionLabel::Emotional) ++emotional;
    }
    const int non_emotional = static_cast<int>(train_labels.size()) - emotional;
    label_ = emotional > non_emotional ? EmotionLabel::Emotional : EmotionLabel::NonEmotional;
}

EmotionLabel pronoun_baseline(const std::string& text) {
    for (const auto& token : tokenize(text)) {
        if (token == "i" || token == "you" || token == "me") return EmotionLabel::Emotional;
    }
    return EmotionLabel::NonEmotional;
}

EmotionLabel nrc_baseline(const std::string& text, const Lexicon& lexicon) {
    if (lexicon.terms.empty()) throw std::invalid_argument("empty lexicon");
    for (const auto& token : tokenize(text)) {
        if (lexicon.contains(token)) return EmotionLabel::Emotional;
    }
    return EmotionLabel::NonEmotional;
}

HumanPerformance human_performance(const stats::AgreementTable& table) {
    const std::size_t n_annotators = table.n_annotators();
    if (n_annotators < 3) throw std::invalid_argument("need at least 3 annotators");

    HumanPerformance result;
    for (std::size_t a = 0; a < n_annotators; ++a) {
        std::vector<int> own, gold;
        for (const auto& row : table.labels) {
            if (row.size() != n_annotators) throw std::invalid_argument("ragged agreement table");
            if (!row[a]) continue;
            std::map<int, int> counts;
            for (std::size_t b = 0; b < n_annotators; ++b) {
                if (b != a && row[b]) ++counts[*row[b]];
            }
            if (counts.empty()) continue;
            int best_label = 0, best_count = 0;
            bool tie = false;
            for (const auto& [label, count] : counts) {
                if (count > best_count) {
                    best_count = count;
                    best_label = label;
                    tie = false;
                } else if (count == best_count) {
                    tie = true;
                }
            }
            if (tie) continue;  // no majority among the others
            own.push_back(*row[a]);
            gold.push_back(best_label);
        }
        if (own.empty()) {
            throw std::invalid_argument("annotator " + std::to_string(a) +
                                        " has no items with a majority among the others");
        }
        result.per_annotator.push_back(stats::macro_f1(own, gold));
    }
    const auto agg = stats::mean_std(result.per_annotator);
    result.mean_macro_f1 = agg.mean;
    result.std_macro_f1 = agg.std;
    return result;
}

}  // namespace argmine::baselines
