#include "argmine/analysis.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "argmine/stats/metrics.hpp"

namespace argmine::analysis {

EmotionScorer scorer_from_labeler(std::function<EmotionLabel(const std::string&)> labeler) {
    return [labeler = std::move(labeler)](const LabeledSentence& record) -> std::array<double, 2> {
        return labeler(record.text) == EmotionLabel::Emotional ? std::array<double, 2>{1.0, 0.0}
                                                               : std::array<double, 2>{0.0, 1.0};
    };
}

std::vector<EmotionPrediction> predict_emotions(const Corpus& corpus,
                                                const EmotionScorer& scorer) {
    if (!scorer) throw std::invalid_argument("null emotion scorer");
    std::vector<EmotionPrediction> predictions;
    predictions.reserve(corpus.size());
    for (const auto& record : corpus.records) {
        const auto probs = scorer(record);
        const double sum = probs[0] + probs[1];
        if (probs[0] < 0.0 || probs[1] < 0.0 || std::fabs(sum - 1.0) > 1e-6) {
            throw std::runtime_error("scorer returned an un-normalized distribution");
        }
        EmotionPrediction p;
        p.id = record.id;
        p.label = probs[0] >= probs[1] ? EmotionLabel::Emotional : EmotionLabel::NonEmotional;
        p.confidence = std::max(probs[0], probs[1]);
        predictions.push_back(std::move(p));
    }
    return predictions;
}

namespace {

GroupStats finalize(std::vector<double> scores) {
    GroupStats g;
    g.count = static_cast<int>(scores.size());
    g.scores = std::move(scores);
    if (g.count > 0) {
        g.mean_defined = true;
        const auto agg = stats::mean_std(g.scores);
        g.mean = agg.mean;
        g.std = agg.std;
    }
    return g;
}

}  // namespace

GroupedQuality group_quality_by_emotion(const Corpus& aq_corpus,
                                        const std::vector<EmotionPrediction>& predictions,
                                        const std::string& model_name) {
    std::map<std::string, EmotionLabel> by_id;
    for (const auto& p : predictions) by_id[p.id] = p.label;

    std::vector<double> emotional, non_emotional;
    for (const auto& record : aq_corpus.records) {
        const auto it = by_id.find(record.id);
        if (it == by_id.end()) {
            throw std::runtime_error("missing emotion prediction for id " + record.id);
        }
        const double score = std::get<ScoreLabel>(record.label).value;
        if (it->second == EmotionLabel::Emotional) emotional.push_back(score);
        else non_emotional.push_back(score);
    }

    GroupedQuality grouped;
    grouped.dataset = aq_corpus.records.empty() ? "" : aq_corpus.records.front().dataset;
    grouped.model_name = model_name;
    grouped.emotional = finalize(std::move(emotional));
    grouped.non_emotional = finalize(std::move(non_emotional));
    return grouped;
}

SignificanceReport significance_report(const std::vector<GroupedQuality>& grouped) {
    SignificanceReport report;
    std::vector<double> defined_ps;
    for (const auto& g : grouped) {
        SignificanceRow row;
        row.dataset = g.dataset;
        row.model_name = g.model_name;
        if (g.emotional.count < 2 || g.non_emotional.count < 2) {
            row.defined = false;  // NA cell
        } else {
            try {
                const auto welch = stats::welch_t_test(g.emotional.scores, g.non_emotional.scores);
                row.t = welch.t;
                row.df = welch.df;
                row.p = welch.p;
                row.significant = welch.p <= 0.01;
                defined_ps.push_back(std::max(welch.p, 1e-300));
            } catch (const std::domain_error&) {
                row.defined = false;
            }
        }
        report.rows.push_back(std::move(row));
    }
    if (!defined_ps.empty()) {
        report.combined_defined = true;
        report.fisher_combined_p = stats::combine_pvalues_fisher(defined_ps);
        report.bonferroni_min_p = stats::combine_pvalues_bonferroni(defined_ps);
    }
    return report;
}

void write_grouped_quality_csv(const std::vector<GroupedQuality>& grouped,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write grouped quality csv: " + path);
    out << "dataset,model,group,score\n";
    for (const auto& g : grouped) {
        for (double s : g.emotional.scores) {
            out << g.dataset << ',' << g.model_name << ",emotional," << s << '\n';
        }
        for (double s : g.non_emotional.scores) {
            out << g.dataset << ',' << g.model_name << ",non-emotional," << s << '\n';
        }
    }
}

void write_significance_csv(const SignificanceReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write significance csv: " + path);
    out << "dataset,model,t,df,p,significant\n";
    for (const auto& row : report.rows) {
        if (!row.defined) {
            out << row.dataset << ',' << row.model_name << ",NA,NA,NA,NA\n";
        } else {
            out << row.dataset << ',' << row.model_name << ',' << row.t << ',' << row.df << ','
                << row.p << ',' << (row.significant ? "true" : "false") << '\n';
        }
    }
    if (report.combined_defined) {
        out << "combined,fisher,,," << report.fisher_combined_p << ",\n";
        out << "combined,bonferroni,,," << report.bonferroni_min_p << ",\n";
    }
}

}  // namespace argmine::analysis
