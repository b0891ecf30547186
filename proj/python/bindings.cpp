#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "argmine/analysis.hpp"
#include "argmine/baselines.hpp"
#include "argmine/corpus.hpp"
#include "argmine/runner.hpp"
#include "argmine/splitting.hpp"
#include "argmine/stats/metrics.hpp"
#include "argmine/stats/special.hpp"
#include "argmine/transfer.hpp"

namespace py = pybind11;
using namespace argmine;

PYBIND11_MODULE(_argmine, m) {
    m.doc() = "Batch experiment framework for argument quality estimation";

    // metrics -----------------------------------------------------------------
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) {
        return stats::pearson(x, y);
    });
    m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
        return stats::spearman(x, y);
    });
    m.def("average_ranks", [](const std::vector<double>& values) {
        return stats::average_ranks(values);
    });
    m.def(
        "macro_f1",
        [](const std::vector<int>& pred, const std::vector<int>& gold, int n_classes) {
            return stats::macro_f1(pred, gold, n_classes);
        },
        py::arg("pred"), py::arg("gold"), py::arg("n_classes") = 0);
    m.def("krippendorff_alpha", [](const std::vector<std::vector<std::optional<int>>>& labels) {
        stats::AgreementTable table;
        table.labels = labels;
        return stats::krippendorff_alpha(table);
    });
    m.def("welch_t_test", [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = stats::welch_t_test(a, b);
        return py::make_tuple(r.t, r.df, r.p);
    });
    m.def("combine_pvalues_fisher", [](const std::vector<double>& ps) {
        return stats::combine_pvalues_fisher(ps);
    });
    m.def("combine_pvalues_bonferroni", [](const std::vector<double>& ps) {
        return stats::combine_pvalues_bonferroni(ps);
    });
    m.def("mean_std", [](const std::vector<double>& values) {
        const auto r = stats::mean_std(values);
        return py::make_tuple(r.mean, r.std);
    });
    m.def("student_t_two_sided_p", &stats::student_t_two_sided_p);
    m.def("chi_squared_sf", &stats::chi_squared_sf);

    // splitting ---------------------------------------------------------------
    m.def("compute_truncation_length", [](std::vector<int> lengths, double percentile) {
        return compute_truncation_length(std::move(lengths), percentile);
    });
    m.def(
        "calibrate_threshold",
        [](const std::vector<double>& scores, const std::vector<int>& labels) {
            const auto c = transfer::calibrate_threshold(scores, labels);
            return py::make_tuple(c.alpha, c.achieved_macro_f1, c.candidate_count);
        },
        py::arg("scores"), py::arg("labels"));
    m.def("apply_threshold", [](double score, double alpha) {
        return transfer::apply_threshold(score, alpha) == ArgClass::Argumentative;
    });
    m.def("cls_to_score", [](double p_pos, double p_neg) {
        return transfer::cls_to_score({p_pos, p_neg});
    });

    // baselines ---------------------------------------------------------------
    m.def("pronoun_baseline", [](const std::string& text) {
        return baselines::pronoun_baseline(text) == EmotionLabel::Emotional;
    });
    m.def("tokenize", &baselines::tokenize);

    // runner ------------------------------------------------------------------
    m.def("aggregate_seeds", [](const std::vector<double>& values) {
        const auto r = runner::aggregate_seeds(values);
        return py::make_tuple(r.mean, r.std);
    });
    m.def("cache_directory", &runner::cache_directory);
    m.def("run_experiment_config", [](const std::string& json_text) {
        const auto config = runner::parse_experiment_config(json_text);
        const auto results = runner::run_experiment(config);
        py::list out;
        for (const auto& r : results) {
            py::dict d;
            d["train_source"] = r.train_source;
            d["eval_target"] = r.eval_target;
            d["task"] = r.task;
            d["metric"] = r.metric;
            d["per_seed"] = r.per_seed;
            d["mean"] = r.mean;
            d["std"] = r.std;
            out.append(std::move(d));
        }
        return out;
    });

    // corpus ------------------------------------------------------------------
    m.def(
        "corpus_summary",
        [](const std::string& path, const std::string& task, bool strict) {
            DatasetManifest manifest;
            std::vector<std::string> warnings;
            const auto corpus =
                load_corpus(path, manifest, task_from_string(task), strict, &warnings);
            py::dict d;
            d["size"] = corpus.size();
            d["topics"] = corpus.topics.size();
            d["warnings"] = warnings;
            return d;
        },
        py::arg("path"), py::arg("task") = "argument_quality", py::arg("strict") = false);
}
