#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "argmine/analysis.hpp"
#include "argmine/corpus.hpp"
#include "argmine/runner.hpp"
#include "argmine/splitting.hpp"
#include "argmine/stats/metrics.hpp"
#include "argmine/training.hpp"

namespace {

using argmine::runner::ExperimentConfig;
using argmine::runner::ExperimentKind;

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty()) throw std::runtime_error(path + ": empty csv");
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == name) return i;
    }
    throw std::runtime_error("csv has no column named '" + name + "'");
}

std::vector<double> numeric_column(const CsvTable& table, const std::string& name) {
    const std::size_t idx = column_index(table, name);
    std::vector<double> values;
    for (const auto& row : table.rows) {
        if (idx >= row.size()) throw std::runtime_error("short row in csv");
        values.push_back(std::stod(row[idx]));
    }
    return values;
}

std::vector<int> int_column(const CsvTable& table, const std::string& name) {
    const std::size_t idx = column_index(table, name);
    std::vector<int> values;
    for (const auto& row : table.rows) {
        if (idx >= row.size()) throw std::runtime_error("short row in csv");
        values.push_back(std::stoi(row[idx]));
    }
    return values;
}

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string preset;
    bool strict_manifests = false;
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config JSON")->required();
    cmd->add_option("--seed", opts.seed, "override: run this single seed");
    cmd->add_option("--out", opts.out, "override: output directory");
    cmd->add_option("--preset", opts.preset, "override: training preset name");
    cmd->add_flag("--strict-manifests", opts.strict_manifests,
                  "treat manifest count mismatches as errors");
}

int run_kind(const RunOptions& opts, std::optional<ExperimentKind> forced_kind) {
    ExperimentConfig config = argmine::runner::load_experiment_config(opts.config_path);
    if (forced_kind && config.kind != *forced_kind) {
        throw std::invalid_argument("config kind '" + to_string(config.kind) +
                                    "' does not match subcommand '" + to_string(*forced_kind) +
                                    "'");
    }
    if (opts.seed) config.seeds = {*opts.seed};
    if (!opts.out.empty()) config.out_dir = opts.out;
    if (!opts.preset.empty()) config.preset = opts.preset;
    if (opts.strict_manifests) config.strict_manifests = true;
    config.validate();

    const auto results = argmine::runner::run_experiment(config);
    std::cout << "run " << to_string(config.kind) << "-" << argmine::runner::config_hash(config)
              << ": " << results.size() << " result rows\n";
    for (const auto& r : results) {
        std::cout << "  " << r.train_source << " -> " << r.eval_target << " [" << r.metric
                  << "] " << r.mean << " +/- " << r.std << " (n=" << r.per_seed.size() << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"argmine: batch experiments for argument quality estimation"};
    app.require_subcommand(1);

    // ingest ------------------------------------------------------------------
    std::string ingest_input, ingest_manifest, ingest_task = "argument_quality", ingest_out;
    bool ingest_strict = false;
    auto* ingest = app.add_subcommand("ingest", "validate a JSONL corpus and re-save canonically");
    ingest->add_option("--input", ingest_input, "JSONL corpus")->required();
    ingest->add_option("--manifest", ingest_manifest, "dataset manifest (key = value lines)");
    ingest->add_option("--task", ingest_task, "task name");
    ingest->add_option("--out", ingest_out, "canonical JSONL output path");
    ingest->add_flag("--strict-manifests", ingest_strict, "count mismatches are errors");

    // split -------------------------------------------------------------------
    std::string split_input, split_manifest, split_task = "argument_quality", split_out;
    int split_folds = 1;
    std::vector<double> split_ratios{0.7, 0.1, 0.2};
    std::uint64_t split_seed = 13;
    auto* split = app.add_subcommand("split", "build cross-topic fold plans");
    split->add_option("--input", split_input, "JSONL corpus")->required();
    split->add_option("--manifest", split_manifest, "dataset manifest");
    split->add_option("--task", split_task, "task name");
    split->add_option("--folds", split_folds, "number of folds");
    split->add_option("--ratios", split_ratios, "train val test ratios")->expected(3);
    split->add_option("--seed", split_seed, "shuffle seed");
    split->add_option("--out", split_out, "fold plan JSON output")->required();

    // experiment runners ------------------------------------------------------
    RunOptions train_opts, zs_opts, mt_opts, ed_opts, an_opts;
    auto* train = app.add_subcommand("train",
                                     "train and evaluate (cross_corpus or leave_one_out)");
    add_run_options(train, train_opts);
    auto* zero_shot = app.add_subcommand("zero-shot", "zero-shot cross-task transfer matrix");
    add_run_options(zero_shot, zs_opts);
    auto* multitask = app.add_subcommand("multitask", "joint multi-task training");
    add_run_options(multitask, mt_opts);
    auto* emotion_detect = app.add_subcommand("emotion-detect",
                                              "emotion baselines and classifier");
    add_run_options(emotion_detect, ed_opts);
    auto* analyze = app.add_subcommand("analyze", "emotionality vs quality statistics");
    add_run_options(analyze, an_opts);

    // aggregate ---------------------------------------------------------------
    std::string agg_csv, agg_column = "value";
    auto* aggregate = app.add_subcommand("aggregate", "mean and sample std of a csv column");
    aggregate->add_option("--csv", agg_csv, "input csv")->required();
    aggregate->add_option("--column", agg_column, "numeric column name");

    // metric subcommands ------------------------------------------------------
    std::string pe_csv, pe_x = "x", pe_y = "y";
    auto* pearson = app.add_subcommand("pearson", "Pearson correlation of two csv columns");
    pearson->add_option("--csv", pe_csv)->required();
    pearson->add_option("--x", pe_x);
    pearson->add_option("--y", pe_y);

    std::string sp_csv, sp_x = "x", sp_y = "y";
    auto* spearman = app.add_subcommand("spearman", "Spearman correlation of two csv columns");
    spearman->add_option("--csv", sp_csv)->required();
    spearman->add_option("--x", sp_x);
    spearman->add_option("--y", sp_y);

    std::string mf_csv, mf_pred = "pred", mf_gold = "gold";
    int mf_classes = 0;
    auto* macro = app.add_subcommand("macro-f1", "Macro-F1 of integer prediction/gold columns");
    macro->add_option("--csv", mf_csv)->required();
    macro->add_option("--pred", mf_pred);
    macro->add_option("--gold", mf_gold);
    macro->add_option("--classes", mf_classes, "fixed class count (0 = infer)");

    std::string ka_csv;
    auto* kripp = app.add_subcommand("krippendorff",
                                     "Krippendorff's alpha; columns = annotators, blank = missing");
    kripp->add_option("--csv", ka_csv)->required();

    std::string wt_csv, wt_a = "a", wt_b = "b";
    auto* welch = app.add_subcommand("welch", "Welch's t-test between two csv columns");
    welch->add_option("--csv", wt_csv)->required();
    welch->add_option("--a", wt_a);
    welch->add_option("--b", wt_b);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            argmine::DatasetManifest manifest;
            if (!ingest_manifest.empty()) manifest = argmine::load_manifest(ingest_manifest);
            std::vector<std::string> warnings;
            const auto corpus =
                argmine::load_corpus(ingest_input, manifest, argmine::task_from_string(ingest_task),
                                     ingest_strict, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
            if (!ingest_out.empty()) argmine::save_corpus(corpus, ingest_out);
            std::cout << corpus.size() << " sentences, " << corpus.topics.size() << " topics\n";
        } else if (*split) {
            argmine::DatasetManifest manifest;
            if (!split_manifest.empty()) manifest = argmine::load_manifest(split_manifest);
            const auto corpus = argmine::load_corpus(split_input, manifest,
                                                     argmine::task_from_string(split_task));
            const auto plans = argmine::make_cross_topic_folds(
                corpus, split_folds, {split_ratios[0], split_ratios[1], split_ratios[2]},
                split_seed);
            argmine::save_fold_plans(plans, split_out);
            std::cout << plans.size() << " fold plans written to " << split_out << '\n';
        } else if (*train) {
            ExperimentConfig probe = argmine::runner::load_experiment_config(train_opts.config_path);
            if (probe.kind != ExperimentKind::CrossCorpus &&
                probe.kind != ExperimentKind::LeaveOneOut) {
                throw std::invalid_argument(
                    "train expects a cross_corpus or leave_one_out config");
            }
            return run_kind(train_opts, probe.kind);
        } else if (*zero_shot) {
            return run_kind(zs_opts, ExperimentKind::ZeroShot);
        } else if (*multitask) {
            return run_kind(mt_opts, ExperimentKind::MultiTask);
        } else if (*emotion_detect) {
            return run_kind(ed_opts, ExperimentKind::EmotionDetect);
        } else if (*analyze) {
            return run_kind(an_opts, ExperimentKind::EmotionAnalysis);
        } else if (*aggregate) {
            const auto values = numeric_column(read_csv(agg_csv), agg_column);
            const auto agg = argmine::runner::aggregate_seeds(values);
            std::cout << "mean=" << agg.mean << " std=" << agg.std << " n=" << values.size()
                      << '\n';
        } else if (*pearson) {
            const auto table = read_csv(pe_csv);
            std::cout << argmine::stats::pearson(numeric_column(table, pe_x),
                                                 numeric_column(table, pe_y))
                      << '\n';
        } else if (*spearman) {
            const auto table = read_csv(sp_csv);
            std::cout << argmine::stats::spearman(numeric_column(table, sp_x),
                                                  numeric_column(table, sp_y))
                      << '\n';
        } else if (*macro) {
            const auto table = read_csv(mf_csv);
            std::cout << argmine::stats::macro_f1(int_column(table, mf_pred),
                                                  int_column(table, mf_gold), mf_classes)
                      << '\n';
        } else if (*kripp) {
            const auto table = read_csv(ka_csv);
            argmine::stats::AgreementTable at;
            for (const auto& row : table.rows) {
                std::vector<std::optional<int>> cells;
                for (std::size_t i = 0; i < table.header.size(); ++i) {
                    if (i < row.size() && !row[i].empty() && row[i] != "NA") {
                        cells.emplace_back(std::stoi(row[i]));
                    } else {
                        cells.emplace_back(std::nullopt);
                    }
                }
                at.labels.push_back(std::move(cells));
            }
            std::cout << argmine::stats::krippendorff_alpha(at) << '\n';
        } else if (*welch) {
            const auto table = read_csv(wt_csv);
            const auto res = argmine::stats::welch_t_test(numeric_column(table, wt_a),
                                                          numeric_column(table, wt_b));
            std::cout << "t=" << res.t << " df=" << res.df << " p=" << res.p << '\n';
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
