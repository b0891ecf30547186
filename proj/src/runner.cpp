#include "argmine/runner.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "argmine/analysis.hpp"
#include "argmine/baselines.hpp"
#include "argmine/nn/encoder.hpp"
#include "argmine/nn/model.hpp"
#include "argmine/splitting.hpp"
#include "argmine/training.hpp"
#include "argmine/transfer.hpp"

namespace argmine::runner {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::CrossCorpus: return "cross_corpus";
        case ExperimentKind::LeaveOneOut: return "leave_one_out";
        case ExperimentKind::ZeroShot: return "zero_shot";
        case ExperimentKind::MultiTask: return "multi_task";
        case ExperimentKind::EmotionDetect: return "emotion_detect";
        case ExperimentKind::EmotionAnalysis: return "emotion_analysis";
    }
    throw std::logic_error("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "cross_corpus") return ExperimentKind::CrossCorpus;
    if (name == "leave_one_out") return ExperimentKind::LeaveOneOut;
    if (name == "zero_shot") return ExperimentKind::ZeroShot;
    if (name == "multi_task") return ExperimentKind::MultiTask;
    if (name == "emotion_detect") return ExperimentKind::EmotionDetect;
    if (name == "emotion_analysis") return ExperimentKind::EmotionAnalysis;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw std::invalid_argument("config needs at least one seed");
    if (datasets.empty()) throw std::invalid_argument("config needs at least one dataset");
    const double sum = split_ratios[0] + split_ratios[1] + split_ratios[2];
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");
    switch (kind) {
        case ExperimentKind::CrossCorpus:
        case ExperimentKind::LeaveOneOut:
            for (const auto& d : datasets) {
                if (d.task != Task::ArgumentQuality) {
                    throw std::invalid_argument(to_string(kind) +
                                                " requires argument_quality datasets");
                }
            }
            if (kind == ExperimentKind::LeaveOneOut && datasets.size() < 2) {
                throw std::invalid_argument("leave_one_out needs at least 2 datasets");
            }
            break;
        case ExperimentKind::ZeroShot:
        case ExperimentKind::MultiTask: {
            std::set<Task> tasks;
            for (const auto& d : datasets) tasks.insert(d.task);
            if (tasks.size() != datasets.size()) {
                throw std::invalid_argument("one dataset per task required");
            }
            break;
        }
        case ExperimentKind::EmotionDetect:
            for (const auto& d : datasets) {
                if (d.task != Task::EmotionBinary) {
                    throw std::invalid_argument("emotion_detect requires emotion_binary datasets");
                }
            }
            break;
        case ExperimentKind::EmotionAnalysis:
            for (const auto& d : datasets) {
                if (d.task != Task::ArgumentQuality) {
                    throw std::invalid_argument(
                        "emotion_analysis requires argument_quality datasets");
                }
            }
            break;
    }
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["kind"] = to_string(c.kind);
    json ds = json::array();
    for (const auto& d : c.datasets) {
        ds.push_back({{"name", d.name}, {"path", d.path}, {"manifest", d.manifest_path},
                      {"task", to_string(d.task)}});
    }
    j["datasets"] = ds;
    j["preset"] = c.preset;
    j["seeds"] = c.seeds;
    j["out"] = c.out_dir;
    j["encoder"] = {{"hidden_size", c.encoder.hidden_size}, {"num_layers", c.encoder.num_layers},
                    {"vocab_size", c.encoder.vocab_size}, {"max_positions", c.encoder.max_positions},
                    {"seed", c.encoder.seed}};
    j["split"] = {{"ratios", c.split_ratios}, {"seed", c.split_seed}};
    j["strict_manifests"] = c.strict_manifests;
    j["training_overrides"] = c.training_overrides;
    j["classifier"] = {{"kind", c.classifier.kind}, {"lexicon", c.classifier.lexicon_path},
                       {"checkpoint", c.classifier.checkpoint_path}};
    j["lexicon"] = c.lexicon_path;
    return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid config JSON: ") + e.what());
    }
    ExperimentConfig c;
    c.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    for (const auto& d : j.at("datasets")) {
        DatasetSpec spec;
        spec.name = d.at("name").get<std::string>();
        spec.path = d.at("path").get<std::string>();
        spec.manifest_path = d.value("manifest", "");
        spec.task = task_from_string(d.value("task", "argument_quality"));
        c.datasets.push_back(std::move(spec));
    }
    c.preset = j.value("preset", c.preset);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.out_dir = j.value("out", c.out_dir);
    if (j.contains("encoder")) {
        const auto& e = j.at("encoder");
        c.encoder.hidden_size = e.value("hidden_size", c.encoder.hidden_size);
        c.encoder.num_layers = e.value("num_layers", c.encoder.num_layers);
        c.encoder.vocab_size = e.value("vocab_size", c.encoder.vocab_size);
        c.encoder.max_positions = e.value("max_positions", c.encoder.max_positions);
        c.encoder.seed = e.value("seed", c.encoder.seed);
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        if (s.contains("ratios")) {
            const auto r = s.at("ratios");
            c.split_ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
        }
        c.split_seed = s.value("seed", c.split_seed);
    }
    c.strict_manifests = j.value("strict_manifests", false);
    if (j.contains("training_overrides")) {
        c.training_overrides = j.at("training_overrides").get<std::map<std::string, double>>();
    }
    if (j.contains("classifier")) {
        const auto& cl = j.at("classifier");
        c.classifier.kind = cl.value("kind", c.classifier.kind);
        c.classifier.lexicon_path = cl.value("lexicon", "");
        c.classifier.checkpoint_path = cl.value("checkpoint", "");
    }
    c.lexicon_path = j.value("lexicon", "");
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_experiment_config(text);
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string canonical = config_to_json(config).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

stats::MeanStd aggregate_seeds(const std::vector<double>& per_seed_values) {
    return stats::mean_std(per_seed_values);
}

std::string cache_directory() {
    if (const char* env = std::getenv("ARGMINE_CACHE_DIR")) return env;
    return ".argmine-cache";
}

namespace {

struct LoadedDataset {
    DatasetSpec spec;
    Corpus corpus;
    SplitCorpora splits;
};

training::TrainConfig build_train_config(const ExperimentConfig& config, std::uint64_t seed) {
    training::TrainConfig cfg = training::resolve_preset(config.preset);
    cfg.seed = seed;
    for (const auto& [key, value] : config.training_overrides) {
        if (key == "learning_rate") cfg.learning_rate = value;
        else if (key == "weight_decay") cfg.weight_decay = value;
        else if (key == "batch_size") cfg.batch_size = static_cast<int>(value);
        else if (key == "dropout") cfg.dropout = value;
        else if (key == "patience") cfg.patience = static_cast<int>(value);
        else if (key == "eval_frequency") cfg.eval_frequency = static_cast<int>(value);
        else if (key == "warmup_fraction") cfg.warmup_fraction = value;
        else if (key == "max_epochs") cfg.max_epochs = static_cast<int>(value);
        else if (key == "max_sequence_length") cfg.max_sequence_length = static_cast<int>(value);
        else throw std::invalid_argument("unknown training override: " + key);
    }
    cfg.validate();
    return cfg;
}

double truncation_percentile_for_preset(const std::string& preset) {
    const std::string stem = fs::path(preset).stem().string();  // preset files keep their name
    if (stem == "generalization") return 95.0;
    if (stem == "zero_shot") return 99.0;
    return 99.5;
}

std::vector<LoadedDataset> load_datasets(const ExperimentConfig& config,
                                         std::vector<std::string>* warnings) {
    std::vector<LoadedDataset> out;
    for (const auto& spec : config.datasets) {
        DatasetManifest manifest;
        if (!spec.manifest_path.empty()) {
            manifest = load_manifest(spec.manifest_path);
        } else {
            manifest.name = spec.name;
        }
        LoadedDataset d;
        d.spec = spec;
        d.corpus = load_corpus(spec.path, manifest, spec.task, config.strict_manifests, warnings);
        FoldPlan plan = make_cross_topic_folds(d.corpus, 1, config.split_ratios,
                                               config.split_seed)[0];
        d.splits = assign_split(d.corpus, plan, warnings);
        out.push_back(std::move(d));
    }
    return out;
}

int truncation_from_validation(const std::vector<const Corpus*>& vals, const std::string& preset,
                               int cap) {
    std::vector<int> lengths;
    for (const Corpus* val : vals) {
        for (const auto& r : val->records) {
            lengths.push_back(static_cast<int>(nn::Tokenizer::split_tokens(r.text).size()) + 1 +
                              static_cast<int>(nn::Tokenizer::split_tokens(r.topic).size()));
        }
    }
    if (lengths.empty()) return cap;
    const int p = compute_truncation_length(lengths, truncation_percentile_for_preset(preset));
    return std::clamp(p, 1, cap);
}

nn::MultiTaskModel fresh_model(const ExperimentConfig& config, std::uint64_t seed,
                               const std::vector<Task>& tasks, double dropout) {
    nn::TinyEncoderConfig enc;
    enc.hidden_size = config.encoder.hidden_size;
    enc.num_layers = config.encoder.num_layers;
    enc.vocab_size = config.encoder.vocab_size;
    enc.max_positions = config.encoder.max_positions;
    enc.seed = config.encoder.seed ^ (seed * 0x9e3779b97f4a7c15ull);
    nn::MultiTaskModel model(std::make_shared<nn::TinyTransformerEncoder>(enc));
    std::uint64_t head_seed = enc.seed + 101;
    for (Task task : tasks) model.register_task(task, dropout, head_seed++);
    return model;
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(10) << v;
    return ss.str();
}

void write_results_csv(const std::string& path, const std::vector<ExperimentResult>& results,
                       const std::string& hash, const std::vector<std::uint64_t>& seeds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write results csv: " + path);
    std::ostringstream seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i) seed_list << ' ';
        seed_list << seeds[i];
    }
    out << "kind,train_source,eval_target,task,metric,mean,std,n_seeds,seeds,config_hash\n";
    for (const auto& r : results) {
        out << to_string(r.kind) << ',' << r.train_source << ',' << r.eval_target << ','
            << r.task << ',' << r.metric << ',' << format_double(r.mean) << ','
            << format_double(r.std) << ',' << r.per_seed.size() << ',' << seed_list.str() << ','
            << hash << '\n';
    }
}

void write_per_seed_csv(const std::string& path, const std::vector<ExperimentResult>& results,
                        const std::vector<std::uint64_t>& seeds) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write per-seed csv: " + path);
    out << "train_source,eval_target,task,metric,seed,value\n";
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.per_seed.size(); ++i) {
            out << r.train_source << ',' << r.eval_target << ',' << r.task << ',' << r.metric
                << ',' << (i < seeds.size() ? std::to_string(seeds[i]) : "-") << ','
                << format_double(r.per_seed[i]) << '\n';
        }
    }
}

ExperimentResult finalize_result(ExperimentKind kind, std::string train_source,
                                 std::string eval_target, std::string task, std::string metric,
                                 std::vector<double> per_seed) {
    ExperimentResult r;
    r.kind = kind;
    r.train_source = std::move(train_source);
    r.eval_target = std::move(eval_target);
    r.task = std::move(task);
    r.metric = std::move(metric);
    const auto agg = stats::mean_std(per_seed);
    r.per_seed = std::move(per_seed);
    r.mean = agg.mean;
    r.std = agg.std;
    return r;
}

std::vector<double> gold_scores(const Corpus& corpus) {
    std::vector<double> out;
    for (const auto& r : corpus.records) out.push_back(std::get<ScoreLabel>(r.label).value);
    return out;
}

// --- experiment bodies ------------------------------------------------------

std::vector<ExperimentResult> run_cross_corpus(const ExperimentConfig& config,
                                               std::vector<LoadedDataset>& data,
                                               const fs::path& run_dir) {
    std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
    for (std::uint64_t seed : config.seeds) {
        const auto cfg0 = build_train_config(config, seed);
        for (auto& train_ds : data) {
            auto cfg = cfg0;
            cfg.max_sequence_length = truncation_from_validation(
                {&train_ds.splits.val}, config.preset, cfg.max_sequence_length);
            auto model = fresh_model(config, seed, {Task::ArgumentQuality}, cfg.dropout);
            const auto log = training::train_single_task(model, train_ds.splits.train,
                                                         train_ds.splits.val, cfg);
            log.save_csv((run_dir / ("train-" + train_ds.spec.name + "-seed" +
                                     std::to_string(seed) + ".csv")).string());
            for (const auto& eval_ds : data) {
                const auto preds = training::predict_scores(model, Task::ArgumentQuality,
                                                            eval_ds.splits.test,
                                                            cfg.max_sequence_length);
                cells[{train_ds.spec.name, eval_ds.spec.name}].push_back(
                    stats::pearson(preds, gold_scores(eval_ds.splits.test)));
            }
        }
    }
    std::vector<ExperimentResult> results;
    for (auto& [key, values] : cells) {
        results.push_back(finalize_result(config.kind, key.first, key.second,
                                          "argument_quality", "pearson", std::move(values)));
    }
    return results;
}

std::vector<ExperimentResult> run_leave_one_out(const ExperimentConfig& config,
                                                std::vector<LoadedDataset>& data,
                                                const fs::path& run_dir) {
    // Bookkeeping: union sizes over full corpora, with reference-value notes.
    {
        std::vector<std::pair<std::string, long>> sizes;
        for (const auto& d : data) {
            sizes.emplace_back(d.spec.name, static_cast<long>(d.corpus.size()));
        }
        std::ofstream out(run_dir / "leave_one_out_sizes.csv");
        out << "leave_out,computed_size,published_size,note\n";
        for (const auto& row : leave_one_out_size_report(sizes)) {
            out << row.leave_out << ',' << row.computed << ','
                << (row.published ? std::to_string(*row.published) : "-") << ',' << row.note
                << '\n';
        }
    }

    std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
    for (std::uint64_t seed : config.seeds) {
        const auto cfg0 = build_train_config(config, seed);
        for (const auto& left_out : data) {
            std::vector<std::pair<Corpus, double>> trains;
            std::vector<const Corpus*> vals;
            std::vector<Corpus> val_store;
            for (const auto& d : data) {
                if (d.spec.name == left_out.spec.name) continue;
                trains.emplace_back(d.splits.train, 1.0);
                val_store.push_back(d.splits.val);
            }
            // validation = union of the training datasets' validation splits
            std::vector<LabeledSentence> val_records;
            for (const auto& v : val_store) {
                for (const auto& r : v.records) {
                    LabeledSentence copy = r;
                    copy.id = r.dataset + "/" + r.id;
                    val_records.push_back(std::move(copy));
                }
            }
            Corpus val = make_corpus(Task::ArgumentQuality, std::move(val_records));
            for (const auto& v : val_store) vals.push_back(&v);

            auto cfg = cfg0;
            cfg.max_sequence_length = truncation_from_validation(vals, config.preset,
                                                                 cfg.max_sequence_length);
            auto model = fresh_model(config, seed, {Task::ArgumentQuality}, cfg.dropout);
            const auto log = training::train_multi_dataset(model, trains, val, cfg);
            log.save_csv((run_dir / ("loo-" + left_out.spec.name + "-seed" +
                                     std::to_string(seed) + ".csv")).string());
            for (const auto& eval_ds : data) {
                const auto preds = training::predict_scores(model, Task::ArgumentQuality,
                                                            eval_ds.splits.test,
                                                            cfg.max_sequence_length);
                cells[{"all_except_" + left_out.spec.name, eval_ds.spec.name}].push_back(
                    stats::pearson(preds, gold_scores(eval_ds.splits.test)));
            }
        }
    }
    std::vector<ExperimentResult> results;
    for (auto& [key, values] : cells) {
        results.push_back(finalize_result(config.kind, key.first, key.second,
                                          "argument_quality", "pearson", std::move(values)));
    }
    return results;
}

std::vector<ExperimentResult> run_zero_shot(const ExperimentConfig& config,
                                            std::vector<LoadedDataset>& data,
                                            const fs::path& run_dir) {
    const LoadedDataset* ai = nullptr;
    for (const auto& d : data) {
        if (d.spec.task == Task::ArgumentIdentification) ai = &d;
    }

    std::map<std::pair<Task, Task>, std::vector<double>> cells;
    std::map<std::pair<Task, Task>, std::string> metrics;
    for (std::uint64_t seed : config.seeds) {
        std::map<Task, std::unique_ptr<nn::MultiTaskModel>> models;
        std::map<Task, Corpus> test_sets;
        auto cfg = build_train_config(config, seed);
        std::vector<const Corpus*> vals;
        for (const auto& d : data) vals.push_back(&d.splits.val);
        cfg.max_sequence_length = truncation_from_validation(vals, config.preset,
                                                             cfg.max_sequence_length);
        for (auto& d : data) {
            auto task_cfg = cfg;
            task_cfg.early_stopping_metric = is_regression_task(d.spec.task)
                                                 ? training::EarlyStoppingMetric::ValidationMSE
                                                 : training::EarlyStoppingMetric::ValidationCrossEntropy;
            auto model = std::make_unique<nn::MultiTaskModel>(
                fresh_model(config, seed, {d.spec.task}, task_cfg.dropout));
            const auto log = training::train_single_task(*model, d.splits.train, d.splits.val,
                                                         task_cfg);
            log.save_csv((run_dir / ("zs-" + to_string(d.spec.task) + "-seed" +
                                     std::to_string(seed) + ".csv")).string());
            models[d.spec.task] = std::move(model);
            test_sets[d.spec.task] = d.splits.test;
        }
        std::map<Task, nn::MultiTaskModel*> model_ptrs;
        for (auto& [task, model] : models) model_ptrs[task] = model.get();
        const Corpus& calibration = ai != nullptr ? ai->splits.val : data.front().splits.val;
        const auto matrix = transfer::evaluate_transfer_matrix(model_ptrs, test_sets, calibration,
                                                               cfg.max_sequence_length);
        for (const auto& cell : matrix) {
            cells[{cell.source, cell.target}].push_back(cell.value);
            metrics[{cell.source, cell.target}] = cell.metric;
        }
    }
    transfer::write_transfer_csv((run_dir / "transfer_matrix.csv").string(), cells, metrics);
    std::vector<ExperimentResult> results;
    for (auto& [key, values] : cells) {
        results.push_back(finalize_result(config.kind, to_string(key.first), to_string(key.second),
                                          to_string(key.second), metrics.at(key),
                                          std::move(values)));
    }
    return results;
}

std::vector<ExperimentResult> run_multi_task(const ExperimentConfig& config,
                                             std::vector<LoadedDataset>& data,
                                             const fs::path& run_dir) {
    std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
    std::map<std::pair<std::string, std::string>, std::string> metric_names;
    for (std::uint64_t seed : config.seeds) {
        auto cfg = build_train_config(config, seed);
        std::vector<const Corpus*> vals;
        for (const auto& d : data) vals.push_back(&d.splits.val);
        cfg.max_sequence_length = truncation_from_validation(vals, config.preset,
                                                             cfg.max_sequence_length);
        std::vector<Task> tasks;
        std::map<Task, std::pair<Corpus, Corpus>> task_corpora;
        for (const auto& d : data) {
            tasks.push_back(d.spec.task);
            task_corpora[d.spec.task] = {d.splits.train, d.splits.val};
        }
        auto model = fresh_model(config, seed, tasks, cfg.dropout);
        const auto log = training::train_multi_task(model, task_corpora, cfg);
        log.combined.save_csv((run_dir / ("mt-combined-seed" + std::to_string(seed) + ".csv")).string());
        // one validation curve per task
        {
            std::ofstream out(run_dir / ("mt-per-task-val-seed" + std::to_string(seed) + ".csv"));
            out << "task,eval_index,val_metric\n";
            for (const auto& [task, curve] : log.per_task_val) {
                for (std::size_t i = 0; i < curve.size(); ++i) {
                    out << to_string(task) << ',' << i << ',' << format_double(curve[i]) << '\n';
                }
            }
        }
        for (const auto& d : data) {
            const std::string target = to_string(d.spec.task);
            if (is_regression_task(d.spec.task)) {
                const auto preds = training::predict_scores(model, d.spec.task, d.splits.test,
                                                            cfg.max_sequence_length);
                cells[{"multi_task", target}].push_back(
                    stats::spearman(preds, gold_scores(d.splits.test)));
                metric_names[{"multi_task", target}] = "spearman";
            } else {
                std::vector<int> preds, gold;
                for (const auto& probs : training::predict_class_probs(model, d.spec.task,
                                                                       d.splits.test,
                                                                       cfg.max_sequence_length)) {
                    preds.push_back(probs[0] >= probs[1] ? 0 : 1);
                }
                for (const auto& r : d.splits.test.records) {
                    if (d.spec.task == Task::ArgumentIdentification) {
                        gold.push_back(static_cast<int>(std::get<ArgClass>(r.label)));
                    } else {
                        gold.push_back(static_cast<int>(std::get<EmotionLabel>(r.label)));
                    }
                }
                cells[{"multi_task", target}].push_back(stats::macro_f1(preds, gold, 2));
                metric_names[{"multi_task", target}] = "macro_f1";
            }
        }
    }
    std::vector<ExperimentResult> results;
    for (auto& [key, values] : cells) {
        results.push_back(finalize_result(config.kind, key.first, key.second, key.second,
                                          metric_names.at(key), std::move(values)));
    }
    return results;
}

std::vector<ExperimentResult> run_emotion_detect(const ExperimentConfig& config,
                                                 std::vector<LoadedDataset>& data,
                                                 const fs::path& run_dir) {
    std::vector<ExperimentResult> results;
    for (auto& d : data) {
        std::vector<int> gold_test, gold_full;
        std::vector<EmotionLabel> train_labels;
        for (const auto& r : d.splits.train.records) {
            train_labels.push_back(std::get<EmotionLabel>(r.label));
        }
        for (const auto& r : d.splits.test.records) {
            gold_test.push_back(static_cast<int>(std::get<EmotionLabel>(r.label)));
        }
        for (const auto& r : d.corpus.records) {
            gold_full.push_back(static_cast<int>(std::get<EmotionLabel>(r.label)));
        }

        auto eval_labeler = [&](const std::function<EmotionLabel(const std::string&)>& labeler,
                                const std::string& name) {
            std::vector<int> preds_test, preds_full;
            for (const auto& r : d.splits.test.records) {
                preds_test.push_back(static_cast<int>(labeler(r.text)));
            }
            for (const auto& r : d.corpus.records) {
                preds_full.push_back(static_cast<int>(labeler(r.text)));
            }
            results.push_back(finalize_result(config.kind, name, d.spec.name + "/test",
                                              "emotion_binary", "macro_f1",
                                              {stats::macro_f1(preds_test, gold_test, 2)}));
            results.push_back(finalize_result(config.kind, name, d.spec.name + "/full",
                                              "emotion_binary", "macro_f1",
                                              {stats::macro_f1(preds_full, gold_full, 2)}));
        };

        const baselines::MajorityBaseline majority(train_labels);
        eval_labeler([&](const std::string& t) { return majority.predict(t); }, "majority");
        eval_labeler(baselines::pronoun_baseline, "pronoun");
        if (!config.lexicon_path.empty()) {
            const auto lexicon = baselines::load_nrc_lexicon(config.lexicon_path);
            eval_labeler([&](const std::string& t) { return baselines::nrc_baseline(t, lexicon); },
                         "nrc");
        }

        std::vector<double> model_test, model_full;
        for (std::uint64_t seed : config.seeds) {
            auto cfg = build_train_config(config, seed);
            cfg.early_stopping_metric = training::EarlyStoppingMetric::ValidationCrossEntropy;
            cfg.max_sequence_length = truncation_from_validation({&d.splits.val}, config.preset,
                                                                 cfg.max_sequence_length);
            auto model = fresh_model(config, seed, {Task::EmotionBinary}, cfg.dropout);
            const auto log = training::train_single_task(model, d.splits.train, d.splits.val, cfg);
            log.save_csv((run_dir / ("emotion-" + d.spec.name + "-seed" + std::to_string(seed) +
                                     ".csv")).string());
            training::save_checkpoint(model,
                                      (run_dir / ("emotion-" + d.spec.name + "-seed" +
                                                  std::to_string(seed) + ".ckpt.json")).string());
            auto classify = [&](const Corpus& corpus) {
                std::vector<int> preds;
                for (const auto& probs : training::predict_class_probs(model, Task::EmotionBinary,
                                                                       corpus,
                                                                       cfg.max_sequence_length)) {
                    preds.push_back(probs[0] >= probs[1] ? 0 : 1);  // 0 = emotional
                }
                return preds;
            };
            model_test.push_back(stats::macro_f1(classify(d.splits.test), gold_test, 2));
            model_full.push_back(stats::macro_f1(classify(d.corpus), gold_full, 2));
        }
        results.push_back(finalize_result(config.kind, "model", d.spec.name + "/test",
                                          "emotion_binary", "macro_f1", std::move(model_test)));
        results.push_back(finalize_result(config.kind, "model", d.spec.name + "/full",
                                          "emotion_binary", "macro_f1", std::move(model_full)));

        // Human performance when per-annotator labels are available.
        bool has_annotations = !d.corpus.records.empty();
        std::size_t n_annotators = 0;
        for (const auto& r : d.corpus.records) {
            if (r.annotations.empty()) { has_annotations = false; break; }
            if (n_annotators == 0) n_annotators = r.annotations.size();
        }
        if (has_annotations && n_annotators >= 3) {
            stats::AgreementTable table;
            for (const auto& r : d.corpus.records) {
                std::vector<std::optional<int>> row;
                for (EmotionLabel a : r.annotations) row.emplace_back(static_cast<int>(a));
                table.labels.push_back(std::move(row));
            }
            const auto hp = baselines::human_performance(table);
            ExperimentResult r;
            r.kind = config.kind;
            r.train_source = "human";
            r.eval_target = d.spec.name + "/full";
            r.task = "emotion_binary";
            r.metric = "macro_f1";
            r.per_seed = hp.per_annotator;
            r.mean = hp.mean_macro_f1;
            r.std = hp.std_macro_f1;
            results.push_back(std::move(r));
        }
    }
    return results;
}

analysis::EmotionScorer build_scorer(const ExperimentConfig& config,
                                     std::vector<std::unique_ptr<nn::MultiTaskModel>>& keep_alive) {
    const auto& spec = config.classifier;
    if (spec.kind == "pronoun") {
        return analysis::scorer_from_labeler(baselines::pronoun_baseline);
    }
    if (spec.kind == "nrc") {
        if (spec.lexicon_path.empty()) {
            throw std::invalid_argument("nrc classifier requires a lexicon path");
        }
        auto lexicon = baselines::load_nrc_lexicon(spec.lexicon_path);
        return analysis::scorer_from_labeler(
            [lexicon](const std::string& t) { return baselines::nrc_baseline(t, lexicon); });
    }
    if (spec.kind == "annotation") {
        return [](const LabeledSentence& r) -> std::array<double, 2> {
            if (r.annotations.empty()) {
                throw std::runtime_error("record " + r.id + " has no gold emotion annotations");
            }
            int emotional = 0;
            for (EmotionLabel a : r.annotations) {
                if (a == EmotionLabel::Emotional) ++emotional;
            }
            const double frac = static_cast<double>(emotional) /
                                static_cast<double>(r.annotations.size());
            return {frac, 1.0 - frac};
        };
    }
    if (spec.kind == "checkpoint") {
        if (spec.checkpoint_path.empty()) {
            throw std::invalid_argument("checkpoint classifier requires a path");
        }
        auto model = std::make_unique<nn::MultiTaskModel>(
            fresh_model(config, config.seeds.front(), {Task::EmotionBinary}, 0.1));
        training::load_checkpoint(*model, spec.checkpoint_path);
        nn::MultiTaskModel* raw = model.get();
        keep_alive.push_back(std::move(model));
        const int max_len = 64;
        return [raw, max_len](const LabeledSentence& r) -> std::array<double, 2> {
            nn::PairInput input{r.text, r.topic, max_len};
            const auto out = raw->forward(input, Task::EmotionBinary, false);
            return {out.class_probs->value(0, 0), out.class_probs->value(0, 1)};
        };
    }
    throw std::invalid_argument("unknown classifier kind: " + spec.kind);
}

std::vector<ExperimentResult> run_emotion_analysis(const ExperimentConfig& config,
                                                   std::vector<LoadedDataset>& data,
                                                   const fs::path& run_dir) {
    std::vector<std::unique_ptr<nn::MultiTaskModel>> keep_alive;
    const auto scorer = build_scorer(config, keep_alive);
    std::vector<analysis::GroupedQuality> grouped;
    for (const auto& d : data) {
        const auto predictions = analysis::predict_emotions(d.corpus, scorer);
        grouped.push_back(analysis::group_quality_by_emotion(d.corpus, predictions,
                                                             config.classifier.kind));
    }
    const auto report = analysis::significance_report(grouped);
    analysis::write_grouped_quality_csv(grouped, (run_dir / "grouped_quality.csv").string());
    analysis::write_significance_csv(report, (run_dir / "significance.csv").string());

    std::vector<ExperimentResult> results;
    for (std::size_t i = 0; i < grouped.size(); ++i) {
        const auto& row = report.rows[i];
        ExperimentResult r;
        r.kind = config.kind;
        r.train_source = row.model_name;
        r.eval_target = row.dataset;
        r.task = "emotion_vs_quality";
        r.metric = "welch_p";
        if (row.defined) {
            r.per_seed = {row.p};
            r.mean = row.p;
        } else {
            r.per_seed = {};
            r.mean = std::numeric_limits<double>::quiet_NaN();
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace

std::vector<LeaveOneOutSizeRow> leave_one_out_size_report(
    const std::vector<std::pair<std::string, long>>& dataset_sizes) {
    // Published union sizes for the four canonical AQ corpora; computed sums
    // are reported as-is and divergences from the reference table are noted.
    static const std::map<std::string, long> published_sizes = {
        {"UKPConvArgRank", 41172},
        {"SwanRank", 36849},
        {"IBM-ArgQ", 36924},
        {"IBM-Rank-30k", 12224},
    };
    std::vector<LeaveOneOutSizeRow> rows;
    for (const auto& [name, size] : dataset_sizes) {
        LeaveOneOutSizeRow row;
        row.leave_out = name;
        for (const auto& [other, other_size] : dataset_sizes) {
            if (other != name) row.computed += other_size;
        }
        const auto it = published_sizes.find(name);
        if (it != published_sizes.end()) {
            row.published = it->second;
            if (*row.published != row.computed) {
                row.note = "computed sum " + std::to_string(row.computed) +
                           " differs from published table value " +
                           std::to_string(*row.published);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::string hash = config_hash(config);
    const fs::path run_dir = fs::path(config.out_dir) / (to_string(config.kind) + "-" + hash);
    fs::create_directories(run_dir);

    std::vector<std::string> warnings;
    std::vector<LoadedDataset> data = load_datasets(config, &warnings);
    if (!warnings.empty()) {
        std::ofstream out(run_dir / "warnings.log");
        for (const auto& w : warnings) out << w << '\n';
    }
    {
        std::ofstream out(run_dir / "config.json");
        out << config_to_json(config).dump(2) << '\n';
    }

    std::vector<ExperimentResult> results;
    switch (config.kind) {
        case ExperimentKind::CrossCorpus: results = run_cross_corpus(config, data, run_dir); break;
        case ExperimentKind::LeaveOneOut: results = run_leave_one_out(config, data, run_dir); break;
        case ExperimentKind::ZeroShot: results = run_zero_shot(config, data, run_dir); break;
        case ExperimentKind::MultiTask: results = run_multi_task(config, data, run_dir); break;
        case ExperimentKind::EmotionDetect: results = run_emotion_detect(config, data, run_dir); break;
        case ExperimentKind::EmotionAnalysis:
            results = run_emotion_analysis(config, data, run_dir);
            break;
    }
    write_results_csv((run_dir / "results.csv").string(), results, hash, config.seeds);
    write_per_seed_csv((run_dir / "per_seed.csv").string(), results, config.seeds);
    return results;
}

}  // namespace argmine::runner
