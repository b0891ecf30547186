#include "argmine/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace argmine {

using nlohmann::json;

std::vector<FoldPlan> make_cross_topic_folds(const Corpus& corpus, int n_folds,
                                             std::array<double, 3> ratios, std::uint64_t seed) {
    if (n_folds < 1) throw std::invalid_argument("n_folds must be >= 1");
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("ratios must sum to 1");
    for (double r : ratios) {
        if (r <= 0.0 || r >= 1.0) throw std::invalid_argument("each ratio must be in (0, 1)");
    }

    std::vector<std::string> topics(corpus.topics.begin(), corpus.topics.end());
    const auto n_topics = static_cast<int>(topics.size());
    if (n_topics < 3) {
        throw std::invalid_argument("too few topics (" + std::to_string(n_topics) +
                                    ") for the requested split ratios");
    }
    // floor val/test, remainder to train; every split keeps at least one topic
    const int n_val = std::max(1, static_cast<int>(std::floor(n_topics * ratios[1])));
    const int n_test = std::max(1, static_cast<int>(std::floor(n_topics * ratios[2])));
    const int n_train = n_topics - n_val - n_test;
    if (n_train < 1) {
        throw std::invalid_argument("too few topics (" + std::to_string(n_topics) +
                                    ") for the requested split ratios");
    }

    std::mt19937_64 rng(seed);
    std::vector<FoldPlan> plans;
    plans.reserve(n_folds);
    for (int fold = 0; fold < n_folds; ++fold) {
        std::vector<std::string> shuffled = topics;
        // Fisher-Yates with an explicit bounded draw, so the order depends
        // only on (topics, seed) and not on distribution internals.
        for (int i = n_topics - 1; i > 0; --i) {
            const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
            std::swap(shuffled[i], shuffled[j]);
        }
        FoldPlan plan;
        plan.fold_index = fold;
        plan.ratios = ratios;
        int k = 0;
        for (int i = 0; i < n_train; ++i) plan.train_topics.insert(shuffled[k++]);
        for (int i = 0; i < n_val; ++i) plan.val_topics.insert(shuffled[k++]);
        for (int i = 0; i < n_test; ++i) plan.test_topics.insert(shuffled[k++]);
        plans.push_back(std::move(plan));
    }
    return plans;
}

SplitCorpora assign_split(const Corpus& corpus, const FoldPlan& plan,
                          std::vector<std::string>* warnings) {
    std::vector<LabeledSentence> train, val, test;
    for (const auto& r : corpus.records) {
        if (plan.train_topics.count(r.topic)) train.push_back(r);
        else if (plan.val_topics.count(r.topic)) val.push_back(r);
        else if (plan.test_topics.count(r.topic)) test.push_back(r);
        else throw std::runtime_error("topic not covered by fold plan: " + r.topic);
    }
    if (warnings) {
        if (train.empty()) warnings->push_back("train split is empty");
        if (val.empty()) warnings->push_back("validation split is empty");
        if (test.empty()) warnings->push_back("test split is empty");
    }
    SplitCorpora out;
    out.train = make_corpus(corpus.task, std::move(train));
    out.val = make_corpus(corpus.task, std::move(val));
    out.test = make_corpus(corpus.task, std::move(test));
    return out;
}

int compute_truncation_length(std::vector<int> lengths, double percentile) {
    if (lengths.empty()) throw std::invalid_argument("empty length list");
    if (!(percentile > 0.0) || percentile > 100.0) {
        throw std::invalid_argument("percentile must be in (0, 100]");
    }
    std::sort(lengths.begin(), lengths.end());
    const auto n = static_cast<double>(lengths.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    if (rank < 1) rank = 1;
    return lengths[rank - 1];
}

namespace {

json topics_to_json(const std::set<std::string>& topics) {
    json arr = json::array();
    for (const auto& t : topics) arr.push_back(t);
    return arr;
}

std::set<std::string> topics_from_json(const json& arr) {
    std::set<std::string> out;
    for (const auto& t : arr) out.insert(t.get<std::string>());
    return out;
}

}  // namespace

std::string fold_plans_to_json(const std::vector<FoldPlan>& plans) {
    json arr = json::array();
    for (const auto& p : plans) {
        arr.push_back(json{{"fold_index", p.fold_index},
                           {"ratios", p.ratios},
                           {"train_topics", topics_to_json(p.train_topics)},
                           {"val_topics", topics_to_json(p.val_topics)},
                           {"test_topics", topics_to_json(p.test_topics)}});
    }
    return arr.dump(2);
}

std::vector<FoldPlan> fold_plans_from_json(const std::string& text) {
    const json arr = json::parse(text);
    std::vector<FoldPlan> plans;
    for (const auto& j : arr) {
        FoldPlan p;
        p.fold_index = j.at("fold_index").get<int>();
        const auto r = j.at("ratios");
        p.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
        p.train_topics = topics_from_json(j.at("train_topics"));
        p.val_topics = topics_from_json(j.at("val_topics"));
        p.test_topics = topics_from_json(j.at("test_topics"));
        plans.push_back(std::move(p));
    }
    return plans;
}

void save_fold_plans(const std::vector<FoldPlan>& plans, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write fold plan file: " + path);
    out << fold_plans_to_json(plans) << '\n';
}

std::vector<FoldPlan> load_fold_plans(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fold plan file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fold_plans_from_json(text);
}

}  // namespace argmine
