#include "argmine/stats/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "argmine/stats/special.hpp"

namespace argmine::stats {

namespace {

void check_series(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("series lengths differ");
    if (x.size() < 2) throw std::invalid_argument("need at least 2 paired values");
    for (double v : x) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in series");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in series");
    }
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    check_series(x, y);
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::domain_error("pearson undefined for a constant series");
    }
    return sxy / std::sqrt(sxx * syy);
}

double pearson(const PairedSeries& series) {
    return pearson(series.predictions, series.gold);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of 1-based ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_series(x, y);
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

double spearman(const PairedSeries& series) {
    return spearman(series.predictions, series.gold);
}

double macro_f1(std::span<const int> predictions, std::span<const int> gold, int n_classes) {
    if (predictions.size() != gold.size()) {
        throw std::invalid_argument("prediction/gold lengths differ");
    }
    if (predictions.empty()) throw std::invalid_argument("empty label lists");
    int max_label = 0;
    for (int c : predictions) {
        if (c < 0) throw std::invalid_argument("negative class label");
        max_label = std::max(max_label, c);
    }
    for (int c : gold) {
        if (c < 0) throw std::invalid_argument("negative class label");
        max_label = std::max(max_label, c);
    }
    const int k = n_classes > 0 ? n_classes : max_label + 1;
    if (max_label >= k) throw std::invalid_argument("label outside declared class inventory");

    double f1_sum = 0.0;
    for (int c = 0; c < k; ++c) {
        long tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            const bool p = predictions[i] == c;
            const bool g = gold[i] == c;
            if (p && g) ++tp;
            else if (p) ++fp;
            else if (g) ++fn;
        }
        // absent class (no tp and nothing predicted or gold) contributes 0
        const long denom = 2 * tp + fp + fn;
        f1_sum += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    }
    return f1_sum / static_cast<double>(k);
}

double krippendorff_alpha(const AgreementTable& table) {
    if (table.n_annotators() < 2) throw std::invalid_argument("need at least 2 annotators");

    // Collect the label inventory and remap to dense indices.
    std::map<int, int> index_of;
    for (const auto& row : table.labels) {
        if (row.size() != table.n_annotators()) {
            throw std::invalid_argument("ragged agreement table");
        }
        for (const auto& cell : row) {
            if (cell) index_of.emplace(*cell, 0);
        }
    }
    int next = 0;
    for (auto& [label, idx] : index_of) idx = next++;
    const int k = next;
    if (k == 0) throw std::domain_error("agreement table has no labels");

    // Coincidence matrix: each pairable item with m labels contributes
    // 1/(m-1) per ordered label pair from distinct annotators.
    std::vector<std::vector<double>> coincidence(k, std::vector<double>(k, 0.0));
    double n_total = 0.0;
    for (const auto& row : table.labels) {
        std::vector<int> present;
        for (const auto& cell : row) {
            if (cell) present.push_back(index_of.at(*cell));
        }
        const std::size_t m = present.size();
        if (m < 2) continue;  // unpairable item
        const double w = 1.0 / static_cast<double>(m - 1);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                if (a == b) continue;
                coincidence[present[a]][present[b]] += w;
            }
        }
        n_total += static_cast<double>(m);
    }
    if (n_total < 2.0) throw std::domain_error("fewer than 2 pairable values");

    std::vector<double> marginal(k, 0.0);
    double observed_disagreement = 0.0;
    for (int c = 0; c < k; ++c) {
        for (int d = 0; d < k; ++d) {
            marginal[c] += coincidence[c][d];
            if (c != d) observed_disagreement += coincidence[c][d];
        }
    }
    double expected_disagreement = 0.0;
    for (int c = 0; c < k; ++c) {
        for (int d = 0; d < k; ++d) {
            if (c != d) expected_disagreement += marginal[c] * marginal[d];
        }
    }
    expected_disagreement /= (n_total - 1.0);
    if (expected_disagreement == 0.0) return 1.0;  // single label observed everywhere
    return 1.0 - observed_disagreement / expected_disagreement;
}

WelchResult welch_t_test(std::span<const double> group_a, std::span<const double> group_b) {
    if (group_a.size() < 2 || group_b.size() < 2) {
        throw std::invalid_argument("each group needs n >= 2");
    }
    const double na = static_cast<double>(group_a.size());
    const double nb = static_cast<double>(group_b.size());
    const double ma = mean_of(group_a);
    const double mb = mean_of(group_b);
    double va = 0.0, vb = 0.0;
    for (double v : group_a) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
        va += (v - ma) * (v - ma);
    }
    for (double v : group_b) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
        vb += (v - mb) * (v - mb);
    }
    va /= (na - 1.0);
    vb /= (nb - 1.0);
    const double sa = va / na;
    const double sb = vb / nb;
    if (sa + sb == 0.0) {
        if (ma == mb) return WelchResult{0.0, na + nb - 2.0, 1.0};
        throw std::domain_error("welch test degenerate: both groups constant");
    }
    WelchResult r;
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) /
           (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

double combine_pvalues_fisher(std::span<const double> pvalues) {
    if (pvalues.empty()) throw std::invalid_argument("no p-values to combine");
    double statistic = 0.0;
    for (double p : pvalues) {
        if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p-values must be in (0, 1]");
        statistic += -2.0 * std::log(p);
    }
    return chi_squared_sf(statistic, 2.0 * static_cast<double>(pvalues.size()));
}

double combine_pvalues_bonferroni(std::span<const double> pvalues) {
    if (pvalues.empty()) throw std::invalid_argument("no p-values to adjust");
    double min_p = 1.0;
    for (double p : pvalues) {
        if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p-values must be in (0, 1]");
        min_p = std::min(min_p, p);
    }
    return std::min(1.0, min_p * static_cast<double>(pvalues.size()));
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("empty value list");
    MeanStd r;
    r.mean = mean_of(values);
    if (values.size() == 1) {
        r.single = true;
        return r;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return r;
}

}  // namespace argmine::stats
