#include "cfunhddc/metrics.hpp"

#include <map>
#include <string>

#include "cfunhddc/errors.hpp"

namespace cfunhddc {

namespace {

using int128 = __int128;

int128 pairs(long long x) { return static_cast<int128>(x) * (x - 1) / 2; }

void check_sizes(const FitResult& result, const LabeledCurves& truth) {
    const std::size_t n = truth.is_outlier.size();
    if (result.labels.size() != n || result.outlier.size() != n ||
        truth.class_label.size() != n) {
        throw MetricError("prediction and reference sizes differ");
    }
}

} // namespace

double ari(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) {
        throw MetricError("partitions have different lengths (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
    }
    if (a.empty()) {
        throw MetricError("partitions are empty");
    }
    const long long n = static_cast<long long>(a.size());

    std::map<int, int> ids_a;
    std::map<int, int> ids_b;
    for (int label : a) {
        ids_a.emplace(label, static_cast<int>(ids_a.size()));
    }
    for (int label : b) {
        ids_b.emplace(label, static_cast<int>(ids_b.size()));
    }
    std::vector<long long> contingency(ids_a.size() * ids_b.size(), 0);
    std::vector<long long> sums_a(ids_a.size(), 0);
    std::vector<long long> sums_b(ids_b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto ra = static_cast<std::size_t>(ids_a.at(a[i]));
        const auto rb = static_cast<std::size_t>(ids_b.at(b[i]));
        ++contingency[ra * ids_b.size() + rb];
        ++sums_a[ra];
        ++sums_b[rb];
    }

    int128 index = 0;
    for (long long cell : contingency) {
        index += pairs(cell);
    }
    int128 pairs_a = 0;
    for (long long row : sums_a) {
        pairs_a += pairs(row);
    }
    int128 pairs_b = 0;
    for (long long col : sums_b) {
        pairs_b += pairs(col);
    }
    const int128 total = pairs(n);

    // Hubert-Arabie adjusted index, scaled by 2 * total to keep everything
    // in exact integer arithmetic until the final division.
    const int128 numerator = 2 * (total * index - pairs_a * pairs_b);
    const int128 denominator = total * (pairs_a + pairs_b) - 2 * pairs_a * pairs_b;
    if (denominator == 0) {
        // Trivially agreeing partitions (single point, both one-cluster,
        // both all-singletons).
        return 1.0;
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

double ari_clustering(const FitResult& result, const LabeledCurves& truth) {
    check_sizes(result, truth);
    std::vector<int> predicted;
    std::vector<int> reference;
    for (std::size_t i = 0; i < truth.is_outlier.size(); ++i) {
        if (!truth.is_outlier[i]) {
            predicted.push_back(result.labels[i]);
            reference.push_back(truth.class_label[i]);
        }
    }
    if (predicted.empty()) {
        throw MetricError("no normal curves to score the clustering on");
    }
    return ari(predicted, reference);
}

double ari_outlier(const FitResult& result, const LabeledCurves& truth) {
    check_sizes(result, truth);
    std::vector<int> predicted(result.outlier.begin(), result.outlier.end());
    std::vector<int> reference(truth.is_outlier.begin(),
                               truth.is_outlier.end());
    return ari(predicted, reference);
}

ConfusionMatrix confusion(const FitResult& result,
                          const LabeledCurves& truth) {
    check_sizes(result, truth);
    ConfusionMatrix counts;
    for (std::size_t i = 0; i < truth.is_outlier.size(); ++i) {
        const bool ref = truth.is_outlier[i] != 0;
        const bool pred = result.outlier[i] != 0;
        if (!ref && !pred) {
            ++counts.tn;
        } else if (!ref && pred) {
            ++counts.fp;
        } else if (ref && !pred) {
            ++counts.fn;
        } else {
            ++counts.tp;
        }
    }
    return counts;
}

} // namespace cfunhddc
