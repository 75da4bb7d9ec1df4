#pragma once

#include <vector>

#include "cfunhddc/model.hpp"
#include "cfunhddc/simulate.hpp"

namespace cfunhddc {

// Outlier-detection confusion counts, reference in rows, prediction in
// columns: tn = normal/normal, fp = normal/outlier, fn = outlier/normal,
// tp = outlier/outlier.
struct ConfusionMatrix {
    long long tn = 0;
    long long fp = 0;
    long long fn = 0;
    long long tp = 0;

    long long total() const { return tn + fp + fn + tp; }
};

// Hubert-Arabie Adjusted Rand Index between two labelings. Exact integer
// pair counting (128-bit intermediates, safe for n up to 10^6); a zero
// adjustment denominator (trivially agreeing partitions, single point)
// yields 1.
double ari(const std::vector<int>& a, const std::vector<int>& b);

// ARI of the predicted clustering against the true classes, restricted to
// curves whose true outlier flag is false.
double ari_clustering(const FitResult& result, const LabeledCurves& truth);

// Binary ARI between predicted and true outlier flags over all curves.
double ari_outlier(const FitResult& result, const LabeledCurves& truth);

ConfusionMatrix confusion(const FitResult& result, const LabeledCurves& truth);

} // namespace cfunhddc
