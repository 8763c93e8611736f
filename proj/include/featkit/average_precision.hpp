#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "featkit/error.hpp"

namespace featkit {

/// One scored candidate: descriptor distance and {+1, -1} label.
struct ScoredLabel {
    double distance = 0.0;
    int label = 0;
};

/// Average precision of a ranked list: candidates sorted by ascending
/// distance (stable, so equal distances keep their input order), then the
/// mean of precision@k over the ranks k holding a positive. Returns nullopt
/// when the list has no positives; the caller decides whether that unit is
/// skipped or scored zero.
inline std::optional<double> average_precision(std::vector<ScoredLabel> tuples) {
    std::stable_sort(tuples.begin(), tuples.end(),
                     [](const ScoredLabel& a, const ScoredLabel& b) {
                         return a.distance < b.distance;
                     });
    std::size_t positives_seen = 0;
    double precision_sum = 0.0;
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        if (tuples[k].label > 0) {
            ++positives_seen;
            precision_sum += static_cast<double>(positives_seen) / static_cast<double>(k + 1);
        }
    }
    if (positives_seen == 0) return std::nullopt;
    return precision_sum / static_cast<double>(positives_seen);
}

}  // namespace featkit
