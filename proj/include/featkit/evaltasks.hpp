#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "featkit/average_precision.hpp"
#include "featkit/dataset.hpp"
#include "featkit/describe.hpp"
#include "featkit/detect.hpp"
#include "featkit/error.hpp"
#include "featkit/feature_io.hpp"
#include "featkit/parallel.hpp"
#include "featkit/rng.hpp"
#include "featkit/version.hpp"

// The three joint detector-descriptor tasks. Per sequence, a random subset
// of reference keypoints is matched into the five target images (and, for
// verification/retrieval, into out-of-sequence distractors); labels come
// from the ground-truth homography: a candidate labels positive exactly
// when it is the closest target keypoint to the projected query.

namespace featkit {

inline constexpr unsigned kTaskVerification = 1u << 0;
inline constexpr unsigned kTaskMatching = 1u << 1;
inline constexpr unsigned kTaskRetrieval = 1u << 2;
inline constexpr unsigned kTaskAll = kTaskVerification | kTaskMatching | kTaskRetrieval;

struct EvalConfig {
    int n_queries = 100;
    int n_distractor_images = 5;     // verification: whole images from other sequences
    int n_distractor_keypoints = 1000;  // retrieval: keypoints from other sequences
    int reps = 5;
    std::uint64_t master_seed = 42;
    int max_keypoints = 500;
    bool strict_zero = false;        // score no-positive units 0 instead of skipping them
    bool retrieval_per_query = false;  // AP per query averaged, instead of one pooled AP
};

struct SequenceFeatures {
    std::array<ImageFeatures, kImagesPerSequence> images;
};

struct DatasetFeatures {
    std::vector<SequenceFeatures> sequences;  // parallel to Dataset::sequences
};

/// Detect + describe every image once; evaluation repetitions reuse this.
inline DatasetFeatures extract_features(const Dataset& ds, const std::string& detector,
                                        const std::string& descriptor,
                                        const DetectorConfig& det_cfg, int threads = 1) {
    const DetectorFn& detect = find_detector(detector);
    const DescriberSpec& spec = find_descriptor(descriptor);
    const SamplingPattern pattern = make_pattern();

    DatasetFeatures out;
    out.sequences.resize(ds.sequences.size());
    const std::size_t n_images = ds.sequences.size() * kImagesPerSequence;
    parallel_for(n_images, threads, [&](std::size_t flat) {
        const std::size_t seq = flat / kImagesPerSequence;
        const std::size_t img = flat % kImagesPerSequence;
        const GrayImage& raster = ds.sequences[seq].images[img];
        out.sequences[seq].images[img] =
            describe_image(raster, detect(raster, det_cfg), spec, pattern);
    });
    return out;
}

/// Ingest externally computed features from <featdir>/<sequence>/<j>.feat.
inline DatasetFeatures load_external_features(const Dataset& ds,
                                              const std::filesystem::path& featdir) {
    DatasetFeatures out;
    out.sequences.resize(ds.sequences.size());
    bool kind_known = false;
    DescriptorKind kind = DescriptorKind::Binary;
    for (std::size_t s = 0; s < ds.sequences.size(); ++s) {
        for (int j = 1; j <= kImagesPerSequence; ++j) {
            const std::filesystem::path path =
                featdir / ds.sequences[s].id / (std::to_string(j) + ".feat");
            ImageFeatures f = load_features(path);
            if (!kind_known) {
                kind = f.kind;
                kind_known = true;
            } else if (f.kind != kind) {
                raise(ErrorCode::IncompatibleDistance,
                      "external features mix binary and float kinds (" + path.string() + ")");
            }
            out.sequences[s].images[j - 1] = std::move(f);
        }
    }
    return out;
}

/// One evaluation tuple plus the provenance the label oracle needs.
struct LabeledTuple {
    Keypoint query;
    Keypoint match;
    double s = 0.0;  // descriptor distance
    int y = 0;       // +1, 0 (retrieval only) or -1
    std::size_t query_index = 0;  // index into the reference image's keypoints
    int target_image = 0;         // 1-based j for in-sequence candidates, 0 otherwise
    bool cross_sequence = false;
};

/// Uniform sample without replacement from the reference keypoints,
/// canonicalized by ascending (y, x). Fewer than n keypoints means all of
/// them; zero keypoints is an error the caller records as a skipped unit.
inline std::vector<std::size_t> sample_queries(const ImageFeatures& ref, int n, Rng& rng) {
    if (ref.size() == 0)
        raise(ErrorCode::EmptyKeypointSet, "sample_queries: reference image has no keypoints");
    std::vector<std::size_t> chosen =
        sample_indices(ref.size(), static_cast<std::size_t>(std::max(n, 0)), rng);
    std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
        const Keypoint& ka = ref.keypoints[a];
        const Keypoint& kb = ref.keypoints[b];
        if (ka.y != kb.y) return ka.y < kb.y;
        if (ka.x != kb.x) return ka.x < kb.x;
        return a < b;
    });
    return chosen;
}

namespace detail {

/// Distance from the projected query to the closest keypoint of `target`.
inline double min_reprojection_distance(const Point& projected, const ImageFeatures& target) {
    double best = std::numeric_limits<double>::infinity();
    for (const Keypoint& kp : target.keypoints)
        best = std::min(best, euclid(projected, {kp.x, kp.y}));
    return best;
}

struct DistractorImageRef {
    std::size_t sequence = 0;
    int image = 0;  // 0-based
};

/// All images outside sequence `self`, in canonical (sequence, image) order.
inline std::vector<DistractorImageRef> other_images(const Dataset& ds, std::size_t self) {
    std::vector<DistractorImageRef> out;
    for (std::size_t p = 0; p < ds.sequences.size(); ++p) {
        if (p == self) continue;
        for (int l = 0; l < kImagesPerSequence; ++l) out.push_back({p, l});
    }
    return out;
}

}  // namespace detail

/// Verification set A_i: per query, the descriptor-nearest keypoint of each
/// in-sequence target image (labelled by reprojection proximity) and of
/// each sampled distractor image (always negative).
inline std::vector<LabeledTuple> verification_set(const Dataset& ds, const DatasetFeatures& feats,
                                                  std::size_t seq_index,
                                                  const std::vector<std::size_t>& queries,
                                                  Rng& distractor_rng, const EvalConfig& cfg,
                                                  int* empty_images = nullptr) {
    const Sequence& seq = ds.sequences[seq_index];
    const SequenceFeatures& sf = feats.sequences[seq_index];
    const ImageFeatures& ref = sf.images[0];

    const std::vector<detail::DistractorImageRef> pool = detail::other_images(ds, seq_index);
    const std::vector<std::size_t> picks = sample_indices(
        pool.size(), static_cast<std::size_t>(std::max(cfg.n_distractor_images, 0)),
        distractor_rng);

    int empties = 0;
    for (int j = 2; j <= kImagesPerSequence; ++j)
        if (sf.images[j - 1].size() == 0) ++empties;
    for (std::size_t pick : picks)
        if (feats.sequences[pool[pick].sequence].images[pool[pick].image].size() == 0) ++empties;
    if (empty_images) *empty_images += empties;

    std::vector<LabeledTuple> tuples;
    tuples.reserve(queries.size() * (kImagesPerSequence - 1 + picks.size()));
    for (std::size_t qi : queries) {
        const Keypoint& q = ref.keypoints[qi];
        const Point qp{q.x, q.y};

        for (int j = 2; j <= kImagesPerSequence; ++j) {
            const ImageFeatures& target = sf.images[j - 1];
            if (target.size() == 0) continue;
            const NearestMatch nn = ref.nearest_in(qi, target);
            const Point projected = project(seq.homographies[j - 1], qp);
            const Keypoint& matched = target.keypoints[nn.index];
            const double d_match = euclid(projected, {matched.x, matched.y});
            const double d_min = detail::min_reprojection_distance(projected, target);
            tuples.push_back({q, matched, nn.distance, d_match <= d_min ? +1 : -1, qi, j, false});
        }
        for (std::size_t pick : picks) {
            const detail::DistractorImageRef& d = pool[pick];
            const ImageFeatures& target = feats.sequences[d.sequence].images[d.image];
            if (target.size() == 0) continue;
            const NearestMatch nn = ref.nearest_in(qi, target);
            tuples.push_back({q, target.keypoints[nn.index], nn.distance, -1, qi, 0, true});
        }
    }
    return tuples;
}

/// Matching set B for the pair (reference, image j): one tuple per query,
/// its descriptor-nearest keypoint in K_ij.
inline std::vector<LabeledTuple> matching_set(const Dataset& ds, const DatasetFeatures& feats,
                                              std::size_t seq_index,
                                              const std::vector<std::size_t>& queries, int j) {
    const Sequence& seq = ds.sequences[seq_index];
    const ImageFeatures& ref = feats.sequences[seq_index].images[0];
    const ImageFeatures& target = feats.sequences[seq_index].images[j - 1];

    std::vector<LabeledTuple> tuples;
    if (target.size() == 0) return tuples;
    tuples.reserve(queries.size());
    for (std::size_t qi : queries) {
        const Keypoint& q = ref.keypoints[qi];
        const NearestMatch nn = ref.nearest_in(qi, target);
        const Point projected = project(seq.homographies[j - 1], {q.x, q.y});
        const Keypoint& matched = target.keypoints[nn.index];
        const double d_match = euclid(projected, {matched.x, matched.y});
        const double d_min = detail::min_reprojection_distance(projected, target);
        tuples.push_back({q, matched, nn.distance, d_match <= d_min ? +1 : -1, qi, j, false});
    }
    return tuples;
}

/// Retrieval set C: per query, every in-sequence target keypoint (positive
/// when reprojection-closest, 0 otherwise) plus a per-sequence draw of
/// distractor keypoints from other sequences (negative). The 0-labelled
/// tuples stay in the returned set; AP excludes them.
inline std::vector<LabeledTuple> retrieval_set(const Dataset& ds, const DatasetFeatures& feats,
                                               std::size_t seq_index,
                                               const std::vector<std::size_t>& queries,
                                               Rng& distractor_rng, const EvalConfig& cfg) {
    const Sequence& seq = ds.sequences[seq_index];
    const SequenceFeatures& sf = feats.sequences[seq_index];
    const ImageFeatures& ref = sf.images[0];

    // Flat canonical pool of out-of-sequence keypoints, sampled once per
    // sequence and shared by every query.
    struct DistractorKeyRef {
        std::size_t sequence;
        int image;
        std::size_t index;
    };
    std::vector<DistractorKeyRef> pool;
    for (const detail::DistractorImageRef& img : detail::other_images(ds, seq_index)) {
        const ImageFeatures& f = feats.sequences[img.sequence].images[img.image];
        for (std::size_t k = 0; k < f.size(); ++k) pool.push_back({img.sequence, img.image, k});
    }
    const std::vector<std::size_t> picks = sample_indices(
        pool.size(), static_cast<std::size_t>(std::max(cfg.n_distractor_keypoints, 0)),
        distractor_rng);

    std::vector<LabeledTuple> tuples;
    tuples.reserve(queries.size() * (picks.size() + 5 * 64));
    for (std::size_t qi : queries) {
        const Keypoint& q = ref.keypoints[qi];
        const Point qp{q.x, q.y};

        for (int j = 2; j <= kImagesPerSequence; ++j) {
            const ImageFeatures& target = sf.images[j - 1];
            if (target.size() == 0) continue;
            const Point projected = project(seq.homographies[j - 1], qp);
            const double d_min = detail::min_reprojection_distance(projected, target);
            for (std::size_t k = 0; k < target.size(); ++k) {
                const Keypoint& cand = target.keypoints[k];
                const double d_cand = euclid(projected, {cand.x, cand.y});
                const int y = d_cand <= d_min ? +1 : 0;
                tuples.push_back({q, cand, ref.distance_to(qi, target, k), y, qi, j, false});
            }
        }
        for (std::size_t pick : picks) {
            const DistractorKeyRef& d = pool[pick];
            const ImageFeatures& f = feats.sequences[d.sequence].images[d.image];
            tuples.push_back(
                {q, f.keypoints[d.index], ref.distance_to(qi, f, d.index), -1, qi, 0, true});
        }
    }
    return tuples;
}

struct TaskResult {
    std::string task;
    std::string split;
    std::vector<double> ap_per_rep;
    double map = 0.0;
    double stddev = 0.0;
    int skipped_units = 0;
};

struct EvalReport {
    std::string detector;
    std::string descriptor;
    EvalConfig config;
    DetectorConfig detector_config;
    std::string dataset_digest;
    std::string version = kVersion;
    std::vector<TaskResult> results;
};

namespace detail {

struct UnitOutcome {
    std::vector<ScoredLabel> verification;  // pooled across sequences later
    int verification_skips = 0;
    std::vector<double> matching_aps;  // one per scored image pair
    int matching_skips = 0;
    std::optional<double> retrieval_ap;
    int retrieval_skips = 0;
};

inline std::vector<ScoredLabel> strip(const std::vector<LabeledTuple>& tuples,
                                      bool drop_zero_labels) {
    std::vector<ScoredLabel> out;
    out.reserve(tuples.size());
    for (const LabeledTuple& t : tuples) {
        if (drop_zero_labels && t.y == 0) continue;
        out.push_back({t.s, t.y});
    }
    return out;
}

inline std::optional<double> retrieval_ap_from_tuples(const std::vector<LabeledTuple>& tuples,
                                                      const std::vector<std::size_t>& queries,
                                                      const EvalConfig& cfg, int* skips) {
    if (!cfg.retrieval_per_query) {
        std::optional<double> ap = average_precision(strip(tuples, true));
        if (!ap && cfg.strict_zero) ap = 0.0;
        if (!ap && skips) ++*skips;
        return ap;
    }
    // Per-query granularity: one AP per query, averaged over the queries
    // that produced a scoreable list.
    double sum = 0.0;
    int scored = 0;
    for (std::size_t qi : queries) {
        std::vector<ScoredLabel> per_query;
        for (const LabeledTuple& t : tuples) {
            if (t.query_index != qi || t.y == 0) continue;
            per_query.push_back({t.s, t.y});
        }
        std::optional<double> ap = average_precision(std::move(per_query));
        if (!ap && cfg.strict_zero) ap = 0.0;
        if (ap) {
            sum += *ap;
            ++scored;
        } else if (skips) {
            ++*skips;
        }
    }
    if (scored == 0) return std::nullopt;
    return sum / scored;
}

inline UnitOutcome evaluate_unit(const Dataset& ds, const DatasetFeatures& feats,
                                 std::size_t seq_index, int rep, const EvalConfig& cfg,
                                 unsigned tasks) {
    UnitOutcome out;
    const std::string& seq_id = ds.sequences[seq_index].id;
    const ImageFeatures& ref = feats.sequences[seq_index].images[0];
    if (ref.size() == 0) {
        // No reference keypoints: the whole sequence sits this rep out.
        if (tasks & kTaskVerification) out.verification_skips = 1;
        if (tasks & kTaskMatching) out.matching_skips = 1;
        if (tasks & kTaskRetrieval) out.retrieval_skips = 1;
        return out;
    }

    Rng query_rng = derive_rng(cfg.master_seed, seq_id, static_cast<std::uint64_t>(rep), "queries");
    const std::vector<std::size_t> queries = sample_queries(ref, cfg.n_queries, query_rng);

    if (tasks & kTaskVerification) {
        Rng rng = derive_rng(cfg.master_seed, seq_id, static_cast<std::uint64_t>(rep),
                             "verification-distractors");
        out.verification = strip(
            verification_set(ds, feats, seq_index, queries, rng, cfg, &out.verification_skips),
            false);
    }
    if (tasks & kTaskMatching) {
        for (int j = 2; j <= kImagesPerSequence; ++j) {
            const std::vector<LabeledTuple> tuples = matching_set(ds, feats, seq_index, queries, j);
            if (tuples.empty()) {  // empty target image
                ++out.matching_skips;
                continue;
            }
            std::optional<double> ap = average_precision(strip(tuples, false));
            if (!ap && cfg.strict_zero) ap = 0.0;
            if (ap)
                out.matching_aps.push_back(*ap);
            else
                ++out.matching_skips;
        }
    }
    if (tasks & kTaskRetrieval) {
        Rng rng = derive_rng(cfg.master_seed, seq_id, static_cast<std::uint64_t>(rep),
                             "retrieval-distractors");
        const std::vector<LabeledTuple> tuples =
            retrieval_set(ds, feats, seq_index, queries, rng, cfg);
        out.retrieval_ap = retrieval_ap_from_tuples(tuples, queries, cfg, &out.retrieval_skips);
    }
    return out;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// Full evaluation over pre-extracted features. Reference keypoints are
/// resampled per repetition; results aggregate per split and as the mean of
/// the two splits. Parallelism cannot change any output byte.
inline EvalReport run_evaluation(const Dataset& ds, const DatasetFeatures& feats,
                                 const EvalConfig& cfg, unsigned tasks = kTaskAll,
                                 int threads = 1) {
    const std::size_t n_seq = ds.sequences.size();
    const std::size_t n_units = n_seq * static_cast<std::size_t>(cfg.reps);
    std::vector<detail::UnitOutcome> outcomes(n_units);
    parallel_for(n_units, threads, [&](std::size_t flat) {
        const std::size_t seq = flat % n_seq;
        const int rep = static_cast<int>(flat / n_seq);
        outcomes[flat] = detail::evaluate_unit(ds, feats, seq, rep, cfg, tasks);
    });

    EvalReport report;
    report.config = cfg;

    const SequenceKind kinds[2] = {SequenceKind::Illumination, SequenceKind::Viewpoint};
    const bool has_kind[2] = {ds.count(kinds[0]) > 0, ds.count(kinds[1]) > 0};

    struct SplitSeries {
        std::vector<std::optional<double>> raw;  // indexed by rep; nullopt = skipped
        int skipped = 0;
    };

    auto emit = [&](const std::string& task, const SplitSeries series[2]) {
        SplitSeries mean_series;
        mean_series.raw.resize(static_cast<std::size_t>(cfg.reps));
        for (int r = 0; r < cfg.reps; ++r) {
            if (has_kind[0] && has_kind[1]) {
                const auto& a = series[0].raw[r];
                const auto& b = series[1].raw[r];
                if (a && b) mean_series.raw[r] = 0.5 * (*a + *b);
            }
        }
        for (int k = 0; k < 2; ++k) {
            if (!has_kind[k]) continue;
            TaskResult tr;
            tr.task = task;
            tr.split = to_string(kinds[k]);
            for (const auto& v : series[k].raw)
                if (v) tr.ap_per_rep.push_back(*v);
            tr.map = detail::mean_of(tr.ap_per_rep);
            tr.stddev = detail::sample_std(tr.ap_per_rep);
            tr.skipped_units = series[k].skipped;
            report.results.push_back(std::move(tr));
        }
        if (has_kind[0] && has_kind[1]) {
            TaskResult tr;
            tr.task = task;
            tr.split = "mean";
            for (const auto& v : mean_series.raw)
                if (v) tr.ap_per_rep.push_back(*v);
            tr.map = detail::mean_of(tr.ap_per_rep);
            tr.stddev = detail::sample_std(tr.ap_per_rep);
            tr.skipped_units = series[0].skipped + series[1].skipped;
            report.results.push_back(std::move(tr));
        }
    };

    auto outcome_at = [&](std::size_t seq, int rep) -> const detail::UnitOutcome& {
        return outcomes[static_cast<std::size_t>(rep) * n_seq + seq];
    };

    if (tasks & kTaskVerification) {
        SplitSeries series[2];
        for (int k = 0; k < 2; ++k) {
            series[k].raw.resize(static_cast<std::size_t>(cfg.reps));
            for (int r = 0; r < cfg.reps; ++r) {
                std::vector<ScoredLabel> pooled;
                for (std::size_t s = 0; s < n_seq; ++s) {
                    if (ds.sequences[s].kind != kinds[k]) continue;
                    const auto& unit = outcome_at(s, r);
                    pooled.insert(pooled.end(), unit.verification.begin(),
                                  unit.verification.end());
                }
                std::optional<double> ap = average_precision(std::move(pooled));
                if (!ap && cfg.strict_zero) ap = 0.0;
                if (!ap) ++series[k].skipped;
                series[k].raw[r] = ap;
            }
            for (std::size_t s = 0; s < n_seq; ++s) {
                if (ds.sequences[s].kind != kinds[k]) continue;
                for (int r = 0; r < cfg.reps; ++r)
                    series[k].skipped += outcome_at(s, r).verification_skips;
            }
        }
        emit("verification", series);
    }
    if (tasks & kTaskMatching) {
        SplitSeries series[2];
        for (int k = 0; k < 2; ++k) {
            series[k].raw.resize(static_cast<std::size_t>(cfg.reps));
            for (int r = 0; r < cfg.reps; ++r) {
                std::vector<double> aps;
                for (std::size_t s = 0; s < n_seq; ++s) {
                    if (ds.sequences[s].kind != kinds[k]) continue;
                    const auto& unit = outcome_at(s, r);
                    aps.insert(aps.end(), unit.matching_aps.begin(), unit.matching_aps.end());
                }
                if (!aps.empty()) series[k].raw[r] = detail::mean_of(aps);
            }
            for (std::size_t s = 0; s < n_seq; ++s) {
                if (ds.sequences[s].kind != kinds[k]) continue;
                for (int r = 0; r < cfg.reps; ++r)
                    series[k].skipped += outcome_at(s, r).matching_skips;
            }
        }
        emit("matching", series);
    }
    if (tasks & kTaskRetrieval) {
        SplitSeries series[2];
        for (int k = 0; k < 2; ++k) {
            series[k].raw.resize(static_cast<std::size_t>(cfg.reps));
            for (int r = 0; r < cfg.reps; ++r) {
                std::vector<double> aps;
                for (std::size_t s = 0; s < n_seq; ++s) {
                    if (ds.sequences[s].kind != kinds[k]) continue;
                    const auto& unit = outcome_at(s, r);
                    if (unit.retrieval_ap) aps.push_back(*unit.retrieval_ap);
                }
                if (!aps.empty()) series[k].raw[r] = detail::mean_of(aps);
            }
            for (std::size_t s = 0; s < n_seq; ++s) {
                if (ds.sequences[s].kind != kinds[k]) continue;
                for (int r = 0; r < cfg.reps; ++r)
                    series[k].skipped += outcome_at(s, r).retrieval_skips;
            }
        }
        emit("retrieval", series);
    }
    return report;
}

/// Convenience wrapper: extract with the registered pipeline, then evaluate.
inline EvalReport run_evaluation(const Dataset& ds, const std::string& detector,
                                 const std::string& descriptor, const EvalConfig& cfg,
                                 unsigned tasks = kTaskAll, int threads = 1) {
    DetectorConfig det_cfg;
    det_cfg.max_keypoints = cfg.max_keypoints;
    const DatasetFeatures feats = extract_features(ds, detector, descriptor, det_cfg, threads);
    EvalReport report = run_evaluation(ds, feats, cfg, tasks, threads);
    report.detector = detector;
    report.descriptor = descriptor;
    report.detector_config = det_cfg;
    report.dataset_digest = dataset_digest(ds);
    return report;
}

inline EvalReport run_evaluation_external(const Dataset& ds,
                                          const std::filesystem::path& featdir,
                                          const EvalConfig& cfg, unsigned tasks = kTaskAll,
                                          int threads = 1) {
    const DatasetFeatures feats = load_external_features(ds, featdir);
    EvalReport report = run_evaluation(ds, feats, cfg, tasks, threads);
    report.detector = "external";
    report.descriptor = "external";
    report.dataset_digest = dataset_digest(ds);
    return report;
}

}  // namespace featkit
