#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "featkit/dataset.hpp"
#include "featkit/describe.hpp"
#include "featkit/detect.hpp"
#include "featkit/error.hpp"

// Wall-clock cost of detect+describe per image. Decoding is excluded (the
// dataset is already in memory) and runs are strictly serial so measurements
// do not fight each other for cores.

namespace featkit {

struct TimingResult {
    std::string detector;
    std::string descriptor;
    int images_timed = 0;
    int images_excluded = 0;  // images whose pipeline raised an error
    int warmup = 0;
    int passes = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
};

namespace detail {

/// The monotonic clock must resolve 1 ms or better; measure, don't assume.
inline void check_clock_resolution() {
    using clock = std::chrono::steady_clock;
    auto min_tick = clock::duration::max();
    auto prev = clock::now();
    for (int i = 0; i < 1000; ++i) {
        const auto now = clock::now();
        if (now > prev && now - prev < min_tick) min_tick = now - prev;
        prev = now;
    }
    if (min_tick > std::chrono::milliseconds(1))
        raise(ErrorCode::ClockTooCoarse, "steady_clock resolution is coarser than 1 ms");
}

}  // namespace detail

/// Times detect+describe over every image of the dataset: `warmup` unmeasured
/// runs, then the mean of `passes` measured runs per image. `captured`, when
/// given, receives the features of the last pass so callers can check that
/// timing leaves results untouched.
inline TimingResult time_pipeline(const Dataset& ds, const std::string& detector,
                                  const std::string& descriptor, int warmup = 2, int passes = 3,
                                  const DetectorConfig& det_cfg = {},
                                  std::vector<ImageFeatures>* captured = nullptr) {
    if (ds.sequences.empty()) raise(ErrorCode::IoFailure, "time_pipeline: empty dataset");
    if (passes < 1) raise(ErrorCode::IoFailure, "time_pipeline: passes must be >= 1");
    detail::check_clock_resolution();

    const DetectorFn& detect = find_detector(detector);
    const DescriberSpec& spec = find_descriptor(descriptor);
    const SamplingPattern pattern = make_pattern();

    using clock = std::chrono::steady_clock;
    std::vector<double> per_image_ms;
    int excluded = 0;
    for (const Sequence& seq : ds.sequences) {
        for (const GrayImage& img : seq.images) {
            try {
                for (int i = 0; i < warmup; ++i)
                    describe_image(img, detect(img, det_cfg), spec, pattern);
                double total_ms = 0.0;
                ImageFeatures last;
                for (int i = 0; i < passes; ++i) {
                    const auto t0 = clock::now();
                    last = describe_image(img, detect(img, det_cfg), spec, pattern);
                    const auto t1 = clock::now();
                    total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
                }
                per_image_ms.push_back(total_ms / passes);
                if (captured) captured->push_back(std::move(last));
            } catch (const Error&) {
                ++excluded;
            }
        }
    }

    TimingResult r;
    r.detector = detector;
    r.descriptor = descriptor;
    r.images_timed = static_cast<int>(per_image_ms.size());
    r.images_excluded = excluded;
    r.warmup = warmup;
    r.passes = passes;
    if (!per_image_ms.empty()) {
        double sum = 0.0;
        r.min_ms = per_image_ms.front();
        r.max_ms = per_image_ms.front();
        for (double v : per_image_ms) {
            sum += v;
            r.min_ms = std::min(r.min_ms, v);
            r.max_ms = std::max(r.max_ms, v);
        }
        r.mean_ms = sum / per_image_ms.size();
        double acc = 0.0;
        for (double v : per_image_ms) acc += (v - r.mean_ms) * (v - r.mean_ms);
        r.std_ms = per_image_ms.size() > 1
                       ? std::sqrt(acc / static_cast<double>(per_image_ms.size() - 1))
                       : 0.0;
    }
    return r;
}

/// Table-shaped CSV, rows ascending by mean time.
inline std::string timing_csv(std::vector<TimingResult> rows) {
    std::sort(rows.begin(), rows.end(), [](const TimingResult& a, const TimingResult& b) {
        if (a.mean_ms != b.mean_ms) return a.mean_ms < b.mean_ms;
        if (a.detector != b.detector) return a.detector < b.detector;
        return a.descriptor < b.descriptor;
    });
    std::string out =
        "detector,descriptor,mean_ms,std_ms,min_ms,max_ms,images,excluded,warmup,passes\n";
    char buf[64];
    for (const TimingResult& r : rows) {
        out += r.detector + "," + r.descriptor;
        for (double v : {r.mean_ms, r.std_ms, r.min_ms, r.max_ms}) {
            std::snprintf(buf, sizeof buf, ",%.6g", v);
            out += buf;
        }
        out += "," + std::to_string(r.images_timed) + "," + std::to_string(r.images_excluded) +
               "," + std::to_string(r.warmup) + "," + std::to_string(r.passes) + "\n";
    }
    return out;
}

}  // namespace featkit
