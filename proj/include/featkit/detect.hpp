#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "featkit/error.hpp"
#include "featkit/fast.hpp"
#include "featkit/harris.hpp"
#include "featkit/keypoint.hpp"
#include "featkit/orientation.hpp"

namespace featkit {

/// FAST corners re-scored by the Harris response, then oriented by the
/// intensity centroid. The ORB detection stage, single scale.
inline std::vector<Keypoint> orb_detect(const GrayImage& img, const DetectorConfig& cfg = {}) {
    std::vector<Keypoint> candidates =
        fast_segment_candidates(img, cfg.fast_threshold, cfg.fast_arc);
    const double m = cfg.border_margin;
    std::erase_if(candidates, [&](const Keypoint& kp) {
        return kp.x < m || kp.y < m || kp.x >= img.width - m || kp.y >= img.height - m;
    });
    if (candidates.empty()) return candidates;

    const FloatImage resp = structure_tensor_response(img, cfg, TensorResponse::Harris);
    for (Keypoint& kp : candidates)
        kp.score = resp.at(static_cast<int>(kp.x), static_cast<int>(kp.y));

    std::vector<Keypoint> kept = top_k(nms(std::move(candidates), cfg.nms_radius),
                                       static_cast<std::size_t>(cfg.max_keypoints));
    for (Keypoint& kp : kept) kp.orientation = orient_ic(img, kp);
    return kept;
}

using DetectorFn = std::function<std::vector<Keypoint>(const GrayImage&, const DetectorConfig&)>;

/// Registered detector names are the CLI contract.
inline const std::map<std::string, DetectorFn>& detector_registry() {
    static const std::map<std::string, DetectorFn> registry = {
        {"harris", [](const GrayImage& img, const DetectorConfig& cfg) { return harris(img, cfg); }},
        {"gftt", [](const GrayImage& img, const DetectorConfig& cfg) { return gftt(img, cfg); }},
        {"fast", [](const GrayImage& img, const DetectorConfig& cfg) { return fast(img, cfg); }},
        {"orb", [](const GrayImage& img, const DetectorConfig& cfg) { return orb_detect(img, cfg); }},
    };
    return registry;
}

inline std::string known_detector_names() {
    std::string names;
    for (const auto& [name, fn] : detector_registry()) {
        if (!names.empty()) names += ", ";
        names += name;
    }
    return names;
}

inline const DetectorFn& find_detector(const std::string& name) {
    const auto& registry = detector_registry();
    const auto it = registry.find(name);
    if (it == registry.end())
        raise(ErrorCode::UnknownDetector,
              "unknown detector '" + name + "' (known: " + known_detector_names() + ")");
    return it->second;
}

}  // namespace featkit
