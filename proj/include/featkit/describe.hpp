#pragma once

#include <map>
#include <string>
#include <vector>

#include "featkit/brief.hpp"
#include "featkit/descriptor.hpp"
#include "featkit/error.hpp"
#include "featkit/image.hpp"
#include "featkit/keypoint.hpp"
#include "featkit/patch.hpp"

namespace featkit {

enum class DescriptorKind { Binary, Float };

inline const char* to_string(DescriptorKind kind) {
    return kind == DescriptorKind::Binary ? "binary" : "float";
}

/// Keypoints of one image plus their descriptors (one vector populated,
/// matching `kind`).
struct ImageFeatures {
    std::vector<Keypoint> keypoints;
    DescriptorKind kind = DescriptorKind::Binary;
    std::vector<BinaryDescriptor> binary;
    std::vector<FloatDescriptor> floats;

    std::size_t size() const { return keypoints.size(); }

    double distance_to(std::size_t own, const ImageFeatures& other, std::size_t theirs) const {
        if (kind != other.kind)
            raise(ErrorCode::IncompatibleDistance, "descriptor kinds differ between images");
        if (kind == DescriptorKind::Binary)
            return static_cast<double>(hamming(binary[own], other.binary[theirs]));
        return euclidean(floats[own], other.floats[theirs]);
    }

    /// Nearest neighbour of this image's keypoint `own` among `other`'s
    /// descriptors; ties go to the lowest index.
    NearestMatch nearest_in(std::size_t own, const ImageFeatures& other) const {
        if (other.size() == 0)
            raise(ErrorCode::EmptyCandidateSet, "nearest_in: empty candidate set");
        NearestMatch best{0, distance_to(own, other, 0)};
        for (std::size_t i = 1; i < other.size(); ++i) {
            const double d = distance_to(own, other, i);
            if (d < best.distance) best = {i, d};
        }
        return best;
    }
};

struct DescriberSpec {
    std::string name;
    DescriptorKind kind = DescriptorKind::Binary;
    bool needs_smoothing = false;  // BRIEF-family tests run on the blurred image
    bool steered = false;          // rotate the pattern by the keypoint orientation
};

inline const std::map<std::string, DescriberSpec>& descriptor_registry() {
    static const std::map<std::string, DescriberSpec> registry = {
        {"brief", {"brief", DescriptorKind::Binary, true, false}},
        {"orb", {"orb", DescriptorKind::Binary, true, true}},
        {"patch", {"patch", DescriptorKind::Float, false, false}},
    };
    return registry;
}

inline std::string known_descriptor_names() {
    std::string names;
    for (const auto& [name, spec] : descriptor_registry()) {
        if (!names.empty()) names += ", ";
        names += name;
    }
    return names;
}

inline const DescriberSpec& find_descriptor(const std::string& name) {
    const auto& registry = descriptor_registry();
    const auto it = registry.find(name);
    if (it == registry.end())
        raise(ErrorCode::UnknownDescriptor,
              "unknown descriptor '" + name + "' (known: " + known_descriptor_names() + ")");
    return it->second;
}

/// Describe every keypoint of one image. Smoothing happens once here, not
/// per keypoint.
inline ImageFeatures describe_image(const GrayImage& img, std::vector<Keypoint> keypoints,
                                    const DescriberSpec& spec, const SamplingPattern& pattern) {
    ImageFeatures out;
    out.kind = spec.kind;
    out.keypoints = std::move(keypoints);
    if (spec.kind == DescriptorKind::Binary) {
        const FloatImage smoothed = smooth_for_brief(img);
        out.binary.reserve(out.keypoints.size());
        for (const Keypoint& kp : out.keypoints)
            out.binary.push_back(spec.steered ? steered_brief(smoothed, kp, pattern)
                                              : brief(smoothed, kp, pattern));
    } else {
        out.floats.reserve(out.keypoints.size());
        for (const Keypoint& kp : out.keypoints) out.floats.push_back(patch_descriptor(img, kp));
    }
    return out;
}

}  // namespace featkit
