#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "featkit/error.hpp"
#include "featkit/homography.hpp"
#include "featkit/image.hpp"
#include "featkit/netpbm.hpp"
#include "featkit/rng.hpp"

// Homography-sequence dataset layout: one directory per sequence holding
// images 1..6 (1 is the reference) and homography files H_1_2 .. H_1_6.
// Directory prefixes classify the change: "i_" illumination (identity
// homographies), "v_" viewpoint.

namespace featkit {

enum class SequenceKind { Illumination, Viewpoint };

inline const char* to_string(SequenceKind kind) {
    return kind == SequenceKind::Illumination ? "illumination" : "viewpoint";
}

inline constexpr int kImagesPerSequence = 6;

struct Sequence {
    std::string id;
    SequenceKind kind = SequenceKind::Illumination;
    std::array<GrayImage, kImagesPerSequence> images;  // index 0 = reference
    std::array<Homography, kImagesPerSequence> homographies;  // [0] = identity

    const GrayImage& reference() const { return images[0]; }
};

enum class Split { All, Illumination, Viewpoint };

struct Dataset {
    std::vector<Sequence> sequences;  // sorted by id

    std::size_t count(SequenceKind kind) const {
        return static_cast<std::size_t>(
            std::count_if(sequences.begin(), sequences.end(),
                          [&](const Sequence& s) { return s.kind == kind; }));
    }
};

namespace detail {

inline std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoFailure, "cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline GrayImage load_sequence_image(const std::filesystem::path& dir, int index,
                                     const std::string& seq_id) {
    for (const char* ext : {".ppm", ".pgm"}) {
        const std::filesystem::path p = dir / (std::to_string(index) + ext);
        if (std::filesystem::exists(p)) {
            try {
                return decode_netpbm(read_binary_file(p));
            } catch (const Error& e) {
                raise(ErrorCode::DecodeFailure,
                      "sequence " + seq_id + ": " + p.filename().string() + ": " + e.what());
            }
        }
    }
    raise(ErrorCode::MissingImage,
          "sequence " + seq_id + ": no image " + std::to_string(index) + ".ppm/.pgm");
}

}  // namespace detail

inline Sequence load_sequence(const std::filesystem::path& dir) {
    Sequence seq;
    seq.id = dir.filename().string();
    if (seq.id.rfind("i_", 0) == 0)
        seq.kind = SequenceKind::Illumination;
    else if (seq.id.rfind("v_", 0) == 0)
        seq.kind = SequenceKind::Viewpoint;
    else
        raise(ErrorCode::UnclassifiablePrefix,
              "sequence directory '" + seq.id + "' is neither i_* nor v_*");

    for (int j = 1; j <= kImagesPerSequence; ++j)
        seq.images[j - 1] = detail::load_sequence_image(dir, j, seq.id);

    seq.homographies[0] = Homography::identity();
    for (int j = 2; j <= kImagesPerSequence; ++j) {
        const std::filesystem::path p = dir / ("H_1_" + std::to_string(j));
        if (!std::filesystem::exists(p))
            raise(ErrorCode::MissingHomography, "sequence " + seq.id + ": missing " +
                                                    p.filename().string());
        try {
            seq.homographies[j - 1] = load_homography(detail::read_text_file(p));
        } catch (const Error& e) {
            raise(ErrorCode::DecodeFailure,
                  "sequence " + seq.id + ": " + p.filename().string() + ": " + e.what());
        }
        if (seq.kind == SequenceKind::Illumination &&
            !seq.homographies[j - 1].near_identity())
            raise(ErrorCode::NonIdentityHomography,
                  "sequence " + seq.id + ": illumination homography H_1_" +
                      std::to_string(j) + " is not the identity");
    }
    return seq;
}

inline Dataset load_dataset(const std::filesystem::path& root, Split split = Split::All) {
    if (!std::filesystem::is_directory(root))
        raise(ErrorCode::IoFailure, "dataset root is not a directory: " + root.string());

    std::vector<std::filesystem::path> dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());

    Dataset ds;
    for (const auto& dir : dirs) {
        Sequence seq = load_sequence(dir);
        if (split == Split::Illumination && seq.kind != SequenceKind::Illumination) continue;
        if (split == Split::Viewpoint && seq.kind != SequenceKind::Viewpoint) continue;
        ds.sequences.push_back(std::move(seq));
    }
    if (ds.sequences.empty())
        raise(ErrorCode::IoFailure, "dataset root has no usable sequences: " + root.string());
    return ds;
}

/// FNV-1a digest of the decoded content (ids, kinds, pixels, homographies);
/// equal digests mean the evaluation inputs were identical.
inline std::string dataset_digest(const Dataset& ds) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    auto mix_bytes = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001B3ull;
        }
    };
    for (const Sequence& seq : ds.sequences) {
        mix_bytes(seq.id.data(), seq.id.size());
        const std::uint8_t kind = seq.kind == SequenceKind::Illumination ? 0 : 1;
        mix_bytes(&kind, 1);
        for (const GrayImage& img : seq.images) {
            const std::uint32_t dims[2] = {static_cast<std::uint32_t>(img.width),
                                           static_cast<std::uint32_t>(img.height)};
            mix_bytes(dims, sizeof(dims));
            mix_bytes(img.data.data(), img.data.size());
        }
        for (const Homography& hom : seq.homographies) {
            char buf[32];
            for (double v : hom.entries()) {
                const int n = std::snprintf(buf, sizeof buf, "%.17g,", v);
                mix_bytes(buf, static_cast<std::size_t>(n));
            }
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return std::string(out);
}

}  // namespace featkit
