// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "audioinsight/common.hpp"
#include "audioinsight/features.hpp"
#include "audioinsight/preprocess.hpp"

namespace audioinsight {

enum class ImageKind : uint8_t { Spectrogram = 0, FeatureImage = 1 };

// Square grayscale raster with values in [0,1], row-major.
// Spectrogram orientation: rows are frequency (row 0 = lowest bin),
// columns are time.
struct GrayImage {
    int P = 0;
    ImageKind kind = ImageKind::Spectrogram;
    std::vector<float> pix;  // P*P, row-major

    float at(int r, int c) const { return pix[static_cast<size_t>(r) * P + c]; }
    float& at(int r, int c) { return pix[static_cast<size_t>(r) * P + c]; }
};

// Pixel placement of every feature plus the standardization statistics of
// the fitting set. Fitted on training folds only; `provenance` records which
// segments were used so test-time use can be audited.
struct FeatureLayout {
    int P = 0;
    std::vector<std::string> names;
    std::vector<int> rows, cols;       // one pixel per feature
    std::vector<double> mean, stddev;  // per-feature, from the fitting set
    double frame_angle = 0.0;          // rotation of the minimum bounding rectangle
    uint64_t seed = 0;
    FitProvenance provenance;
};

struct DualChannelImage {
    GrayImage spec;  // channel 0
    GrayImage feat;  // channel 1
    ContextLabel label;
    std::string group_id;
};

// Log-magnitude STFT (floor 1e-10), bilinearly resampled to P x P and
// min-max normalized; constant images map to all zeros.
GrayImage spectrogram_image(const Segment& seg, const FrameParams& fp, int P);

// DeepInsight layout: each feature becomes a point whose coordinates are its
// standardized values across the training vectors; seeded t-SNE maps the
// points to 2D; the convex hull's minimum-area rectangle (rotating calipers)
// frames the plane, which is rasterized to P x P. Falls back to PCA when
// D < 5 or t-SNE diverges.
FeatureLayout fit_feature_layout(const std::vector<FeatureVector>& train_vectors, int P,
                                 uint64_t seed, FitProvenance provenance = {});

// Pixel value = mean of the standardized values of all features mapped to
// that pixel; untouched pixels are 0. No final normalization.
GrayImage feature_image_raw(const FeatureVector& fv, const FeatureLayout& layout);

// feature_image_raw followed by per-image min-max normalization to [0,1].
GrayImage feature_image(const FeatureVector& fv, const FeatureLayout& layout);

DualChannelImage assemble_dual(GrayImage spec, GrayImage feat, const ContextLabel& label,
                               const std::string& group_id);

// Versioned little-endian layout file (magic "AILM").
void save_layout(const FeatureLayout& layout, const std::string& path);
FeatureLayout load_layout(const std::string& path);
void write_layout_blob(const FeatureLayout& layout, std::string& out);
FeatureLayout read_layout_blob(const uint8_t* data, size_t size, size_t& off);

// 8-bit binary PGM export for inspection.
void save_pgm(const GrayImage& img, const std::string& path);

}  // namespace audioinsight
