// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "audioinsight/dsp.hpp"
#include "audioinsight/preprocess.hpp"

namespace audioinsight {

struct FeatureConfig {
    FrameParams fp;
    int n_mfcc = 13;
    int n_chroma = 12;
    int n_formants = 3;
    int lpc_order = 12;
    int n_contrast_bands = 6;
};

// Named scalar acoustic features aggregated over one segment. Order and
// names are fixed by feature_names(cfg); image layout fitting depends on
// this stability.
struct FeatureVector {
    std::shared_ptr<const std::vector<std::string>> names;
    std::vector<double> values;
    bool voiced_valid = true;  // false when the segment had no voiced frames

    double value_of(const std::string& name) const;
    size_t dimension() const { return values.size(); }
};

// Deterministic expansion of every feature family into scalar names.
std::vector<std::string> feature_names(const FeatureConfig& cfg);

// Frame-level analysis (25 ms / 10 ms Hann frames by default) aggregated by
// mean; pitch, jitter, shimmer, HNR and H1-H2 average over voiced frames
// only. A segment with no voiced frames gets zeros there and
// voiced_valid=false.
FeatureVector extract_features(const Segment& seg, const FeatureConfig& cfg);

// CSV export: clip_id,segment_index,<feature names...>
void save_feature_table(const std::string& path, const std::vector<Segment>& segs,
                        const std::vector<FeatureVector>& fvs);

}  // namespace audioinsight
