// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "audioinsight/audio.hpp"
#include "audioinsight/dsp.hpp"
#include "audioinsight/manifest.hpp"

namespace audioinsight {

// A fixed-length mono window of audio, the unit of classification.
struct Segment {
    std::vector<float> samples;
    int sample_rate = kCanonicalRate;
    double length_s = 0.0;
    std::string source_clip_id;
    int index = 0;
    ContextLabel label;
    std::string group_id;
};

// Spectral subtraction: the noise magnitude spectrum is the per-bin mean over
// the lowest-energy 10% of STFT frames; each frame keeps its phase and its
// magnitude becomes max(|X| - |N|, floor_beta * |X|). Output length equals
// input length.
AudioClip reduce_noise(const AudioClip& clip, const FrameParams& fp, double floor_beta = 0.01);

struct SilenceResult {
    AudioClip clip;
    bool all_silent = false;
    double threshold = 0.0;  // energy threshold actually applied
};

// Drops non-overlapping frames whose mean-square energy falls below
// ratio * (mean energy over all frames) and concatenates the survivors.
SilenceResult remove_silence(const AudioClip& clip, double ratio, const FrameParams& fp);

// Same rule against a precomputed absolute threshold (used to verify
// idempotence of a previous pass).
SilenceResult remove_silence_abs(const AudioClip& clip, double abs_threshold,
                                 const FrameParams& fp);

// Splits into floor(duration / l) non-overlapping segments of exactly
// round(l * sample_rate) samples; the trailing remainder is discarded.
std::vector<Segment> segment_clip(const AudioClip& clip, double l, const ContextLabel& label,
                                  const std::string& group_id);

}  // namespace audioinsight
