// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace audioinsight {

// All downstream processing runs at 16 kHz mono.
constexpr int kCanonicalRate = 16000;

struct AudioClip {
    std::vector<float> samples;  // mono, in [-1, 1]
    int sample_rate = kCanonicalRate;
    std::string clip_id;

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

// Reads a PCM WAV file (8/16/24-bit, mono or stereo, any rate), downmixes to
// mono by channel mean and resamples to 16 kHz.
AudioClip read_audio(const std::string& path);

// Writes mono 16-bit PCM.
void write_wav16(const std::string& path, const std::vector<float>& samples, int sample_rate);

}  // namespace audioinsight
