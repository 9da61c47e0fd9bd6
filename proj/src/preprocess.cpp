// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "audioinsight/common.hpp"

namespace audioinsight {

AudioClip reduce_noise(const AudioClip& clip, const FrameParams& fp, double floor_beta) {
    if (clip.samples.empty()) throw Error("reduce_noise: empty clip");
    const int frame_len = frame_length_samples(fp, clip.sample_rate);
    if (static_cast<int>(clip.samples.size()) < frame_len)
        throw Error("reduce_noise: clip shorter than one frame");

    StftResult s = stft(clip.samples.data(), clip.samples.size(), fp, clip.sample_rate);
    const int n_frames = s.n_frames();
    const int n_bins = s.n_bins();

    std::vector<double> frame_energy(n_frames, 0.0);
    for (int t = 0; t < n_frames; ++t)
        for (const auto& z : s.frames[t]) frame_energy[t] += std::norm(z);

    std::vector<int> order(n_frames);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frame_energy[a] < frame_energy[b]; });
    const int n_noise = std::max(1, n_frames / 10);

    std::vector<double> noise_mag(n_bins, 0.0);
    for (int i = 0; i < n_noise; ++i)
        for (int b = 0; b < n_bins; ++b) noise_mag[b] += std::abs(s.frames[order[i]][b]);
    for (auto& v : noise_mag) v /= n_noise;

    for (int t = 0; t < n_frames; ++t) {
        for (int b = 0; b < n_bins; ++b) {
            const double mag = std::abs(s.frames[t][b]);
            const double cleaned = std::max(mag - noise_mag[b], floor_beta * mag);
            if (mag > 1e-300) s.frames[t][b] *= cleaned / mag;
        }
    }

    AudioClip out;
    out.clip_id = clip.clip_id;
    out.sample_rate = clip.sample_rate;
    out.samples = istft(s, clip.samples.size());
    for (auto& v : out.samples) {
        if (!std::isfinite(v)) v = 0.0f;
        v = std::clamp(v, -1.0f, 1.0f);
    }
    return out;
}

namespace {

SilenceResult remove_silence_impl(const AudioClip& clip, const FrameParams& fp,
                                  double ratio, bool use_abs, double abs_threshold) {
    const int frame_len = frame_length_samples(fp, clip.sample_rate);
    if (static_cast<int>(clip.samples.size()) < 1)
        throw Error("remove_silence: empty clip");

    // Non-overlapping frames; a trailing partial frame is scored like a frame.
    const size_t n = clip.samples.size();
    std::vector<std::pair<size_t, size_t>> frames;
    for (size_t start = 0; start < n; start += frame_len)
        frames.emplace_back(start, std::min(n, start + frame_len));

    std::vector<double> energy(frames.size(), 0.0);
    for (size_t i = 0; i < frames.size(); ++i) {
        double acc = 0.0;
        for (size_t j = frames[i].first; j < frames[i].second; ++j)
            acc += static_cast<double>(clip.samples[j]) * clip.samples[j];
        energy[i] = acc / static_cast<double>(frames[i].second - frames[i].first);
    }

    double threshold = abs_threshold;
    if (!use_abs) {
        const double mean =
            std::accumulate(energy.begin(), energy.end(), 0.0) / static_cast<double>(energy.size());
        threshold = ratio * mean;
    }

    SilenceResult out;
    out.threshold = threshold;
    out.clip.clip_id = clip.clip_id;
    out.clip.sample_rate = clip.sample_rate;
    for (size_t i = 0; i < frames.size(); ++i) {
        if (energy[i] >= threshold) {
            out.clip.samples.insert(out.clip.samples.end(),
                                    clip.samples.begin() + static_cast<long>(frames[i].first),
                                    clip.samples.begin() + static_cast<long>(frames[i].second));
        }
    }
    out.all_silent = out.clip.samples.empty();
    return out;
}

}  // namespace

SilenceResult remove_silence(const AudioClip& clip, double ratio, const FrameParams& fp) {
    if (ratio < 0.0) throw Error("silence ratio must be >= 0");
    return remove_silence_impl(clip, fp, ratio, false, 0.0);
}

SilenceResult remove_silence_abs(const AudioClip& clip, double abs_threshold,
                                 const FrameParams& fp) {
    return remove_silence_impl(clip, fp, 0.0, true, abs_threshold);
}

std::vector<Segment> segment_clip(const AudioClip& clip, double l, const ContextLabel& label,
                                  const std::string& group_id) {
    if (l <= 0.0) throw Error("segment length must be > 0");
    const size_t seg_len = static_cast<size_t>(std::llround(l * clip.sample_rate));
    std::vector<Segment> out;
    if (seg_len == 0) throw Error("segment length rounds to zero samples");
    const size_t n_segs = clip.samples.size() / seg_len;
    out.reserve(n_segs);
    for (size_t i = 0; i < n_segs; ++i) {
        Segment s;
        s.samples.assign(clip.samples.begin() + static_cast<long>(i * seg_len),
                         clip.samples.begin() + static_cast<long>((i + 1) * seg_len));
        s.sample_rate = clip.sample_rate;
        s.length_s = l;
        s.source_clip_id = clip.clip_id;
        s.index = static_cast<int>(i);
        s.label = label;
        s.group_id = group_id;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace audioinsight
