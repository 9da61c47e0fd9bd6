// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "audioinsight/audio.hpp"
#include "audioinsight/common.hpp"

namespace fs = std::filesystem;

namespace audioinsight {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kHarmonics = 10;
constexpr double kLogF0Lo = 4.5539;  // ln(95 Hz)
constexpr double kLogF0Hi = 5.5215;  // ln(250 Hz)

struct Voice {
    double f0 = 150.0;
    double amp = 0.28;
    double vib_rate = 5.5;
    double vib_phase = 0.0;
    std::array<double, kHarmonics> harm{};
};

struct GroupTraits {
    double gain = 1.0;
    double noise_mult = 1.0;
    double tilt = 0.0;
    double pitch_mult = 1.0;
};

// Noise values interpolated between per-10ms Gaussian nodes; used for pitch
// jitter and amplitude shimmer modulation.
struct SlowWobble {
    std::vector<double> nodes;
    int step;

    SlowWobble(size_t n_samples, int step_samples, std::mt19937_64& rng) : step(step_samples) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        nodes.resize(n_samples / step + 2);
        for (auto& v : nodes) v = gauss(rng);
    }
    double at(size_t i) const {
        const size_t k = i / step;
        const double f = static_cast<double>(i % step) / step;
        return nodes[k] * (1.0 - f) + nodes[k + 1] * f;
    }
};

std::vector<float> render_clip(double duration_s, int n_voices, bool evaluative,
                               const SynthSpec& spec, const GroupTraits& traits,
                               uint64_t clip_seed) {
    const int sr = kCanonicalRate;
    const size_t n = static_cast<size_t>(std::llround(duration_s * sr));
    std::mt19937_64 rng(clip_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double sep = spec.separability;
    // Single-voice pitch marginals are class-independent: every voice blends a
    // per-clip center with its own i.i.d. draw, so only the count of distinct
    // voices (not their values) differs between dyadic and group clips.
    const double center = kLogF0Lo + (kLogF0Hi - kLogF0Lo) * unit(rng);
    const double threat_mult = evaluative ? (1.0 + 0.20 * sep) : 1.0;

    std::vector<Voice> voices(n_voices);
    for (auto& v : voices) {
        const double draw = kLogF0Lo + (kLogF0Hi - kLogF0Lo) * unit(rng);
        v.f0 = std::exp((1.0 - sep) * center + sep * draw) * traits.pitch_mult * threat_mult;
        v.amp = 0.28 * (1.0 + 0.35 * sep * (2.0 * unit(rng) - 1.0));
        v.vib_rate = 4.5 + 2.0 * unit(rng);
        v.vib_phase = 2.0 * kPi * unit(rng);
        double norm = 0.0;
        for (int h = 0; h < kHarmonics; ++h) {
            v.harm[h] = (1.0 / std::pow(h + 1.0, 0.85)) *
                        (1.0 + 0.55 * sep * (2.0 * unit(rng) - 1.0));
            norm += std::abs(v.harm[h]);
        }
        for (auto& w : v.harm) w /= norm;
    }

    // Turn schedule: speakers hand off to a uniformly random other voice, so
    // the distribution of a single pitch jump matches between classes. Turn
    // lengths of at least 0.55 s keep half-second windows single-jump.
    struct Turn {
        size_t begin, end;
        int voice;
    };
    std::vector<Turn> turns;
    {
        size_t t = 0;
        int prev = -1;
        while (t < n) {
            int v;
            if (prev < 0) {
                v = static_cast<int>(unit(rng) * n_voices) % n_voices;
            } else {
                v = static_cast<int>(unit(rng) * (n_voices - 1)) % (n_voices - 1);
                if (v >= prev) ++v;
            }
            const size_t len = static_cast<size_t>((0.55 + 0.40 * unit(rng)) * sr);
            const size_t gap = static_cast<size_t>((0.06 + 0.08 * unit(rng)) * sr);
            turns.push_back({t, std::min(n, t + len), v});
            t += len + gap;
            prev = v;
        }
    }

    const double jitter_amp = 0.004 + (evaluative ? 0.022 * sep : 0.0);
    SlowWobble jitter_wob(n, sr / 100, rng);
    SlowWobble shimmer_wob(n, sr / 100, rng);

    std::vector<float> x(n, 0.0f);
    const int edge = sr / 40;  // 25 ms turn fades
    for (const auto& turn : turns) {
        const Voice& v = voices[turn.voice];
        double phase = 2.0 * kPi * unit(rng);
        const size_t len = turn.end - turn.begin;
        for (size_t i = 0; i < len; ++i) {
            const size_t idx = turn.begin + i;
            const double t_s = static_cast<double>(idx) / sr;
            const double vib = 1.0 + 0.008 * std::sin(2.0 * kPi * v.vib_rate * t_s + v.vib_phase);
            const double f0 = v.f0 * vib * (1.0 + jitter_amp * jitter_wob.at(idx));
            phase += 2.0 * kPi * f0 / sr;
            double s = 0.0;
            for (int h = 0; h < kHarmonics; ++h) {
                const double fh = f0 * (h + 1);
                if (fh > 7600.0) break;
                s += v.harm[h] * std::sin((h + 1) * phase);
            }
            double env = 1.0;
            if (i < static_cast<size_t>(edge)) env = 0.5 * (1.0 - std::cos(kPi * i / edge));
            const size_t from_end = len - 1 - i;
            if (from_end < static_cast<size_t>(edge))
                env = std::min(env, 0.5 * (1.0 - std::cos(kPi * from_end / edge)));
            x[idx] = static_cast<float>(s * v.amp * env *
                                        (1.0 + 0.05 * shimmer_wob.at(idx)));
        }
    }

    // Pink-ish background noise (Paul Kellet economy filter), then the
    // per-group tilt and gain nuisances.
    {
        const double level = 0.012 * traits.noise_mult;
        double b0 = 0.0, b1 = 0.0, b2 = 0.0;
        double prev = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double w = 2.0 * unit(rng) - 1.0;
            b0 = 0.99765 * b0 + w * 0.0990460;
            b1 = 0.96300 * b1 + w * 0.2965164;
            b2 = 0.57000 * b2 + w * 1.0526913;
            const double pink = (b0 + b1 + b2 + w * 0.1848) * 0.18;
            double y = x[i] + level * pink;
            y = (1.0 - traits.tilt) * y + traits.tilt * prev;
            prev = y;
            x[i] = static_cast<float>(std::clamp(y * traits.gain, -0.98, 0.98));
        }
    }
    return x;
}

}  // namespace

DatasetManifest synthesize_corpus(const SynthSpec& spec, const std::string& out_dir) {
    if (spec.n_groups < 1) throw Error("n_groups must be >= 1");
    if (spec.participants_per_group < 4 || spec.participants_per_group > 6)
        throw Error("participants_per_group must be in [4,6]");
    if (spec.dyadic_duration_s <= 0.0 || spec.group_duration_s <= 0.0)
        throw Error("durations must be > 0");
    if (spec.separability < 0.0 || spec.separability > 1.0)
        throw Error("separability must be in [0,1]");
    if (spec.group_nuisance < 0.0 || spec.group_nuisance > 1.0)
        throw Error("group_nuisance must be in [0,1]");

    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "clips", ec);
    if (!fs::is_directory(fs::path(out_dir) / "clips"))
        throw Error("cannot create output directory: " + out_dir);

    struct ClipJob {
        std::string clip_id, participant_id, group_id, path;
        double duration;
        int n_voices;
        ContextLabel label;
        GroupTraits traits;
        uint64_t seed;
    };
    std::vector<ClipJob> jobs;

    for (int g = 0; g < spec.n_groups; ++g) {
        std::mt19937_64 grng(mix_seed(spec.seed, static_cast<uint64_t>(g), 0x6e75));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        GroupTraits traits;
        const double nu = spec.group_nuisance;
        traits.gain = 1.0 - 0.45 * nu * unit(grng);
        traits.noise_mult = 1.0 + 1.8 * nu * unit(grng);
        traits.tilt = 0.35 * nu * unit(grng);
        traits.pitch_mult = 1.0 + 0.05 * nu * (2.0 * unit(grng) - 1.0);

        char gid[16];
        std::snprintf(gid, sizeof(gid), "G%02d", g + 1);
        int ordinal = 0;
        for (int ev = 0; ev < 2; ++ev) {
            const bool evaluative = (ev == 0);
            const char* suffix = evaluative ? "ev" : "ne";
            ClipJob gj;
            gj.clip_id = std::string(gid) + "_group_" + suffix;
            gj.participant_id = std::string(gid) + "P01";
            gj.group_id = gid;
            gj.duration = spec.group_duration_s;
            gj.n_voices = spec.participants_per_group;
            gj.label = {Partners::Group, evaluative ? Threat::Evaluative : Threat::NotExplicit};
            gj.traits = traits;
            gj.seed = mix_seed(spec.seed, static_cast<uint64_t>(g), 100 + ordinal++);
            jobs.push_back(gj);

            const int n_pairs = spec.participants_per_group / 2;
            for (int p = 0; p < n_pairs; ++p) {
                ClipJob dj;
                char pid[24];
                std::snprintf(pid, sizeof(pid), "%sP%02d", gid, 2 * p + 1);
                dj.clip_id = std::string(gid) + "_dyad" + std::to_string(p + 1) + "_" + suffix;
                dj.participant_id = pid;
                dj.group_id = gid;
                dj.duration = spec.dyadic_duration_s;
                dj.n_voices = 2;
                dj.label = {Partners::Dyadic,
                            evaluative ? Threat::Evaluative : Threat::NotExplicit};
                dj.traits = traits;
                dj.seed = mix_seed(spec.seed, static_cast<uint64_t>(g), 100 + ordinal++);
                jobs.push_back(dj);
            }
        }
    }

    DatasetManifest m;
    m.entries.resize(jobs.size());
    parallel_for(jobs.size(), 0, [&](size_t i) {
        auto& job = jobs[i];
        const auto samples = render_clip(job.duration, job.n_voices,
                                         job.label.threat == Threat::Evaluative, spec,
                                         job.traits, job.seed);
        const std::string path = (fs::path(out_dir) / "clips" / (job.clip_id + ".wav")).string();
        write_wav16(path, samples, kCanonicalRate);
        ManifestEntry e;
        e.clip_path = path;
        e.clip_id = job.clip_id;
        e.participant_id = job.participant_id;
        e.group_id = job.group_id;
        e.duration_s = static_cast<double>(samples.size()) / kCanonicalRate;
        e.label = job.label;
        m.entries[i] = e;
    });

    save_manifest(m, (fs::path(out_dir) / "manifest.csv").string());
    return m;
}

}  // namespace audioinsight
