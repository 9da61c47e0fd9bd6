// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/features.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "audioinsight/common.hpp"

namespace audioinsight {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-12;
constexpr double kPitchLoHz = 60.0;
// The search band tops out above the classic speech range so that oracle
// tones at 440 Hz resolve to their fundamental rather than a subharmonic.
constexpr double kPitchHiHz = 500.0;
constexpr double kVoicedThreshold = 0.30;
constexpr int kNumMels = 26;

struct FrameAnalysis {
    double energy = 0.0;  // mean square
    double rms = 0.0;
    double zcr = 0.0;
    bool voiced = false;
    double f0 = 0.0;
    double ac_peak = 0.0;   // best normalized autocorrelation in the pitch band
    double hnr_db = 0.0;
    double h1_h2_db = 0.0;
    double centroid = 0.0;
    double bandwidth = 0.0;
    double rolloff = 0.0;
    double flatness = 0.0;
    std::vector<double> contrast;
    std::vector<double> chroma;
    std::vector<double> mfcc;
    std::vector<double> lpc;
    std::vector<double> formant_freq;  // zeros when absent
    std::vector<double> formant_bw;
    double formant_amp_db = 0.0;
    bool has_formants = false;
};

std::vector<double> levinson_durbin(const std::vector<double>& r, int order) {
    std::vector<double> a(order + 1, 0.0);
    a[0] = 1.0;
    double err = r[0];
    if (err <= 0.0) return std::vector<double>(order, 0.0);
    std::vector<double> tmp(order + 1, 0.0);
    for (int i = 1; i <= order; ++i) {
        double acc = r[i];
        for (int j = 1; j < i; ++j) acc -= a[j] * r[i - j];
        const double k = acc / err;
        tmp = a;
        for (int j = 1; j < i; ++j) a[j] = tmp[j] - k * tmp[i - j];
        a[i] = k;
        err *= (1.0 - k * k);
        if (err <= 0.0) break;
    }
    return std::vector<double>(a.begin() + 1, a.end());  // predictor coefficients
}

// Roots of A(z) = 1 - sum a_k z^-k via the companion matrix.
void lpc_formants(const std::vector<double>& a, int sample_rate, int n_formants,
                  FrameAnalysis& fa) {
    const int p = static_cast<int>(a.size());
    fa.formant_freq.assign(n_formants, 0.0);
    fa.formant_bw.assign(n_formants, 0.0);
    if (p == 0 || std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; })) return;

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
    for (int i = 1; i < p; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < p; ++i) comp(i, p - 1) = a[p - 1 - i];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) return;

    std::vector<std::pair<double, double>> cand;  // (freq, bw)
    for (int i = 0; i < p; ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (z.imag() <= 0.0) continue;
        const double mag = std::abs(z);
        if (mag >= 1.0 || mag < 1e-6) continue;
        const double freq = std::atan2(z.imag(), z.real()) / (2.0 * kPi) * sample_rate;
        const double bw = -(sample_rate / kPi) * std::log(mag);
        if (freq >= 90.0 && freq <= 5000.0 && bw <= 1000.0) cand.emplace_back(freq, bw);
    }
    std::sort(cand.begin(), cand.end());
    for (int i = 0; i < n_formants && i < static_cast<int>(cand.size()); ++i) {
        fa.formant_freq[i] = cand[i].first;
        fa.formant_bw[i] = cand[i].second;
        fa.has_formants = true;
    }
}

struct PitchResult {
    bool voiced = false;
    double f0 = 0.0;
    double peak = 0.0;       // refined normalized autocorrelation at the pitch lag
    double best_peak = 0.0;  // best peak anywhere in the band
};

PitchResult detect_pitch(const std::vector<double>& r, int sample_rate, double energy) {
    PitchResult out;
    if (r.size() < 3 || r[0] <= kEps) return out;
    const int lag_min = std::max(2, static_cast<int>(sample_rate / kPitchHiHz));
    const int lag_max = std::min(static_cast<int>(r.size()) - 2,
                                 static_cast<int>(sample_rate / kPitchLoHz));
    if (lag_max <= lag_min) return out;

    double best = 0.0;
    for (int l = lag_min; l <= lag_max; ++l) {
        const double v = r[l] / r[0];
        if (v > best && r[l] >= r[l - 1] && r[l] >= r[l + 1]) best = v;
    }
    out.best_peak = std::clamp(best, 0.0, 1.0);
    if (best < kVoicedThreshold || energy < 1e-7) return out;

    // smallest-lag local maximum close to the global best: prefers the true
    // fundamental over period multiples
    for (int l = lag_min; l <= lag_max; ++l) {
        const double v = r[l] / r[0];
        if (v >= 0.85 * best && r[l] >= r[l - 1] && r[l] >= r[l + 1]) {
            const double denom = r[l - 1] - 2.0 * r[l] + r[l + 1];
            double delta = 0.0;
            if (std::abs(denom) > kEps) delta = 0.5 * (r[l - 1] - r[l + 1]) / denom;
            delta = std::clamp(delta, -0.5, 0.5);
            const double lag = l + delta;
            const double f0 = sample_rate / lag;
            if (f0 < kPitchLoHz || f0 > kPitchHiHz) continue;
            const double peak = (r[l] - 0.25 * (r[l - 1] - r[l + 1]) * delta) / r[0];
            out.voiced = true;
            out.f0 = f0;
            out.peak = std::clamp(peak, 0.0, 1.0);
            return out;
        }
    }
    return out;
}

std::vector<double> contrast_band_edges(int n_bands, int sample_rate) {
    const double lo = 200.0;
    const double hi = sample_rate / 2.0;
    std::vector<double> edges(n_bands + 1);
    for (int i = 0; i <= n_bands; ++i)
        edges[i] = lo * std::pow(hi / lo, static_cast<double>(i) / n_bands);
    return edges;
}

}  // namespace

std::vector<std::string> feature_names(const FeatureConfig& cfg) {
    if (cfg.n_mfcc < 1 || cfg.n_chroma < 1 || cfg.n_formants < 1 || cfg.lpc_order < 1 ||
        cfg.n_contrast_bands < 1)
        throw Error("feature config counts must be >= 1");
    std::vector<std::string> n;
    n.insert(n.end(), {"pitch_mean", "pitch_std", "pitch_range", "jitter", "shimmer",
                       "voice_break_fraction"});
    for (int i = 1; i <= cfg.n_formants; ++i) n.push_back("formant_" + std::to_string(i) + "_freq");
    for (int i = 1; i <= cfg.n_formants; ++i) n.push_back("formant_" + std::to_string(i) + "_bw");
    n.push_back("formant_amp_db");
    n.insert(n.end(), {"intensity_db", "h1_h2_db", "hnr_db"});
    for (int i = 1; i <= cfg.n_mfcc; ++i) n.push_back("mfcc_" + std::to_string(i));
    n.insert(n.end(), {"spectral_centroid", "spectral_bandwidth"});
    for (int i = 1; i <= cfg.n_contrast_bands; ++i)
        n.push_back("spectral_contrast_" + std::to_string(i));
    n.insert(n.end(), {"spectral_flatness", "spectral_rolloff", "zcr", "rms"});
    for (int i = 1; i <= cfg.n_chroma; ++i) n.push_back("chroma_" + std::to_string(i));
    n.insert(n.end(), {"temporal_entropy", "autocorr_peak"});
    for (int i = 1; i <= cfg.lpc_order; ++i) n.push_back("lpc_" + std::to_string(i));
    for (int i = 1; i <= cfg.n_mfcc; ++i) n.push_back("dmfcc_" + std::to_string(i));
    for (int i = 1; i <= cfg.n_mfcc; ++i) n.push_back("ddmfcc_" + std::to_string(i));
    n.push_back("log_energy");
    return n;
}

double FeatureVector::value_of(const std::string& name) const {
    if (!names) throw Error("feature vector has no name table");
    for (size_t i = 0; i < names->size(); ++i)
        if ((*names)[i] == name) return values[i];
    throw Error("unknown feature name: " + name);
}

FeatureVector extract_features(const Segment& seg, const FeatureConfig& cfg) {
    const int sr = seg.sample_rate;
    const int frame_len = frame_length_samples(cfg.fp, sr);
    const int hop = hop_length_samples(cfg.fp, sr);
    const size_t n = seg.samples.size();
    if (n < static_cast<size_t>(frame_len + hop))
        throw Error("segment too short for feature extraction");
    for (float v : seg.samples)
        if (!std::isfinite(v)) throw Error("non-finite sample in segment " + seg.source_clip_id);

    const int n_fft = next_pow2(frame_len);
    const int n_bins = n_fft / 2 + 1;
    const int n_frames = 1 + static_cast<int>((n - frame_len) / hop);
    const auto window = hann_window(frame_len);
    const auto mel = mel_filterbank(kNumMels, n_fft, sr, 20.0, sr / 2.0);
    const auto band_edges = contrast_band_edges(cfg.n_contrast_bands, sr);
    const int max_lag = std::min(frame_len - 1, static_cast<int>(sr / kPitchLoHz) + 2);

    std::vector<FrameAnalysis> frames(n_frames);
    std::vector<double> buf(frame_len);
    std::vector<std::complex<double>> fft_buf(n_fft);
    std::vector<double> mag(n_bins);
    std::vector<int> pc_of_bin(n_bins, -1);
    for (int b = 1; b < n_bins; ++b) {
        const double f = static_cast<double>(b) * sr / n_fft;
        if (f < kPitchLoHz) continue;
        int pc = static_cast<int>(std::lround(12.0 * std::log2(f / 440.0))) % 12;
        pc_of_bin[b] = (pc + 12) % 12;
    }

    for (int t = 0; t < n_frames; ++t) {
        FrameAnalysis& fa = frames[t];
        const float* xf = seg.samples.data() + static_cast<size_t>(t) * hop;
        double sq = 0.0;
        int crossings = 0;
        for (int i = 0; i < frame_len; ++i) {
            buf[i] = xf[i];
            sq += buf[i] * buf[i];
            if (i > 0 && buf[i - 1] * buf[i] < 0.0) ++crossings;
        }
        fa.energy = sq / frame_len;
        fa.rms = std::sqrt(fa.energy);
        fa.zcr = static_cast<double>(crossings) / (frame_len - 1);

        const auto r = autocorr(buf.data(), frame_len, max_lag);
        const auto pitch = detect_pitch(r, sr, fa.energy);
        fa.voiced = pitch.voiced;
        fa.f0 = pitch.f0;
        fa.ac_peak = pitch.best_peak;
        if (pitch.voiced) {
            const double p = std::clamp(pitch.peak, 1e-4, 1.0 - 1e-4);
            fa.hnr_db = std::clamp(10.0 * std::log10(p / (1.0 - p)), -40.0, 40.0);
        }

        fa.lpc = levinson_durbin(r, std::min(cfg.lpc_order, max_lag - 1));
        fa.lpc.resize(cfg.lpc_order, 0.0);

        for (int i = 0; i < frame_len; ++i) fft_buf[i] = buf[i] * window[i];
        std::fill(fft_buf.begin() + frame_len, fft_buf.end(), std::complex<double>(0.0));
        fft(fft_buf, false);
        double mag_sum = 0.0, pw_sum = 0.0, log_mag_sum = 0.0;
        for (int b = 0; b < n_bins; ++b) {
            mag[b] = std::abs(fft_buf[b]);
            mag_sum += mag[b];
            pw_sum += mag[b] * mag[b];
            log_mag_sum += std::log(mag[b] + 1e-20);
        }

        double cen = 0.0;
        for (int b = 0; b < n_bins; ++b)
            cen += mag[b] * (static_cast<double>(b) * sr / n_fft);
        fa.centroid = cen / (mag_sum + kEps);
        double bw = 0.0;
        for (int b = 0; b < n_bins; ++b) {
            const double d = static_cast<double>(b) * sr / n_fft - fa.centroid;
            bw += mag[b] * d * d;
        }
        fa.bandwidth = std::sqrt(bw / (mag_sum + kEps));
        double cum = 0.0;
        fa.rolloff = static_cast<double>(n_bins - 1) * sr / n_fft;
        for (int b = 0; b < n_bins; ++b) {
            cum += mag[b];
            if (cum >= 0.85 * mag_sum) {
                fa.rolloff = static_cast<double>(b) * sr / n_fft;
                break;
            }
        }
        // geometric over arithmetic mean of the magnitude spectrum
        fa.flatness = std::exp(log_mag_sum / n_bins) / (mag_sum / n_bins + kEps);

        fa.contrast.assign(cfg.n_contrast_bands, 0.0);
        for (int band = 0; band < cfg.n_contrast_bands; ++band) {
            std::vector<double> vals;
            for (int b = 0; b < n_bins; ++b) {
                const double f = static_cast<double>(b) * sr / n_fft;
                if (f >= band_edges[band] && f < band_edges[band + 1]) vals.push_back(mag[b]);
            }
            if (vals.size() < 2) continue;
            std::sort(vals.begin(), vals.end());
            const size_t q = std::max<size_t>(1, vals.size() / 5);
            double lo_m = 0.0, hi_m = 0.0;
            for (size_t i = 0; i < q; ++i) {
                lo_m += vals[i];
                hi_m += vals[vals.size() - 1 - i];
            }
            fa.contrast[band] = std::log((hi_m / q + kEps) / (lo_m / q + kEps));
        }

        fa.chroma.assign(cfg.n_chroma, 0.0);
        for (int b = 0; b < n_bins; ++b)
            if (pc_of_bin[b] >= 0) fa.chroma[pc_of_bin[b] % cfg.n_chroma] += mag[b];
        const double csum =
            std::accumulate(fa.chroma.begin(), fa.chroma.end(), 0.0) + kEps;
        for (auto& c : fa.chroma) c /= csum;

        std::vector<double> mel_e(kNumMels, 0.0);
        for (int m = 0; m < kNumMels; ++m)
            for (const auto& [b, w] : mel.filters[m]) mel_e[m] += w * mag[b] * mag[b];
        for (auto& e : mel_e) e = std::log(e + 1e-10);
        fa.mfcc = dct2_skip_dc(mel_e, cfg.n_mfcc);

        lpc_formants(fa.lpc, sr, cfg.n_formants, fa);
        if (fa.has_formants && fa.formant_freq[0] > 0.0) {
            const int fb = std::clamp(
                static_cast<int>(std::lround(fa.formant_freq[0] * n_fft / sr)), 0, n_bins - 1);
            fa.formant_amp_db = 20.0 * std::log10((mag[fb] + kEps) / (mag_sum / n_bins + kEps));
        }
        if (fa.voiced) {
            const int b1 = std::clamp(static_cast<int>(std::lround(fa.f0 * n_fft / sr)), 0,
                                      n_bins - 1);
            const int b2 = std::clamp(2 * b1, 0, n_bins - 1);
            fa.h1_h2_db = 20.0 * std::log10((mag[b1] + kEps) / (mag[b2] + kEps));
        }
    }

    // delta and delta-delta of the MFCC track (regression over +/-2 frames)
    auto delta_of = [&](const std::vector<std::vector<double>>& c) {
        std::vector<std::vector<double>> d(n_frames, std::vector<double>(cfg.n_mfcc, 0.0));
        for (int t = 0; t < n_frames; ++t) {
            for (int k = 0; k < cfg.n_mfcc; ++k) {
                double acc = 0.0;
                for (int w = 1; w <= 2; ++w) {
                    const int tp = std::min(n_frames - 1, t + w);
                    const int tm = std::max(0, t - w);
                    acc += w * (c[tp][k] - c[tm][k]);
                }
                d[t][k] = acc / 10.0;
            }
        }
        return d;
    };
    std::vector<std::vector<double>> mfcc_track(n_frames);
    for (int t = 0; t < n_frames; ++t) mfcc_track[t] = frames[t].mfcc;
    const auto dmfcc = delta_of(mfcc_track);
    const auto ddmfcc = delta_of(dmfcc);

    // aggregation
    const auto names = std::make_shared<const std::vector<std::string>>(feature_names(cfg));
    FeatureVector fv;
    fv.names = names;
    fv.values.assign(names->size(), 0.0);
    auto set = [&](const std::string& name, double v) {
        for (size_t i = 0; i < names->size(); ++i)
            if ((*names)[i] == name) {
                fv.values[i] = std::isfinite(v) ? v : 0.0;
                return;
            }
        throw Error("internal: feature name not in table: " + name);
    };

    std::vector<double> f0s, voiced_amps, hnrs, h1h2s;
    std::vector<int> voiced_idx;
    for (int t = 0; t < n_frames; ++t) {
        if (frames[t].voiced) {
            f0s.push_back(frames[t].f0);
            voiced_amps.push_back(frames[t].rms);
            hnrs.push_back(frames[t].hnr_db);
            h1h2s.push_back(frames[t].h1_h2_db);
            voiced_idx.push_back(t);
        }
    }
    fv.voiced_valid = !f0s.empty();

    auto mean_of = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    };

    if (fv.voiced_valid) {
        const double pm = mean_of(f0s);
        double var = 0.0;
        for (double f : f0s) var += (f - pm) * (f - pm);
        set("pitch_mean", pm);
        set("pitch_std", std::sqrt(var / f0s.size()));
        set("pitch_range", *std::max_element(f0s.begin(), f0s.end()) -
                               *std::min_element(f0s.begin(), f0s.end()));
        double jit = 0.0, shim = 0.0;
        int jn = 0, sn = 0;
        for (size_t i = 1; i < voiced_idx.size(); ++i) {
            if (voiced_idx[i] != voiced_idx[i - 1] + 1) continue;  // adjacent frames only
            jit += std::abs(f0s[i] - f0s[i - 1]);
            ++jn;
            shim += std::abs(voiced_amps[i] - voiced_amps[i - 1]);
            ++sn;
        }
        set("jitter", jn > 0 ? (jit / jn) / (pm + kEps) : 0.0);
        set("shimmer", sn > 0 ? (shim / sn) / (mean_of(voiced_amps) + kEps) : 0.0);
        set("hnr_db", mean_of(hnrs));
        set("h1_h2_db", mean_of(h1h2s));
    }
    set("voice_break_fraction", 1.0 - static_cast<double>(f0s.size()) / n_frames);

    for (int i = 0; i < cfg.n_formants; ++i) {
        std::vector<double> ff, fb;
        for (const auto& fa : frames) {
            if (fa.has_formants && fa.formant_freq[i] > 0.0) {
                ff.push_back(fa.formant_freq[i]);
                fb.push_back(fa.formant_bw[i]);
            }
        }
        set("formant_" + std::to_string(i + 1) + "_freq", mean_of(ff));
        set("formant_" + std::to_string(i + 1) + "_bw", mean_of(fb));
    }
    {
        std::vector<double> fad;
        for (const auto& fa : frames)
            if (fa.has_formants) fad.push_back(fa.formant_amp_db);
        set("formant_amp_db", mean_of(fad));
    }

    double total_sq = 0.0;
    for (float v : seg.samples) total_sq += static_cast<double>(v) * v;
    const double mean_sq = total_sq / static_cast<double>(n);
    set("intensity_db", 10.0 * std::log10(std::max(mean_sq, 1e-24)));
    set("log_energy", std::log(std::max(mean_sq, 1e-24)));

    auto frame_mean = [&](auto getter) {
        double s = 0.0;
        for (const auto& fa : frames) s += getter(fa);
        return s / n_frames;
    };
    set("spectral_centroid", frame_mean([](const FrameAnalysis& f) { return f.centroid; }));
    set("spectral_bandwidth", frame_mean([](const FrameAnalysis& f) { return f.bandwidth; }));
    set("spectral_flatness", frame_mean([](const FrameAnalysis& f) { return f.flatness; }));
    set("spectral_rolloff", frame_mean([](const FrameAnalysis& f) { return f.rolloff; }));
    set("zcr", frame_mean([](const FrameAnalysis& f) { return f.zcr; }));
    set("rms", frame_mean([](const FrameAnalysis& f) { return f.rms; }));
    set("autocorr_peak", frame_mean([](const FrameAnalysis& f) { return f.ac_peak; }));

    for (int i = 0; i < cfg.n_contrast_bands; ++i)
        set("spectral_contrast_" + std::to_string(i + 1),
            frame_mean([i](const FrameAnalysis& f) { return f.contrast[i]; }));
    for (int i = 0; i < cfg.n_chroma; ++i)
        set("chroma_" + std::to_string(i + 1),
            frame_mean([i](const FrameAnalysis& f) { return f.chroma[i]; }));
    for (int i = 0; i < cfg.lpc_order; ++i)
        set("lpc_" + std::to_string(i + 1),
            frame_mean([i](const FrameAnalysis& f) { return f.lpc[i]; }));
    for (int i = 0; i < cfg.n_mfcc; ++i) {
        set("mfcc_" + std::to_string(i + 1),
            frame_mean([i](const FrameAnalysis& f) { return f.mfcc[i]; }));
        double dm = 0.0, ddm = 0.0;
        for (int t = 0; t < n_frames; ++t) {
            dm += dmfcc[t][i];
            ddm += ddmfcc[t][i];
        }
        set("dmfcc_" + std::to_string(i + 1), dm / n_frames);
        set("ddmfcc_" + std::to_string(i + 1), ddm / n_frames);
    }

    {
        double esum = 0.0;
        for (const auto& fa : frames) esum += fa.energy;
        double h = 0.0;
        if (esum > kEps && n_frames > 1) {
            for (const auto& fa : frames) {
                const double p = fa.energy / esum;
                if (p > kEps) h -= p * std::log(p);
            }
            h /= std::log(static_cast<double>(n_frames));
        }
        set("temporal_entropy", h);
    }

    for (double v : fv.values)
        if (!std::isfinite(v)) throw Error("internal: non-finite feature value");
    return fv;
}

void save_feature_table(const std::string& path, const std::vector<Segment>& segs,
                        const std::vector<FeatureVector>& fvs) {
    if (segs.size() != fvs.size()) throw Error("segment/feature count mismatch");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write feature table: " + path);
    f << "clip_id,segment_index";
    if (!fvs.empty() && fvs[0].names)
        for (const auto& n : *fvs[0].names) f << ',' << n;
    f << '\n';
    for (size_t i = 0; i < segs.size(); ++i) {
        f << segs[i].source_clip_id << ',' << segs[i].index;
        char buf[32];
        for (double v : fvs[i].values) {
            std::snprintf(buf, sizeof(buf), "%.9g", v);
            f << ',' << buf;
        }
        f << '\n';
    }
}

}  // namespace audioinsight
