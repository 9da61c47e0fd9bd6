// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/dsp.hpp"

#include <cmath>
#include <numbers>

namespace audioinsight {

namespace {
constexpr double kPi = std::numbers::pi;
}

int frame_length_samples(const FrameParams& fp, int sample_rate) {
    if (fp.frame_len_ms < fp.hop_ms || fp.hop_ms <= 0.0)
        throw Error("frame params require frame_len_ms >= hop_ms > 0");
    return std::max(1, static_cast<int>(std::lround(fp.frame_len_ms * sample_rate / 1000.0)));
}

int hop_length_samples(const FrameParams& fp, int sample_rate) {
    if (fp.hop_ms <= 0.0) throw Error("hop_ms must be > 0");
    return std::max(1, static_cast<int>(std::lround(fp.hop_ms * sample_rate / 1000.0)));
}

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
    return w;
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw Error("fft size must be a power of two");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& z : a) z /= static_cast<double>(n);
    }
}

StftResult stft(const float* x, size_t n, const FrameParams& fp, int sample_rate) {
    StftResult out;
    out.frame_len = frame_length_samples(fp, sample_rate);
    out.hop = hop_length_samples(fp, sample_rate);
    out.n_fft = next_pow2(out.frame_len);
    if (n < static_cast<size_t>(out.frame_len)) return out;

    const auto w = hann_window(out.frame_len);
    const int n_frames = 1 + static_cast<int>((n - out.frame_len) / out.hop);
    const int n_bins = out.n_fft / 2 + 1;
    out.frames.resize(n_frames);
    std::vector<std::complex<double>> buf(out.n_fft);
    for (int t = 0; t < n_frames; ++t) {
        const float* frame = x + static_cast<size_t>(t) * out.hop;
        for (int i = 0; i < out.frame_len; ++i) buf[i] = frame[i] * w[i];
        std::fill(buf.begin() + out.frame_len, buf.end(), std::complex<double>(0.0));
        fft(buf, false);
        out.frames[t].assign(buf.begin(), buf.begin() + n_bins);
    }
    return out;
}

std::vector<float> istft(const StftResult& s, size_t out_len) {
    std::vector<double> acc(out_len, 0.0);
    std::vector<double> norm(out_len, 0.0);
    if (!s.frames.empty()) {
        const auto w = hann_window(s.frame_len);
        std::vector<std::complex<double>> buf(s.n_fft);
        for (int t = 0; t < s.n_frames(); ++t) {
            // rebuild the full spectrum by conjugate symmetry
            const auto& half = s.frames[t];
            for (int k = 0; k <= s.n_fft / 2; ++k) buf[k] = half[k];
            for (int k = s.n_fft / 2 + 1; k < s.n_fft; ++k) buf[k] = std::conj(half[s.n_fft - k]);
            fft(buf, true);
            const size_t base = static_cast<size_t>(t) * s.hop;
            for (int i = 0; i < s.frame_len; ++i) {
                size_t idx = base + i;
                if (idx >= out_len) break;
                acc[idx] += buf[i].real() * w[i];
                norm[idx] += w[i] * w[i];
            }
        }
    }
    std::vector<float> y(out_len, 0.0f);
    for (size_t i = 0; i < out_len; ++i)
        y[i] = static_cast<float>(norm[i] > 1e-12 ? acc[i] / norm[i] : 0.0);
    return y;
}

std::vector<float> resample(const std::vector<float>& x, int sr_in, int sr_out) {
    if (sr_in <= 0 || sr_out <= 0) throw Error("sample rates must be positive");
    if (sr_in == sr_out || x.empty()) return x;
    const double ratio = static_cast<double>(sr_out) / sr_in;
    const size_t n_out = static_cast<size_t>(std::llround(static_cast<double>(x.size()) * ratio));
    const int taps = 32;
    // anti-alias cutoff at 95% of the narrower Nyquist
    const double cutoff = 0.95 * std::min(1.0, 1.0 / ratio);
    std::vector<float> y(n_out, 0.0f);
    const auto n = static_cast<long long>(x.size());
    for (size_t j = 0; j < n_out; ++j) {
        const double t = static_cast<double>(j) / ratio;
        const long long k0 = static_cast<long long>(std::floor(t)) - taps + 1;
        const long long k1 = static_cast<long long>(std::floor(t)) + taps;
        double sum = 0.0;
        for (long long k = std::max(0LL, k0); k <= std::min(n - 1, k1); ++k) {
            const double d = (static_cast<double>(k) - t) * cutoff;
            double sinc = (std::abs(d) < 1e-12) ? 1.0 : std::sin(kPi * d) / (kPi * d);
            const double u = (static_cast<double>(k) - t) / taps;
            const double win = 0.5 * (1.0 + std::cos(kPi * u));  // Hann taper over the support
            sum += x[k] * sinc * cutoff * win;
        }
        y[j] = static_cast<float>(sum);
    }
    return y;
}

std::vector<double> autocorr(const double* x, int n, int max_lag) {
    if (n <= 0) throw Error("autocorr on empty signal");
    max_lag = std::min(max_lag, n - 1);
    const int n_fft = next_pow2(n + max_lag + 1);
    std::vector<std::complex<double>> buf(n_fft, std::complex<double>(0.0));
    for (int i = 0; i < n; ++i) buf[i] = x[i];
    fft(buf, false);
    for (auto& z : buf) z = z * std::conj(z);
    fft(buf, true);
    std::vector<double> r(max_lag + 1);
    for (int l = 0; l <= max_lag; ++l) r[l] = buf[l].real();
    return r;
}

namespace {
double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }
}  // namespace

MelFilterbank mel_filterbank(int n_mels, int n_fft, int sample_rate, double fmin, double fmax) {
    MelFilterbank fb;
    fb.n_mels = n_mels;
    fb.n_bins = n_fft / 2 + 1;
    fb.filters.resize(n_mels);
    const double mlo = hz_to_mel(fmin), mhi = hz_to_mel(fmax);
    std::vector<double> edges(n_mels + 2);
    for (int i = 0; i < n_mels + 2; ++i)
        edges[i] = mel_to_hz(mlo + (mhi - mlo) * i / (n_mels + 1));
    for (int m = 0; m < n_mels; ++m) {
        const double f0 = edges[m], f1 = edges[m + 1], f2 = edges[m + 2];
        for (int b = 0; b < fb.n_bins; ++b) {
            const double f = static_cast<double>(b) * sample_rate / n_fft;
            double w = 0.0;
            if (f > f0 && f < f2)
                w = (f <= f1) ? (f - f0) / std::max(1e-12, f1 - f0)
                              : (f2 - f) / std::max(1e-12, f2 - f1);
            if (w > 0.0) fb.filters[m].emplace_back(b, w);
        }
    }
    return fb;
}

std::vector<double> dct2_skip_dc(const std::vector<double>& x, int n_out) {
    const int n = static_cast<int>(x.size());
    std::vector<double> c(n_out, 0.0);
    if (n == 0) return c;
    const double scale = std::sqrt(2.0 / n);
    for (int k = 1; k <= n_out; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += x[i] * std::cos(kPi * k * (i + 0.5) / n);
        if (k <= n_out) c[k - 1] = scale * s;
    }
    return c;
}

}  // namespace audioinsight
