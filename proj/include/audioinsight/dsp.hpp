// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "audioinsight/common.hpp"

namespace audioinsight {

// Analysis framing. The window is always Hann.
struct FrameParams {
    double frame_len_ms = 25.0;
    double hop_ms = 10.0;
};

int frame_length_samples(const FrameParams& fp, int sample_rate);
int hop_length_samples(const FrameParams& fp, int sample_rate);

int next_pow2(int n);

// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

// In-place radix-2 FFT; a.size() must be a power of two. The inverse
// transform includes the 1/N factor.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Short-term Fourier transform. Frames start at t*hop and only full frames
// are taken; spectra hold bins 0..n_fft/2 of the Hann-windowed frame.
struct StftResult {
    int n_fft = 0;
    int frame_len = 0;
    int hop = 0;
    std::vector<std::vector<std::complex<double>>> frames;  // [n_frames][n_fft/2+1]

    int n_frames() const { return static_cast<int>(frames.size()); }
    int n_bins() const { return n_fft / 2 + 1; }
};

StftResult stft(const float* x, size_t n, const FrameParams& fp, int sample_rate);

// Weighted overlap-add inverse of stft(); reconstructs exactly out_len
// samples (zero where no frame coverage exists).
std::vector<float> istft(const StftResult& s, size_t out_len);

// Windowed-sinc resampler (Hann-windowed, 32 taps per side).
std::vector<float> resample(const std::vector<float>& x, int sr_in, int sr_out);

// Biased autocorrelation r[0..max_lag] computed via FFT.
std::vector<double> autocorr(const double* x, int n, int max_lag);

// Triangular mel filterbank; returns n_mels rows of (bin, weight) pairs over
// a spectrum with n_fft/2+1 bins.
struct MelFilterbank {
    int n_mels = 0;
    int n_bins = 0;
    std::vector<std::vector<std::pair<int, double>>> filters;
};

MelFilterbank mel_filterbank(int n_mels, int n_fft, int sample_rate, double fmin, double fmax);

// Orthonormal DCT-II of the input, first n_out coefficients starting at
// index 1 (the DC coefficient is skipped).
std::vector<double> dct2_skip_dc(const std::vector<double>& x, int n_out);

}  // namespace audioinsight
