// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "audioinsight/common.hpp"

// Minimal CNN/MLP building blocks. Everything is templated on the scalar
// type: training runs in float, gradient checking in double.
namespace audioinsight::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
struct Params {
    std::vector<Mat<T>> W;
    std::vector<Vec<T>> b;

    template <typename U>
    Params<U> cast() const {
        Params<U> out;
        out.W.reserve(W.size());
        out.b.reserve(b.size());
        for (const auto& w : W) out.W.push_back(w.template cast<U>());
        for (const auto& v : b) out.b.push_back(v.template cast<U>());
        return out;
    }

    size_t scalar_count() const {
        size_t n = 0;
        for (const auto& w : W) n += static_cast<size_t>(w.size());
        for (const auto& v : b) n += static_cast<size_t>(v.size());
        return n;
    }

    T& scalar_at(size_t idx) {
        for (auto& w : W) {
            if (idx < static_cast<size_t>(w.size())) return w.data()[idx];
            idx -= static_cast<size_t>(w.size());
        }
        for (auto& v : b) {
            if (idx < static_cast<size_t>(v.size())) return v.data()[idx];
            idx -= static_cast<size_t>(v.size());
        }
        throw Error("parameter index out of range");
    }
};

// Column layout conventions:
//  - stage input: (C*H*W) x B, sample per column, channel-major pixels
//  - conv activation: (F) x (B*H*W), column = b*H*W + i*W + j
//  - im2col matrix: (C*k*k) x (B*H*W)
template <typename T>
void im2col(const Mat<T>& in, int C, int H, int W, int k, Mat<T>& out) {
    const int pad = k / 2;
    const int B = static_cast<int>(in.cols());
    out.resize(C * k * k, static_cast<long>(B) * H * W);
    const T* src = in.data();
    T* dst = out.data();
    const long in_rows = in.rows();
    for (int b = 0; b < B; ++b) {
        const T* sb = src + static_cast<size_t>(b) * in_rows;
        for (int i = 0; i < H; ++i) {
            for (int j = 0; j < W; ++j) {
                T* col = dst + (static_cast<size_t>(b) * H * W + static_cast<size_t>(i) * W + j) *
                                   (C * k * k);
                for (int c = 0; c < C; ++c) {
                    const T* sc = sb + static_cast<size_t>(c) * H * W;
                    for (int di = 0; di < k; ++di) {
                        const int si = i + di - pad;
                        for (int dj = 0; dj < k; ++dj) {
                            const int sj = j + dj - pad;
                            *col++ = (si >= 0 && si < H && sj >= 0 && sj < W)
                                         ? sc[static_cast<size_t>(si) * W + sj]
                                         : T(0);
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void col2im(const Mat<T>& cols, int C, int H, int W, int k, Mat<T>& in_grad) {
    const int pad = k / 2;
    const int B = static_cast<int>(cols.cols() / (static_cast<long>(H) * W));
    in_grad.setZero(static_cast<long>(C) * H * W, B);
    const T* src = cols.data();
    T* dst = in_grad.data();
    const long in_rows = in_grad.rows();
    for (int b = 0; b < B; ++b) {
        T* db = dst + static_cast<size_t>(b) * in_rows;
        for (int i = 0; i < H; ++i) {
            for (int j = 0; j < W; ++j) {
                const T* col = src + (static_cast<size_t>(b) * H * W +
                                      static_cast<size_t>(i) * W + j) *
                                         (C * k * k);
                for (int c = 0; c < C; ++c) {
                    T* dc = db + static_cast<size_t>(c) * H * W;
                    for (int di = 0; di < k; ++di) {
                        const int si = i + di - pad;
                        for (int dj = 0; dj < k; ++dj) {
                            const int sj = j + dj - pad;
                            if (si >= 0 && si < H && sj >= 0 && sj < W)
                                dc[static_cast<size_t>(si) * W + sj] += *col;
                            ++col;
                        }
                    }
                }
            }
        }
    }
}

// 2x2 max pooling over the conv activation layout; output is the next
// stage's input layout. argmax records the winning i*W+j per output element
// (indexed like the output in column-major order).
template <typename T>
void maxpool2(const Mat<T>& act, int F, int H, int W, Mat<T>& out, std::vector<int>& argmax) {
    const int B = static_cast<int>(act.cols() / (static_cast<long>(H) * W));
    const int H2 = H / 2, W2 = W / 2;
    out.resize(static_cast<long>(F) * H2 * W2, B);
    argmax.assign(static_cast<size_t>(F) * H2 * W2 * B, 0);
    for (int b = 0; b < B; ++b) {
        for (int f = 0; f < F; ++f) {
            for (int i2 = 0; i2 < H2; ++i2) {
                for (int j2 = 0; j2 < W2; ++j2) {
                    T best = -std::numeric_limits<T>::infinity();
                    int best_pos = 0;
                    for (int di = 0; di < 2; ++di) {
                        for (int dj = 0; dj < 2; ++dj) {
                            const int i = 2 * i2 + di, j = 2 * j2 + dj;
                            const T v = act(f, static_cast<long>(b) * H * W + i * W + j);
                            if (v > best) {
                                best = v;
                                best_pos = i * W + j;
                            }
                        }
                    }
                    const long orow = static_cast<long>(f) * H2 * W2 + i2 * W2 + j2;
                    out(orow, b) = best;
                    argmax[static_cast<size_t>(b) * F * H2 * W2 + orow] = best_pos;
                }
            }
        }
    }
}

template <typename T>
void maxpool2_backward(const Mat<T>& dout, const std::vector<int>& argmax, int F, int H, int W,
                       Mat<T>& dact) {
    const int B = static_cast<int>(dout.cols());
    const int H2 = H / 2, W2 = W / 2;
    dact.setZero(F, static_cast<long>(B) * H * W);
    for (int b = 0; b < B; ++b) {
        for (long orow = 0; orow < static_cast<long>(F) * H2 * W2; ++orow) {
            const int f = static_cast<int>(orow / (H2 * W2));
            const int pos = argmax[static_cast<size_t>(b) * F * H2 * W2 + orow];
            dact(f, static_cast<long>(b) * H * W + pos) += dout(orow, b);
        }
    }
}

// Column-wise softmax, numerically stabilized.
template <typename T>
Mat<T> softmax_cols(const Mat<T>& z) {
    Mat<T> p = z;
    for (long c = 0; c < p.cols(); ++c) {
        const T m = p.col(c).maxCoeff();
        p.col(c) = (p.col(c).array() - m).exp();
        p.col(c) /= p.col(c).sum();
    }
    return p;
}

template <typename T>
struct Adam {
    std::vector<Mat<T>> mW, vW;
    std::vector<Vec<T>> mb, vb;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long t = 0;

    void init(const Params<T>& p) {
        mW.clear();
        vW.clear();
        mb.clear();
        vb.clear();
        for (const auto& w : p.W) {
            mW.push_back(Mat<T>::Zero(w.rows(), w.cols()));
            vW.push_back(Mat<T>::Zero(w.rows(), w.cols()));
        }
        for (const auto& v : p.b) {
            mb.push_back(Vec<T>::Zero(v.size()));
            vb.push_back(Vec<T>::Zero(v.size()));
        }
        t = 0;
    }

    void step(Params<T>& p, const Params<T>& g, double lr) {
        ++t;
        const T c1 = static_cast<T>(1.0 - std::pow(beta1, static_cast<double>(t)));
        const T c2 = static_cast<T>(1.0 - std::pow(beta2, static_cast<double>(t)));
        auto update = [&](auto& theta, auto& m, auto& v, const auto& grad) {
            m = static_cast<T>(beta1) * m + static_cast<T>(1.0 - beta1) * grad;
            v = static_cast<T>(beta2) * v +
                static_cast<T>(1.0 - beta2) * grad.cwiseProduct(grad);
            theta -= (static_cast<T>(lr) * (m / c1).array() /
                      ((v / c2).array().sqrt() + static_cast<T>(eps)))
                         .matrix();
        };
        for (size_t i = 0; i < p.W.size(); ++i) update(p.W[i], mW[i], vW[i], g.W[i]);
        for (size_t i = 0; i < p.b.size(); ++i) update(p.b[i], mb[i], vb[i], g.b[i]);
    }
};

}  // namespace audioinsight::nn
