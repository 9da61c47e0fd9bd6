// SPDX-License-Identifier: Apache-2.0
#include "audioinsight/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "audioinsight/common.hpp"

namespace audioinsight {

namespace {

Eigen::MatrixXd pairwise_sq_dist(const Eigen::MatrixXd& X) {
    const Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd d = (-2.0 * X * X.transpose());
    d.colwise() += sq;
    d.rowwise() += sq.transpose();
    return d.cwiseMax(0.0);
}

// Row-stochastic affinities with per-point precision chosen by binary search
// to match log(perplexity) entropy.
Eigen::MatrixXd gaussian_affinities(const Eigen::MatrixXd& D, double perplexity) {
    const int n = static_cast<int>(D.rows());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    const double target_h = std::log(std::max(1.01, perplexity));
    for (int i = 0; i < n; ++i) {
        double beta = 1.0, beta_lo = 0.0, beta_hi = std::numeric_limits<double>::infinity();
        Eigen::VectorXd row(n);
        for (int iter = 0; iter < 60; ++iter) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                row[j] = (j == i) ? 0.0 : std::exp(-beta * D(i, j));
                sum += row[j];
            }
            if (sum < 1e-300) {
                // all neighbors at (numerically) infinite distance
                for (int j = 0; j < n; ++j) row[j] = (j == i) ? 0.0 : 1.0 / (n - 1);
                break;
            }
            double h = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == i || row[j] <= 0.0) continue;
                const double p = row[j] / sum;
                h -= p * std::log(p);
            }
            row /= sum;
            if (std::abs(h - target_h) < 1e-5) break;
            if (h > target_h) {
                beta_lo = beta;
                beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta + beta_hi);
            } else {
                beta_hi = beta;
                beta = 0.5 * (beta + beta_lo);
            }
        }
        P.row(i) = row;
    }
    return P;
}

}  // namespace

Eigen::MatrixXd pca_2d(const Eigen::MatrixXd& X) {
    const int n = static_cast<int>(X.rows());
    Eigen::MatrixXd C = X.rowwise() - X.colwise().mean();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, 2);
    const int k = std::min<int>(2, static_cast<int>(svd.singularValues().size()));
    for (int c = 0; c < k; ++c)
        Y.col(c) = svd.matrixU().col(c) * svd.singularValues()[c];
    return Y;
}

Eigen::MatrixXd tsne_2d(const Eigen::MatrixXd& X, const TsneParams& params) {
    const int n = static_cast<int>(X.rows());
    if (n < 2) throw Error("t-SNE needs at least 2 points");

    Eigen::MatrixXd P = gaussian_affinities(pairwise_sq_dist(X), params.perplexity);
    P = (P + P.transpose()) / (2.0 * n);
    const double p_sum = std::max(P.sum(), 1e-300);
    P /= p_sum;
    P = P.cwiseMax(1e-12);

    // PCA init scaled to the conventional 1e-4 spread
    Eigen::MatrixXd Y = pca_2d(X);
    const double spread = std::sqrt(Y.col(0).squaredNorm() / n);
    Y *= (spread > 1e-300) ? (1e-4 / spread) : 0.0;

    const int exaggeration_end = std::min(250, params.iterations / 2);
    const double momentum_switch = 250;
    const double lr = 200.0;
    Eigen::MatrixXd vel = Eigen::MatrixXd::Zero(n, 2);
    Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);

    for (int iter = 0; iter < params.iterations; ++iter) {
        const double exa = (iter < exaggeration_end) ? 12.0 : 1.0;
        const double momentum = (iter < momentum_switch) ? 0.5 : 0.8;

        // Student-t kernel
        Eigen::MatrixXd num = pairwise_sq_dist(Y);
        num = (1.0 + num.array()).inverse().matrix();
        num.diagonal().setZero();
        const double q_sum = std::max(num.sum(), 1e-300);

        Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, 2);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double mult = (exa * P(i, j) - num(i, j) / q_sum) * num(i, j);
                grad.row(i) += 4.0 * mult * (Y.row(i) - Y.row(j));
            }
        }

        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < 2; ++c) {
                const bool same_sign = (grad(i, c) > 0.0) == (vel(i, c) > 0.0);
                gains(i, c) = same_sign ? std::max(0.01, gains(i, c) * 0.8)
                                        : gains(i, c) + 0.2;
            }
        }
        vel = momentum * vel - lr * gains.cwiseProduct(grad);
        Y += vel;
        Y.rowwise() -= Y.colwise().mean();

        if (!Y.allFinite()) throw Error("t-SNE diverged to non-finite coordinates");
    }
    return Y;
}

}  // namespace audioinsight
