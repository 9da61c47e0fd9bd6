// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace audioinsight {

struct TsneParams {
    double perplexity = 30.0;
    int iterations = 500;
    uint64_t seed = 0;  // recorded for provenance; the embedding is data-deterministic
};

// Exact t-SNE to 2D for small point sets (rows of X are points). The
// embedding is initialized from the first two principal components, so
// identical input rows stay coincident throughout the optimization and the
// result is a deterministic function of the data.
Eigen::MatrixXd tsne_2d(const Eigen::MatrixXd& X, const TsneParams& params);

// First two principal components of the rows of X (fallback layout for tiny
// or degenerate feature sets).
Eigen::MatrixXd pca_2d(const Eigen::MatrixXd& X);

}  // namespace audioinsight
