#pragma once

// L2-norm reference methods, both solved as generalized symmetric eigenproblems
// with a ridge on the denominator matrix: delta = 1e-8 * Tr(B) / D.

#include "l1sc/dataset.hpp"
#include "l1sc/linalg.hpp"
#include "l1sc/projection.hpp"

namespace l1sc {

/// delta * I added to the denominator of every baseline pencil.
double ridge(const Eigen::MatrixXd& b);

/// Scaling cut: top-d generalized eigenvectors of (between, total + delta I),
/// orthonormalized.
Projection fit_l2sc(const LabeledDataset& ds, Index d);

/// Fisher LDA with the classical mean-based scatters
///   S_b = sum_k n_k (mu_k - mu)(mu_k - mu)^T,
///   S_w = sum_k sum_{i in U_k} (x_i - mu_k)(x_i - mu_k)^T,
/// top-d eigenvectors of (S_b, S_w + delta I), orthonormalized.
/// For comparison: the pairwise within matrix of the scaling cut equals
/// sum_k (2 / n_k) S_w,k, i.e. the same per-class scatter reweighted by 2/n_k.
Projection fit_lda(const LabeledDataset& ds, Index d);

/// S_b, S_w as used by fit_lda.
struct FisherScatter {
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;
};
FisherScatter fisher_scatter(const LabeledDataset& ds);

}  // namespace l1sc
