#pragma once

#include "l1sc/dataset.hpp"

#include <Eigen/Dense>

#include <iosfwd>

namespace l1sc {

/// Pairwise dissimilarity matrices of the scaling-cut criterion.
///
///   between = sum_k 1/(n_k (n - n_k)) sum_{i in U_k, j not in U_k} (x_i - x_j)(x_i - x_j)^T
///   within  = sum_k 1/n_k^2           sum_{i, j in U_k}          (x_i - x_j)(x_i - x_j)^T
///
/// Both are symmetric PSD; total = between + within.
struct ScatterPair {
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;

  Eigen::MatrixXd total() const { return between + within; }
};

/// O(n D^2) evaluation of the pairwise sums. For index sets A, B:
///
///   sum_{i in A, j in B} (x_i - x_j)(x_i - x_j)^T
///       = |B| M(A) + |A| M(B) - s(A) s(B)^T - s(B) s(A)^T
///
/// with s the column sum and M the second moment sum x x^T over the set.
/// The data is centred on its global mean first; the sums are translation
/// invariant and centring keeps the subtraction well conditioned.
ScatterPair scatter_pair(const Eigen::MatrixXd& x, const ClassPartition& part);
ScatterPair scatter_pair(const LabeledDataset& ds, const ClassPartition& part);

/// det(V^T between V) / det(V^T total V). V must have orthonormal columns
/// (within 1e-8); throws SingularDenominator when V^T total V is not
/// numerically positive definite.
double scut_ratio(const Eigen::MatrixXd& v, const ScatterPair& sp);

enum class TraceDenominator { Total, Within };

/// Tr(V^T between V) / Tr(V^T X V), X = total or within.
double trace_ratio(const Eigen::MatrixXd& v, const ScatterPair& sp, TraceDenominator denom);

void write_scatter_pair(std::ostream& out, const ScatterPair& sp);
ScatterPair read_scatter_pair(std::istream& in);

}  // namespace l1sc
