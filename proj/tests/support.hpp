#pragma once

// Brute-force oracles and fixtures shared by the unit tests and the acceptance
// runner. Everything here follows the literal pairwise definitions and never
// calls the library code it is used to check.

#include "l1sc/dataset.hpp"
#include "l1sc/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

namespace l1sc::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  }
  return m;
}

inline Eigen::VectorXd random_unit(Rng& rng, Index dim) {
  Eigen::VectorXd v = random_matrix(rng, dim, 1).col(0);
  return v / v.norm();
}

/// Random orthonormal D x d via Householder QR of a Gaussian matrix.
inline Eigen::MatrixXd random_orthonormal(Rng& rng, Index dim, Index d) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rng, dim, d));
  return qr.householderQ() * Eigen::MatrixXd::Identity(dim, d);
}

/// Labels 1..C with every class present; sizes drawn in [min_per_class, max_per_class].
inline std::vector<int> random_labels(Rng& rng, int classes, int min_per_class, int max_per_class) {
  std::vector<int> labels;
  for (int k = 1; k <= classes; ++k) {
    const auto count = min_per_class + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_per_class - min_per_class + 1)));
    labels.insert(labels.end(), static_cast<std::size_t>(count), k);
  }
  // interleave so class members are not contiguous
  for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.index(i)]);
  return labels;
}

/// Gaussian features with per-class mean offsets.
inline LabeledDataset random_dataset(Rng& rng, Index dim, int classes, int min_per_class, int max_per_class,
                                     double separation = 2.0) {
  const auto labels = random_labels(rng, classes, min_per_class, max_per_class);
  const Eigen::MatrixXd means = random_matrix(rng, dim, classes, separation);
  Eigen::MatrixXd x = random_matrix(rng, dim, static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) x.col(static_cast<Index>(i)) += means.col(labels[i] - 1);
  return LabeledDataset(std::move(x), labels, classes);
}

inline int class_size(const std::vector<int>& labels, int k) {
  int c = 0;
  for (int l : labels) c += l == k;
  return c;
}

inline std::vector<int> labels_of(const LabeledDataset& ds) { return {ds.labels().begin(), ds.labels().end()}; }

struct BruteScatter {
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;
};

/// Literal double loop over ordered pairs.
inline BruteScatter brute_scatter(const Eigen::MatrixXd& x, const std::vector<int>& labels, int classes) {
  const Index dim = x.rows();
  const Index n = x.cols();
  BruteScatter s{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  for (int k = 1; k <= classes; ++k) {
    const double nk = class_size(labels, k);
    const double nbar = static_cast<double>(n) - nk;
    for (Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] != k) continue;
      for (Index j = 0; j < n; ++j) {
        const Eigen::VectorXd diff = x.col(i) - x.col(j);
        if (labels[static_cast<std::size_t>(j)] == k) {
          s.within += diff * diff.transpose() / (nk * nk);
        } else {
          s.between += diff * diff.transpose() / (nk * nbar);
        }
      }
    }
  }
  return s;
}

struct BruteL1 {
  double between = 0.0;
  double within = 0.0;
  Eigen::VectorXd p;
  Eigen::VectorXd b;
};

/// Numerator, denominator and the signed accumulators by the literal triple sums,
/// with the tie rule sign(0) = -1.
inline BruteL1 brute_l1(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const std::vector<int>& labels,
                        int classes) {
  const Index n = x.cols();
  BruteL1 r{0.0, 0.0, Eigen::VectorXd::Zero(x.rows()), Eigen::VectorXd::Zero(x.rows())};
  for (int k = 1; k <= classes; ++k) {
    const double nk = class_size(labels, k);
    const double nbar = static_cast<double>(n) - nk;
    for (Index i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] != k) continue;
      for (Index j = 0; j < n; ++j) {
        const Eigen::VectorXd diff = x.col(i) - x.col(j);
        const double u = v.dot(diff);
        const double sign = u > 0.0 ? 1.0 : -1.0;
        if (labels[static_cast<std::size_t>(j)] == k) {
          r.within += std::abs(u) / (nk * nk);
          r.b += sign * diff / (nk * nk);
        } else {
          r.between += std::abs(u) / (nk * nbar);
          r.p += sign * diff / (nk * nbar);
        }
      }
    }
  }
  return r;
}

/// Numerator and denominator only, over the projections z = X^T v.
inline std::pair<double, double> brute_dispersion(const Eigen::VectorXd& v, const Eigen::MatrixXd& x,
                                                  const std::vector<int>& labels, int classes) {
  const Eigen::VectorXd z = x.transpose() * v;
  std::vector<double> size(static_cast<std::size_t>(classes) + 1, 0.0);
  for (int l : labels) size[static_cast<std::size_t>(l)] += 1.0;
  const double n = static_cast<double>(labels.size());
  double between = 0.0;
  double within = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double nk = size[static_cast<std::size_t>(labels[i])];
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const double a = std::abs(z[static_cast<Index>(i)] - z[static_cast<Index>(j)]);
      if (labels[j] == labels[i]) {
        within += a / (nk * nk);
      } else {
        between += a / (nk * (n - nk));
      }
    }
  }
  return {between, within};
}

inline double brute_objective(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const std::vector<int>& labels,
                              int classes) {
  const auto [between, within] = brute_dispersion(v, x, labels, classes);
  return between / within;
}

/// Smallest |v^T (x_i - x_j)| over pairs of distinct points.
inline double min_pair_gap(const Eigen::VectorXd& v, const Eigen::MatrixXd& x) {
  double best = INFINITY;
  for (Index i = 0; i < x.cols(); ++i) {
    for (Index j = i + 1; j < x.cols(); ++j) best = std::min(best, std::abs(v.dot(x.col(i) - x.col(j))));
  }
  return best;
}

inline double relative_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-300);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

/// Angle between the lines spanned by a and b.
inline double line_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::min(1.0, std::abs(a.dot(b)) / (a.norm() * b.norm()));
  return std::acos(c);
}

/// Largest principal angle between the column spaces of two orthonormal bases.
inline double subspace_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
  const double smallest = svd.singularValues().minCoeff();
  return std::acos(std::min(1.0, smallest));
}

/// 2-D mixture with `classes` anisotropic Gaussian classes of 30..100 samples.
inline LabeledDataset planar_mixture(std::uint64_t seed, int classes) {
  Rng rng(seed);
  std::vector<int> labels;
  std::vector<Eigen::Vector2d> points;
  for (int k = 1; k <= classes; ++k) {
    const Eigen::Vector2d mean(6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0);
    const double angle = rng.uniform01() * 3.141592653589793;
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const Eigen::Vector2d sd(std::sqrt(0.2 + 2.0 * rng.uniform01()), std::sqrt(0.2 + 2.0 * rng.uniform01()));
    const auto count = 30 + static_cast<int>(rng.index(71));
    for (int i = 0; i < count; ++i) {
      const Eigen::Vector2d z(rng.normal() * sd[0], rng.normal() * sd[1]);
      points.push_back(mean + rot * z);
      labels.push_back(k);
    }
  }
  Eigen::MatrixXd x(2, static_cast<Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) x.col(static_cast<Index>(i)) = points[i];
  return LabeledDataset(std::move(x), labels, classes);
}

/// Best of `steps` unit vectors evenly spaced over a half circle (J(v) = J(-v)).
inline Eigen::Vector2d grid_argmax(const LabeledDataset& ds, int steps, double* best_value) {
  const auto labels = labels_of(ds);
  double best = -1.0;
  Eigen::Vector2d arg(1.0, 0.0);
  for (int s = 0; s < steps; ++s) {
    const double t = 3.141592653589793 * s / steps;
    const Eigen::Vector2d v(std::cos(t), std::sin(t));
    const auto [between, within] = brute_dispersion(v, ds.features(), labels, ds.num_classes());
    if (within <= 0.0) continue;
    if (between / within > best) {
      best = between / within;
      arg = v;
    }
  }
  *best_value = best;
  return arg;
}

}  // namespace l1sc::testing
