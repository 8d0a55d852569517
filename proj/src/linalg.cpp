#include "l1sc/linalg.hpp"

#include "l1sc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace l1sc {

Eigen::MatrixXd cholesky(const Eigen::MatrixXd& b) {
  const Index n = b.rows();
  if (b.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "cholesky of a non-square matrix");
  }
  const double scale = n > 0 ? b.diagonal().cwiseAbs().maxCoeff() : 0.0;
  const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = b(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > floor)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "pivot " + std::to_string(j) + " is " + std::to_string(d));
    }
    d = std::sqrt(d);
    l(j, j) = d;
    for (Index i = j + 1; i < n; ++i) {
      l(i, j) = (b(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / d;
    }
  }
  return l;
}

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

EigenResult sorted_descending(const Eigen::VectorXd& values, const Eigen::MatrixXd& vectors) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return values[x] > values[y]; });
  EigenResult r{Eigen::VectorXd(values.size()), Eigen::MatrixXd(vectors.rows(), vectors.cols())};
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto jj = static_cast<Index>(j);
    r.values[jj] = values[order[j]];
    r.vectors.col(jj) = vectors.col(order[j]);
  }
  return r;
}

}  // namespace

EigenResult jacobi_eigen(const Eigen::MatrixXd& input, double tol) {
  const Index n = input.rows();
  if (input.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "eigen decomposition of a non-square matrix");
  }
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double target = tol * a.norm();

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle chosen to zero a(p,q); t is the smaller root of
        // t^2 + 2 theta t - 1 = 0.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_diagonal_norm(a) > target) {
    throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exhausted");
  }
  return sorted_descending(a.diagonal(), v);
}

EigenResult sym_geig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "pencil matrices must be square and of equal size");
  }
  const Eigen::MatrixXd l = cholesky(b);
  const auto lower = l.triangularView<Eigen::Lower>();
  // c = L^-1 a L^-T
  Eigen::MatrixXd tmp = lower.solve(a);
  Eigen::MatrixXd c = lower.solve(tmp.transpose());
  c = 0.5 * (c + c.transpose());
  EigenResult standard = jacobi_eigen(c);
  standard.vectors = l.transpose().triangularView<Eigen::Upper>().solve(standard.vectors);
  return standard;
}

Eigen::MatrixXd orthonormalize_columns(const Eigen::MatrixXd& m, double tol) {
  Eigen::MatrixXd q = m;
  for (Index j = 0; j < q.cols(); ++j) {
    const double input_norm = q.col(j).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
      }
    }
    const double norm = q.col(j).norm();
    if (!(norm > tol * input_norm) || norm == 0.0) {
      throw Error(ErrorCode::DimensionExhausted,
                  "column " + std::to_string(j + 1) + " is linearly dependent on earlier columns");
    }
    q.col(j) /= norm;
  }
  return q;
}

}  // namespace l1sc
