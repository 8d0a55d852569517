#include "l1sc/scatter.hpp"

#include "l1sc/error.hpp"
#include "l1sc/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace l1sc {

ScatterPair scatter_pair(const Eigen::MatrixXd& x, const ClassPartition& part) {
  if (x.cols() != part.size()) {
    throw Error(ErrorCode::SizeMismatch, "partition covers " + std::to_string(part.size()) + " samples, data has " +
                                             std::to_string(x.cols()));
  }
  if (x.cols() < 2) throw Error(ErrorCode::InvalidArgument, "scatter needs at least two samples");
  const Index dim = x.rows();
  const int classes = part.num_classes();
  const Eigen::MatrixXd centred = x.colwise() - x.rowwise().mean();

  std::vector<Eigen::VectorXd> sums(static_cast<std::size_t>(classes));
  std::vector<Eigen::MatrixXd> moments(static_cast<std::size_t>(classes));
  for (int k = 1; k <= classes; ++k) {
    const auto members = part.members(k);
    Eigen::MatrixXd block(dim, static_cast<Index>(members.size()));
    for (std::size_t j = 0; j < members.size(); ++j) block.col(static_cast<Index>(j)) = centred.col(members[j]);
    sums[static_cast<std::size_t>(k - 1)] = block.rowwise().sum();
    moments[static_cast<std::size_t>(k - 1)] = block * block.transpose();
  }

  ScatterPair sp{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  // Fixed class order keeps the reduction bit-reproducible.
  for (int k = 1; k <= classes; ++k) {
    const auto ki = static_cast<std::size_t>(k - 1);
    const double nk = static_cast<double>(part.count(k));
    const double nbar = static_cast<double>(part.complement_count(k));
    Eigen::VectorXd sbar = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd mbar = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t l = 0; l < sums.size(); ++l) {
      if (l == ki) continue;
      sbar += sums[l];
      mbar += moments[l];
    }
    const Eigen::MatrixXd cross = sums[ki] * sbar.transpose();
    sp.between += (nbar * moments[ki] + nk * mbar - cross - cross.transpose()) / (nk * nbar);
    // A = B = U_k: 2 n_k M_k - 2 s_k s_k^T.
    sp.within += (2.0 * nk * moments[ki] - 2.0 * sums[ki] * sums[ki].transpose()) / (nk * nk);
  }
  sp.between = 0.5 * (sp.between + sp.between.transpose());
  sp.within = 0.5 * (sp.within + sp.within.transpose());
  return sp;
}

ScatterPair scatter_pair(const LabeledDataset& ds, const ClassPartition& part) {
  return scatter_pair(ds.features(), part);
}

namespace {

void require_orthonormal(const Eigen::MatrixXd& v, const ScatterPair& sp) {
  if (v.rows() != sp.between.rows() || v.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "projection has " + std::to_string(v.rows()) + " rows, scatter is " +
                                                  std::to_string(sp.between.rows()) + "x" +
                                                  std::to_string(sp.between.rows()));
  }
  const Eigen::MatrixXd gram = v.transpose() * v;
  const double err = (gram - Eigen::MatrixXd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-8) {
    throw Error(ErrorCode::NotOrthonormal, "max |V^T V - I| = " + std::to_string(err));
  }
}

}  // namespace

double scut_ratio(const Eigen::MatrixXd& v, const ScatterPair& sp) {
  require_orthonormal(v, sp);
  const Eigen::MatrixXd num = v.transpose() * sp.between * v;
  const Eigen::MatrixXd den = v.transpose() * sp.total() * v;
  Eigen::MatrixXd l;
  try {
    l = cholesky(0.5 * (den + den.transpose()));
  } catch (const Error&) {
    throw Error(ErrorCode::SingularDenominator, "V^T S_T V is singular");
  }
  // det(num) / det(L L^T) = det(L^-1 num L^-T); the reduced matrix has
  // eigenvalues in [0, 1], so this form cannot overflow.
  const auto lower = l.triangularView<Eigen::Lower>();
  const Eigen::MatrixXd tmp = lower.solve(num);
  const Eigen::MatrixXd reduced = lower.solve(tmp.transpose());
  return reduced.determinant();
}

double trace_ratio(const Eigen::MatrixXd& v, const ScatterPair& sp, TraceDenominator denom) {
  require_orthonormal(v, sp);
  const double num = (v.transpose() * sp.between * v).trace();
  const Eigen::MatrixXd& lower = denom == TraceDenominator::Total ? sp.total() : sp.within;
  const double den = (v.transpose() * lower * v).trace();
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroDenominatorTrace, "denominator trace is " + std::to_string(den));
  return num / den;
}

void write_scatter_pair(std::ostream& out, const ScatterPair& sp) {
  write_matrix_block(out, sp.between);
  write_matrix_block(out, sp.within);
}

ScatterPair read_scatter_pair(std::istream& in) {
  ScatterPair sp;
  sp.between = read_matrix_block(in);
  sp.within = read_matrix_block(in);
  if (sp.between.rows() != sp.between.cols() || sp.between.rows() != sp.within.rows() ||
      sp.within.rows() != sp.within.cols()) {
    throw Error(ErrorCode::SizeMismatch, "scatter blocks are not matching square matrices");
  }
  return sp;
}

}  // namespace l1sc
