#include "l1sc/baselines.hpp"

#include "l1sc/error.hpp"
#include "l1sc/scatter.hpp"

#include <string>

namespace l1sc {

namespace {

void check_target(const LabeledDataset& ds, Index d) {
  if (d < 1 || d >= ds.dim()) {
    throw Error(ErrorCode::InvalidArgument, "target dimension " + std::to_string(d) + " outside [1, " +
                                                std::to_string(ds.dim() - 1) + "]");
  }
}

Projection top_eigenvectors(const std::string& method, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Index d) {
  const double delta = ridge(b);
  const Eigen::MatrixXd regularized = b + delta * Eigen::MatrixXd::Identity(b.rows(), b.cols());
  const auto eig = sym_geig(a, regularized);
  Projection p;
  p.method = method;
  p.basis = orthonormalize_columns(eig.vectors.leftCols(d));
  for (Index j = 0; j < d; ++j) {
    DirectionDiagnostics dg;
    dg.objective = eig.values[j];
    dg.converged = true;
    dg.restart_converged = {1};
    p.diagnostics.push_back(dg);
  }
  p.metadata["ridge"] = format_double(delta);
  p.metadata["preprocessing"] = "none (ridge regularization instead of PCA)";
  return p;
}

}  // namespace

double ridge(const Eigen::MatrixXd& b) {
  return 1e-8 * b.trace() / static_cast<double>(b.rows());
}

Projection fit_l2sc(const LabeledDataset& ds, Index d) {
  check_target(ds, d);
  const auto sp = scatter_pair(ds, ClassPartition(ds));
  return top_eigenvectors("l2sc", sp.between, sp.total(), d);
}

FisherScatter fisher_scatter(const LabeledDataset& ds) {
  const ClassPartition part(ds);
  const Index dim = ds.dim();
  const Eigen::VectorXd mu = ds.features().rowwise().mean();
  FisherScatter fs{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  for (int k = 1; k <= part.num_classes(); ++k) {
    const auto members = part.members(k);
    Eigen::MatrixXd block(dim, static_cast<Index>(members.size()));
    for (std::size_t j = 0; j < members.size(); ++j) block.col(static_cast<Index>(j)) = ds.features().col(members[j]);
    const Eigen::VectorXd mk = block.rowwise().mean();
    const Eigen::VectorXd offset = mk - mu;
    fs.between += static_cast<double>(members.size()) * offset * offset.transpose();
    const Eigen::MatrixXd centred = block.colwise() - mk;
    fs.within += centred * centred.transpose();
  }
  fs.between = 0.5 * (fs.between + fs.between.transpose());
  fs.within = 0.5 * (fs.within + fs.within.transpose());
  return fs;
}

Projection fit_lda(const LabeledDataset& ds, Index d) {
  check_target(ds, d);
  const auto fs = fisher_scatter(ds);
  return top_eigenvectors("lda", fs.between, fs.within, d);
}

}  // namespace l1sc
