#pragma once

#include "l1sc/dataset.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace l1sc {

/// How one column of a projection was obtained.
struct DirectionDiagnostics {
  double objective = 0.0;    // L1 ratio for l1sc, generalized eigenvalue for the L2 baselines
  int iterations = 0;        // of the winning restart
  bool converged = false;    // winning restart met the step tolerance
  int restart = 0;           // index of the winning restart
  int safeguard_retries = 0; // half-step retries in the winning restart
  int perturbations = 0;     // degenerate-denominator perturbations in the winning restart
  std::vector<char> restart_converged;  // per restart
};

/// D x d matrix with orthonormal columns plus provenance.
struct Projection {
  std::string method;
  Eigen::MatrixXd basis;
  std::vector<DirectionDiagnostics> diagnostics;  // one per column
  std::map<std::string, std::string> metadata;    // config echo, seeds, notes

  Index input_dim() const noexcept { return basis.rows(); }
  Index output_dim() const noexcept { return basis.cols(); }
};

/// Y = V^T X with labels carried through.
LabeledDataset transform(const Projection& p, const LabeledDataset& ds);
Eigen::MatrixXd transform(const Projection& p, const Eigen::MatrixXd& x);

/// Matrix block for V (see write_matrix_block) followed by a plain-text
/// "key=value" metadata section running to end of file.
void write_projection(std::ostream& out, const Projection& p);
Projection read_projection(std::istream& in);
void save_projection(const std::filesystem::path& path, const Projection& p);
Projection load_projection(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace l1sc
