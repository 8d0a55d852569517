#pragma once

// L1-norm scaling cut.
//
// For a unit vector v the criterion is
//
//            sum_k sum_{i in U_k, j not in U_k} |v^T (x_i - x_j)| / (n_k (n - n_k))
//   J(v) = ---------------------------------------------------------------------
//            sum_k sum_{i, j in U_k}           |v^T (x_i - x_j)| / n_k^2
//
// maximized one direction at a time by a sign-linearised fixed-point
// iteration, with deflation of the data between directions.

#include "l1sc/dataset.hpp"
#include "l1sc/projection.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace l1sc {

struct SolverConfig {
  double gamma = 0.1;           // learning rate
  double epsilon = 1e-6;        // stop when ||v(t+1) - v(t)|| <= epsilon
  int itmax = 200;              // iteration cap per restart
  double perturb_scale = 1e-6;  // norm of the random nudge applied on a zero denominator
  std::uint64_t seed = 0;
  int restarts = 5;             // random initialisations per direction

  /// Throws InvalidArgument on a non-positive field.
  void validate() const;
};

/// Numerator and denominator of J(v). Both are positively homogeneous of
/// degree one in v; no normalisation is required or applied.
struct Dispersion {
  double between = 0.0;
  double within = 0.0;
};

/// O(n log n + nC): projects once and sums |z_i - z_j| over the gaps of the
/// sorted projections, each gap weighted by the number of pairs spanning it.
Dispersion l1_dispersion(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part);

/// J(v). Requires ||v|| = 1 within 1e-8; throws ZeroWithinDispersion when
/// every within-class pair coincides under v.
double l1_objective(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part);
double l1_objective(const Eigen::VectorXd& v, const LabeledDataset& ds, const ClassPartition& part);

/// Signs s_ij = +1 if v^T (x_i - x_j) > 0, else -1 (ties included).
/// q is s restricted to between-class pairs, r to within-class pairs.
class SignState {
 public:
  SignState(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part);

  Index size() const noexcept { return n_; }
  /// Between-class pair sign; labels of i and j must differ.
  int q(Index i, Index j) const;
  /// Within-class pair sign; labels of i and j must agree.
  int r(Index i, Index j) const;

 private:
  int at(Index i, Index j) const { return signs_[static_cast<std::size_t>(i * n_ + j)]; }

  Index n_;
  std::vector<int> labels_;
  std::vector<std::int8_t> signs_;
};

SignState sign_state(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part);

/// p = sum_k sum_{i in U_k, j not in U_k} q_ij (x_i - x_j) / (n_k (n - n_k)),
/// b = sum_k sum_{i, j in U_k}           r_ij (x_i - x_j) / n_k^2,
/// so that v^T p and v^T b are the numerator and denominator of J(v).
struct Accumulators {
  Eigen::VectorXd between;  // p
  Eigen::VectorXd within;   // b
};

/// Uses the given signs: O(n^2) per-sample coefficients, then p = X c.
Accumulators accumulators(const Eigen::MatrixXd& x, const ClassPartition& part, const SignState& signs);

/// Same quantity with signs read off the sorted projections; O(n log n + nD).
Accumulators accumulators(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part);

/// g = p / (v^T p) - b / (v^T b): the gradient of log J at v with the signs
/// held fixed. Tangent to the sphere (v^T g = 0). Throws ZeroDenominator when
/// either inner product vanishes relative to the accumulator norm.
Eigen::VectorXd ascent_direction(const Eigen::VectorXd& v, const Eigen::VectorXd& p, const Eigen::VectorXd& b);

struct RestartOutcome {
  Eigen::VectorXd initial;
  Eigen::VectorXd final;
  double initial_objective = 0.0;  // NaN when the initial point is degenerate
  double final_objective = 0.0;    // NaN when the restart ended degenerate
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
  int safeguard_retries = 0;
  int perturbations = 0;
};

struct DirectionResult {
  Eigen::VectorXd direction;  // unit norm
  double objective = 0.0;
  int best_restart = 0;
  std::vector<RestartOutcome> restarts;

  DirectionDiagnostics diagnostics() const;
};

/// One projection direction. Each restart r starts from a uniformly random
/// unit vector drawn with seed (cfg.seed XOR r) and iterates
///   v <- normalize(v + gamma g(v))
/// until the step is <= epsilon or itmax iterations are spent. A step that
/// lowers J is redone once with gamma / 2. On a zero denominator v is nudged
/// by a random vector of norm perturb_scale. The best restart by J wins
/// (lowest index on ties). Throws ZeroWithinDispersion when every restart
/// ends degenerate.
DirectionResult solve_direction(const Eigen::MatrixXd& x, const ClassPartition& part, const SolverConfig& cfg);
DirectionResult solve_direction(const LabeledDataset& ds, const ClassPartition& part, const SolverConfig& cfg);

/// d directions by repeated solve + deflation X <- X - v v^T X. Each new
/// direction is Gram-Schmidt orthogonalized against the accepted ones before
/// deflating, so the basis is orthonormal. Direction j > 1 uses seed
/// derive_seed(cfg.seed, j - 1). Throws InvalidArgument unless 1 <= d < D and
/// DimensionExhausted when the residual data degenerates before d directions.
Projection fit_l1sc(const LabeledDataset& ds, const SolverConfig& cfg, Index d);

}  // namespace l1sc
