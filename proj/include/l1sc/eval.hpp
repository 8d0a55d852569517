#pragma once

#include "l1sc/dataset.hpp"
#include "l1sc/l1_scaling_cut.hpp"
#include "l1sc/projection.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace l1sc {

// ---------------------------------------------------------------------------
// Classifiers

struct SvmParams {
  double lambda = 1e-3;
  int epochs = 100;
  bool standardize = true;  // per-feature z-score from training statistics
  std::uint64_t seed = 0;
};

/// One-vs-rest linear SVMs; prediction is the class with the largest margin,
/// ties to the smaller class index.
class LinearSvm {
 public:
  LinearSvm(Eigen::MatrixXd weights, Eigen::VectorXd bias, Eigen::VectorXd shift, Eigen::VectorXd scale);

  std::vector<int> predict(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd margins(const Eigen::MatrixXd& x) const;  // C x n

  const Eigen::MatrixXd& weights() const noexcept { return weights_; }  // C x D
  const Eigen::VectorXd& bias() const noexcept { return bias_; }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd bias_;
  Eigen::VectorXd shift_;
  Eigen::VectorXd scale_;
};

/// Pegasos-style stochastic subgradient descent on the L2-regularized hinge
/// loss, one binary problem per class. Each epoch visits the samples in a
/// seeded permutation; step size 1/(lambda t); the bias is an extra constant
/// feature. Deterministic for a given seed.
LinearSvm train_linear_svm(const LabeledDataset& train, const SvmParams& params);

/// Euclidean k-NN majority vote. Distance ties go to the smaller training
/// index, vote ties to the smaller label. Columns of `test` are samples.
std::vector<int> knn_classify(const LabeledDataset& train, const Eigen::MatrixXd& test, int k);

// ---------------------------------------------------------------------------
// Metrics

struct Metrics {
  double overall_accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;  // index k-1
};

/// One-vs-rest precision/recall per class; F1 = 2PR/(P+R), 0 when P+R = 0
/// (P or R with an empty denominator count as 0).
Metrics metrics(std::span<const int> predicted, std::span<const int> truth, int num_classes);

// ---------------------------------------------------------------------------
// Protocol

enum class Method { L1sc, L2sc, Lda, None };
std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

struct MethodSpec {
  Method method = Method::L1sc;
  SolverConfig solver;  // l1sc only; its seed is mixed into each repetition's solver seed
};

enum class ClassifierKind { Svm, Knn };

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Svm;
  SvmParams svm;  // seed is overridden per repetition
  int k = 1;
};

struct ProtocolSpec {
  MethodSpec method;
  ClassifierSpec classifier;
  Index d = 10;
  std::size_t train_per_class = 10;
  int repetitions = 5;
  double noise_percent = 0.0;
  std::uint64_t seed = 0;
};

/// Fits the dimensionality reduction on `train`; Method::None gives the identity.
Projection fit_method(const MethodSpec& spec, const LabeledDataset& train, Index d, std::uint64_t seed);

struct RepetitionResult {
  int index = 0;
  std::uint64_t seed = 0;
  double overall_accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  Index dims = 0;
  std::uint64_t projection_fingerprint = 0;  // FNV-1a of the basis bytes
  double seconds = 0.0;
};

struct EvalReport {
  std::string method;
  std::string classifier;
  Index d = 0;
  std::size_t train_per_class = 0;
  double noise_percent = 0.0;
  std::uint64_t seed = 0;
  std::vector<RepetitionResult> repetitions;
  double mean_oa = 0.0;
  double std_oa = 0.0;  // sample standard deviation; 0 for one repetition
  double macro_f1 = 0.0;
  std::vector<double> per_class_f1;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> config;
};

/// For each repetition r with seed_r = derive_seed(seed, r): optionally add
/// noise to the whole dataset, split stratified, fit the reduction on the
/// training part, project both parts, train the classifier on the projected
/// training part and score the projected test part. Noise goes in before the
/// split.
EvalReport run_protocol(const LabeledDataset& ds, const ProtocolSpec& spec);

std::string report_json(const EvalReport& report);
/// Header line, one row per repetition, then the aggregate row.
std::string report_csv(const EvalReport& report);

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept;

}  // namespace l1sc
