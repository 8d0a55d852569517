#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace l1sc {

using Index = Eigen::Index;

/// Samples stored column-wise (D features x n samples) with labels in 1..C.
///
/// Construction validates: one label per column, labels in 1..C, every class
/// present, C >= 2 and all features finite. Instances are immutable.
class LabeledDataset {
 public:
  LabeledDataset(Eigen::MatrixXd features, std::vector<int> labels, int num_classes,
                 std::vector<std::int64_t> original_labels = {});

  const Eigen::MatrixXd& features() const noexcept { return x_; }
  std::span<const int> labels() const noexcept { return labels_; }
  int label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  Index dim() const noexcept { return x_.rows(); }
  Index size() const noexcept { return x_.cols(); }
  int num_classes() const noexcept { return num_classes_; }
  /// Label value as it appeared in the source, for class k in 1..C.
  std::int64_t original_label(int k) const { return original_labels_[static_cast<std::size_t>(k - 1)]; }
  const std::vector<std::int64_t>& original_labels() const noexcept { return original_labels_; }

  /// Same labels, different features (any row count, same column count).
  LabeledDataset with_features(Eigen::MatrixXd features) const;
  /// Columns `columns` in the given order. Every class must remain present.
  LabeledDataset subset(std::span<const Index> columns) const;

 private:
  Eigen::MatrixXd x_;
  std::vector<int> labels_;
  int num_classes_;
  std::vector<std::int64_t> original_labels_;
};

/// Per-class member lists U_k with sizes n_k and complement sizes n - n_k.
class ClassPartition {
 public:
  ClassPartition(std::span<const int> labels, int num_classes);
  explicit ClassPartition(const LabeledDataset& ds) : ClassPartition(ds.labels(), ds.num_classes()) {}

  int num_classes() const noexcept { return static_cast<int>(members_.size()); }
  Index size() const noexcept { return static_cast<Index>(labels_.size()); }
  std::span<const int> labels() const noexcept { return labels_; }
  /// Sample indices of class k (1-based class id), ascending.
  std::span<const Index> members(int k) const { return members_[static_cast<std::size_t>(k - 1)]; }
  Index count(int k) const { return static_cast<Index>(members(k).size()); }
  Index complement_count(int k) const { return size() - count(k); }

 private:
  std::vector<int> labels_;
  std::vector<std::vector<Index>> members_;
};

// ---------------------------------------------------------------------------
// File formats
//
// csv:     "# D=<int> n=<int> C=<int>" then one line per sample: D comma
//          separated reals followed by an integer label.
// rawf64:  three little-endian u64 (D, n, C); D*n little-endian f64 in
//          column-major order; n little-endian u32 labels.
//
// Labels are remapped on load to 1..C in order of first appearance; the
// source values are kept and written back on save.

enum class DataFormat { Csv, RawF64 };

DataFormat parse_format(std::string_view name);

LabeledDataset read_dataset(std::istream& in, DataFormat format);
void write_dataset(std::ostream& out, const LabeledDataset& ds, DataFormat format);
LabeledDataset load_dataset(const std::filesystem::path& path, DataFormat format);
void save_dataset(const std::filesystem::path& path, const LabeledDataset& ds, DataFormat format);

/// Bare matrix block: little-endian u64 rows, u64 cols, then column-major f64.
void write_matrix_block(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_block(std::istream& in);

// ---------------------------------------------------------------------------
// Sampling

struct SplitSpec {
  std::size_t train_per_class = 10;
  std::uint64_t seed = 0;
  std::uint64_t repetition = 0;
};

struct Split {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<Index> train_indices;  // into the source dataset, ascending
  std::vector<Index> test_indices;   // ascending, exact complement of train_indices
};

/// Picks `train_per_class` samples of every class uniformly without
/// replacement; the rest form the test set. Throws InsufficientClassSize when
/// a class would be left with no test sample.
Split stratified_split(const LabeledDataset& ds, const SplitSpec& spec);

struct GmmComponent {
  int label = 1;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::size_t count = 0;
};

struct MixtureSpec {
  std::vector<GmmComponent> components;
  double outlier_fraction = 0.0;  // in [0, 1)
  double outlier_scale = 1.0;     // multiplies the class covariance
  std::uint64_t seed = 0;
};

/// Draws every component in order. Per class, round(outlier_fraction * n_class)
/// samples are then replaced by draws from N(class mean, outlier_scale * class
/// covariance), where class mean/covariance are those of the class's mixture.
LabeledDataset synth_gmm(const MixtureSpec& spec);

/// Parameters of the built-in synthetic benchmark (see benchmark_mixture).
struct BenchmarkSpec {
  int dim = 10;
  int classes = 2;
  std::size_t per_class = 100;
  int modes = 1;             // components per class
  double separation = 3.0;   // distance between class centres
  double mode_spread = 4.0;  // distance of each mode from its class centre
  double outlier_fraction = 0.1;
  double outlier_scale = 20.0;
  std::uint64_t seed = 0;
};

/// Class c is centred at separation/sqrt(2) * e_c, so centres are pairwise
/// `separation` apart. Each class gets a seeded anisotropic covariance
/// (random rotation, eigenvalues log-uniform in [0.25, 4]); with modes > 1
/// its samples are split across components displaced by mode_spread along
/// random unit directions.
MixtureSpec benchmark_mixture(const BenchmarkSpec& spec);

/// Adds i.i.d. N(0, percent/100 * var(row)) to every entry of each row, where
/// var is the population variance of that row. percent == 0 returns an exact
/// copy.
LabeledDataset inject_noise(const LabeledDataset& ds, double percent, std::uint64_t seed);

}  // namespace l1sc
