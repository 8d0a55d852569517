#include "l1sc/dataset.hpp"

#include "binary_io.hpp"
#include "l1sc/error.hpp"
#include "l1sc/linalg.hpp"
#include "l1sc/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>

namespace l1sc {

namespace {

std::string cell(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

std::vector<std::int64_t> identity_labels(int num_classes) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(std::max(num_classes, 0)));
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<std::int64_t>(k + 1);
  return v;
}

/// Remaps arbitrary label values to 1..C by first appearance.
struct LabelRemap {
  std::vector<int> labels;
  std::vector<std::int64_t> originals;
};

LabelRemap remap_labels(std::span<const std::int64_t> raw) {
  LabelRemap out;
  out.labels.reserve(raw.size());
  std::unordered_map<std::int64_t, int> ids;
  for (auto value : raw) {
    auto [it, inserted] = ids.try_emplace(value, static_cast<int>(out.originals.size()) + 1);
    if (inserted) out.originals.push_back(value);
    out.labels.push_back(it->second);
  }
  return out;
}

void check_class_count(const LabelRemap& remap, std::uint64_t declared) {
  const auto present = remap.originals.size();
  if (present < declared) {
    throw Error(ErrorCode::EmptyClass, "header declares C=" + std::to_string(declared) + " but only " +
                                           std::to_string(present) + " classes have samples");
  }
  if (present > declared) {
    throw Error(ErrorCode::SizeMismatch, "header declares C=" + std::to_string(declared) + " but " +
                                             std::to_string(present) + " distinct labels were found");
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_header_field(std::string_view token, std::string_view key, std::uint64_t& value) {
  if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key || token[key.size()] != '=') {
    return false;
  }
  const auto digits = token.substr(key.size() + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  return ec == std::errc{} && ptr == digits.data() + digits.size();
}

LabeledDataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedHeader, "empty input");
  std::uint64_t d = 0, n = 0, c = 0;
  {
    std::istringstream hs{std::string(trim(line))};
    std::string hash, td, tn, tc, extra;
    hs >> hash >> td >> tn >> tc;
    if (hash != "#" || !parse_header_field(td, "D", d) || !parse_header_field(tn, "n", n) ||
        !parse_header_field(tc, "C", c) || (hs >> extra)) {
      throw Error(ErrorCode::MalformedHeader, "expected '# D=<int> n=<int> C=<int>', got '" + line + "'");
    }
    if (d == 0 || c < 2) throw Error(ErrorCode::MalformedHeader, "D must be >= 1 and C >= 2");
  }

  Eigen::MatrixXd x(static_cast<Index>(d), static_cast<Index>(n));
  std::vector<std::int64_t> raw;
  raw.reserve(n);
  std::size_t row = 1;  // file line number; header is line 1
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (raw.size() == n) {
      throw Error(ErrorCode::SizeMismatch, "more than n=" + std::to_string(n) + " samples (line " +
                                               std::to_string(row) + ")");
    }
    const auto sample = static_cast<Index>(raw.size());
    std::size_t col = 0;
    std::size_t start = 0;
    bool have_label = false;
    while (start <= text.size()) {
      auto end = text.find(',', start);
      if (end == std::string_view::npos) end = text.size();
      const auto field = trim(text.substr(start, end - start));
      ++col;
      if (col <= d) {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
          if (ec == std::errc::result_out_of_range) {
            throw Error(ErrorCode::NonFiniteValue, cell(row, col));
          }
          throw Error(ErrorCode::MalformedRow, "unparsable number '" + std::string(field) + "' at " + cell(row, col));
        }
        if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteValue, cell(row, col));
        x(static_cast<Index>(col - 1), sample) = value;
      } else if (col == d + 1) {
        std::int64_t label = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), label);
        if (ec != std::errc{} || ptr != field.data() + field.size()) {
          throw Error(ErrorCode::MalformedRow, "label '" + std::string(field) + "' is not an integer at " +
                                                   cell(row, col));
        }
        raw.push_back(label);
        have_label = true;
      } else {
        throw Error(ErrorCode::MalformedRow, "too many fields at " + cell(row, col));
      }
      start = end + 1;
    }
    if (!have_label) {
      if (col == d) throw Error(ErrorCode::MissingLabel, "line " + std::to_string(row));
      throw Error(ErrorCode::MalformedRow, "expected " + std::to_string(d + 1) + " fields, got " +
                                               std::to_string(col) + " on line " + std::to_string(row));
    }
  }
  if (raw.size() != n) {
    throw Error(ErrorCode::SizeMismatch, "header declares n=" + std::to_string(n) + " but " +
                                             std::to_string(raw.size()) + " samples were read");
  }
  auto remap = remap_labels(raw);
  check_class_count(remap, c);
  return LabeledDataset(std::move(x), std::move(remap.labels), static_cast<int>(c), std::move(remap.originals));
}

LabeledDataset read_rawf64(std::istream& in) {
  const auto d = detail::get_le<std::uint64_t>(in, "header D");
  const auto n = detail::get_le<std::uint64_t>(in, "header n");
  const auto c = detail::get_le<std::uint64_t>(in, "header C");
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
  if (d == 0 || c < 2 || d > kLimit || n > kLimit || d * n > kLimit) {
    throw Error(ErrorCode::MalformedHeader, "implausible header D=" + std::to_string(d) + " n=" +
                                                std::to_string(n) + " C=" + std::to_string(c));
  }
  Eigen::MatrixXd x(static_cast<Index>(d), static_cast<Index>(n));
  detail::get_le_doubles(in, x.data(), d * n, "feature payload");
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (!std::isfinite(x(i, j))) {
        throw Error(ErrorCode::NonFiniteValue, "sample " + std::to_string(j + 1) + ", feature " +
                                                   std::to_string(i + 1));
      }
    }
  }
  std::vector<std::int64_t> raw(n);
  for (auto& label : raw) label = detail::get_le<std::uint32_t>(in, "labels");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::SizeMismatch, "trailing bytes after label block");
  }
  auto remap = remap_labels(raw);
  check_class_count(remap, c);
  return LabeledDataset(std::move(x), std::move(remap.labels), static_cast<int>(c), std::move(remap.originals));
}

void append_double(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------------------

LabeledDataset::LabeledDataset(Eigen::MatrixXd features, std::vector<int> labels, int num_classes,
                               std::vector<std::int64_t> original_labels)
    : x_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      original_labels_(std::move(original_labels)) {
  if (static_cast<Index>(labels_.size()) != x_.cols()) {
    throw Error(ErrorCode::SizeMismatch, std::to_string(labels_.size()) + " labels for " +
                                             std::to_string(x_.cols()) + " samples");
  }
  if (num_classes_ < 2) throw Error(ErrorCode::InvalidArgument, "at least two classes are required");
  if (original_labels_.empty()) original_labels_ = identity_labels(num_classes_);
  if (static_cast<int>(original_labels_.size()) != num_classes_) {
    throw Error(ErrorCode::SizeMismatch, "original label table does not match class count");
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes_), 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int k = labels_[i];
    if (k < 1 || k > num_classes_) {
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(k) + " of sample " + std::to_string(i + 1));
    }
    ++counts[static_cast<std::size_t>(k - 1)];
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) throw Error(ErrorCode::EmptyClass, "class " + std::to_string(k + 1) + " has no samples");
  }
  if (!x_.allFinite()) {
    for (Index j = 0; j < x_.cols(); ++j) {
      for (Index i = 0; i < x_.rows(); ++i) {
        if (!std::isfinite(x_(i, j))) {
          throw Error(ErrorCode::NonFiniteValue, "sample " + std::to_string(j + 1) + ", feature " +
                                                     std::to_string(i + 1));
        }
      }
    }
  }
}

LabeledDataset LabeledDataset::with_features(Eigen::MatrixXd features) const {
  return LabeledDataset(std::move(features), labels_, num_classes_, original_labels_);
}

LabeledDataset LabeledDataset::subset(std::span<const Index> columns) const {
  Eigen::MatrixXd x(dim(), static_cast<Index>(columns.size()));
  std::vector<int> labels(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    x.col(static_cast<Index>(j)) = x_.col(columns[j]);
    labels[j] = label(columns[j]);
  }
  return LabeledDataset(std::move(x), std::move(labels), num_classes_, original_labels_);
}

ClassPartition::ClassPartition(std::span<const int> labels, int num_classes)
    : labels_(labels.begin(), labels.end()), members_(static_cast<std::size_t>(std::max(num_classes, 0))) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int k = labels_[i];
    if (k < 1 || k > num_classes) {
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(k) + " of sample " + std::to_string(i + 1));
    }
    members_[static_cast<std::size_t>(k - 1)].push_back(static_cast<Index>(i));
  }
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (members_[k].empty()) throw Error(ErrorCode::EmptyClass, "class " + std::to_string(k + 1) + " has no samples");
  }
}

// ---------------------------------------------------------------------------

DataFormat parse_format(std::string_view name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "rawf64") return DataFormat::RawF64;
  throw Error(ErrorCode::InvalidArgument, "unknown data format '" + std::string(name) + "'");
}

LabeledDataset read_dataset(std::istream& in, DataFormat format) {
  return format == DataFormat::Csv ? read_csv(in) : read_rawf64(in);
}

void write_dataset(std::ostream& out, const LabeledDataset& ds, DataFormat format) {
  const auto& x = ds.features();
  if (format == DataFormat::Csv) {
    std::string text = "# D=" + std::to_string(ds.dim()) + " n=" + std::to_string(ds.size()) +
                       " C=" + std::to_string(ds.num_classes()) + "\n";
    for (Index j = 0; j < x.cols(); ++j) {
      for (Index i = 0; i < x.rows(); ++i) {
        append_double(text, x(i, j));
        text += ',';
      }
      text += std::to_string(ds.original_label(ds.label(j)));
      text += '\n';
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  } else {
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(ds.dim()));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(ds.size()));
    detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(ds.num_classes()));
    detail::put_le_doubles(out, x.data(), static_cast<std::size_t>(x.size()));
    for (Index j = 0; j < x.cols(); ++j) {
      const auto original = ds.original_label(ds.label(j));
      if (original < 0 || original > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(original) + " does not fit in u32");
      }
      detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(original));
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed");
}

LabeledDataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_dataset(in, format);
}

void save_dataset(const std::filesystem::path& path, const LabeledDataset& ds, DataFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  write_dataset(out, ds, format);
}

void write_matrix_block(std::ostream& out, const Eigen::MatrixXd& m) {
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  detail::put_le_doubles(out, m.data(), static_cast<std::size_t>(m.size()));
}

Eigen::MatrixXd read_matrix_block(std::istream& in) {
  const auto rows = detail::get_le<std::uint64_t>(in, "matrix rows");
  const auto cols = detail::get_le<std::uint64_t>(in, "matrix cols");
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 32;
  if (rows > kLimit || cols > kLimit || rows * cols > kLimit) {
    throw Error(ErrorCode::MalformedHeader, "implausible matrix block shape");
  }
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  detail::get_le_doubles(in, m.data(), rows * cols, "matrix payload");
  return m;
}

// ---------------------------------------------------------------------------

Split stratified_split(const LabeledDataset& ds, const SplitSpec& spec) {
  if (spec.train_per_class == 0) throw Error(ErrorCode::InvalidArgument, "train_per_class must be positive");
  const ClassPartition part(ds);
  for (int k = 1; k <= part.num_classes(); ++k) {
    if (static_cast<Index>(spec.train_per_class) >= part.count(k)) {
      throw Error(ErrorCode::InsufficientClassSize,
                  "class " + std::to_string(k) + " has " + std::to_string(part.count(k)) + " samples; " +
                      std::to_string(spec.train_per_class) + " for training would leave none for testing");
    }
  }
  Rng rng(derive_seed(spec.seed, spec.repetition));
  std::vector<char> in_train(static_cast<std::size_t>(ds.size()), 0);
  for (int k = 1; k <= part.num_classes(); ++k) {
    std::vector<Index> pool(part.members(k).begin(), part.members(k).end());
    // Partial Fisher-Yates: the first train_per_class slots are the sample.
    for (std::size_t i = 0; i < spec.train_per_class; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.index(pool.size() - i));
      std::swap(pool[i], pool[j]);
      in_train[static_cast<std::size_t>(pool[i])] = 1;
    }
  }
  std::vector<Index> train_idx, test_idx;
  for (Index i = 0; i < ds.size(); ++i) {
    (in_train[static_cast<std::size_t>(i)] ? train_idx : test_idx).push_back(i);
  }
  auto train = ds.subset(train_idx);
  auto test = ds.subset(test_idx);
  return Split{std::move(train), std::move(test), std::move(train_idx), std::move(test_idx)};
}

namespace {

/// Factor f with f f^T = cov, via the symmetric eigendecomposition so that
/// singular PSD covariances are accepted.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov, std::size_t component) {
  const auto where = "component " + std::to_string(component + 1);
  if (cov.rows() != cov.cols()) throw Error(ErrorCode::DimensionMismatch, where + ": covariance not square");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (!cov.allFinite() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::NonPsdCovariance, where + ": covariance is not symmetric");
  }
  const auto eig = jacobi_eigen(cov);
  const double floor = -1e-10 * std::max(1.0, std::abs(eig.values[0]));
  Eigen::VectorXd roots(eig.values.size());
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] < floor) {
      throw Error(ErrorCode::NonPsdCovariance, where + ": eigenvalue " + std::to_string(eig.values[i]));
    }
    roots[i] = std::sqrt(std::max(eig.values[i], 0.0));
  }
  return eig.vectors * roots.asDiagonal();
}

Eigen::VectorXd standard_normal(Rng& rng, Index dim) {
  Eigen::VectorXd z(dim);
  for (Index i = 0; i < dim; ++i) z[i] = rng.normal();
  return z;
}

}  // namespace

LabeledDataset synth_gmm(const MixtureSpec& spec) {
  if (spec.components.empty()) throw Error(ErrorCode::InvalidArgument, "mixture has no components");
  if (!(spec.outlier_fraction >= 0.0 && spec.outlier_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "outlier_fraction must lie in [0, 1)");
  }
  if (!(spec.outlier_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "outlier_scale must be positive");
  const Index dim = spec.components.front().mean.size();
  std::size_t total = 0;
  std::vector<Eigen::MatrixXd> factors;
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    const auto& comp = spec.components[c];
    if (comp.mean.size() != dim || comp.covariance.rows() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "component " + std::to_string(c + 1) + " has the wrong dimension");
    }
    if (comp.count == 0) throw Error(ErrorCode::InvalidArgument, "component " + std::to_string(c + 1) + " is empty");
    factors.push_back(psd_factor(comp.covariance, c));
    total += comp.count;
  }

  Rng rng(spec.seed);
  Eigen::MatrixXd x(dim, static_cast<Index>(total));
  std::vector<std::int64_t> raw;
  raw.reserve(total);
  Index col = 0;
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    const auto& comp = spec.components[c];
    for (std::size_t s = 0; s < comp.count; ++s, ++col) {
      x.col(col) = comp.mean + factors[c] * standard_normal(rng, dim);
      raw.push_back(comp.label);
    }
  }
  auto remap = remap_labels(raw);
  const int num_classes = static_cast<int>(remap.originals.size());

  if (spec.outlier_fraction > 0.0) {
    const ClassPartition part(remap.labels, num_classes);
    for (int k = 1; k <= num_classes; ++k) {
      // Class moments of the generating mixture.
      double weight = 0.0;
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
      for (const auto& comp : spec.components) {
        if (comp.label != remap.originals[static_cast<std::size_t>(k - 1)]) continue;
        weight += static_cast<double>(comp.count);
        mean += static_cast<double>(comp.count) * comp.mean;
      }
      mean /= weight;
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
      for (const auto& comp : spec.components) {
        if (comp.label != remap.originals[static_cast<std::size_t>(k - 1)]) continue;
        const Eigen::VectorXd offset = comp.mean - mean;
        cov += static_cast<double>(comp.count) / weight * (comp.covariance + offset * offset.transpose());
      }
      const Eigen::MatrixXd factor = psd_factor(spec.outlier_scale * cov, static_cast<std::size_t>(k - 1));
      std::vector<Index> pool(part.members(k).begin(), part.members(k).end());
      const auto outliers = static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(pool.size())));
      for (std::size_t i = 0; i < outliers; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.index(pool.size() - i));
        std::swap(pool[i], pool[j]);
        x.col(pool[i]) = mean + factor * standard_normal(rng, dim);
      }
    }
  }
  return LabeledDataset(std::move(x), std::move(remap.labels), num_classes, std::move(remap.originals));
}

MixtureSpec benchmark_mixture(const BenchmarkSpec& spec) {
  if (spec.dim < 1 || spec.classes < 2 || spec.classes > spec.dim || spec.per_class == 0 || spec.modes < 1 ||
      static_cast<std::size_t>(spec.modes) > spec.per_class) {
    throw Error(ErrorCode::InvalidArgument, "benchmark needs 2 <= classes <= dim and 1 <= modes <= per_class");
  }
  Rng rng(derive_seed(spec.seed, 0xbe7c4));
  const Index dim = spec.dim;
  MixtureSpec mix;
  mix.outlier_fraction = spec.outlier_fraction;
  mix.outlier_scale = spec.outlier_scale;
  mix.seed = derive_seed(spec.seed, 1);
  for (int c = 0; c < spec.classes; ++c) {
    Eigen::VectorXd centre = Eigen::VectorXd::Zero(dim);
    centre[c] = spec.separation / std::sqrt(2.0);
    // Random rotation from orthonormalizing a Gaussian matrix.
    Eigen::MatrixXd g(dim, dim);
    for (Index j = 0; j < dim; ++j) g.col(j) = standard_normal(rng, dim);
    const Eigen::MatrixXd q = orthonormalize_columns(g);
    Eigen::VectorXd eigenvalues(dim);
    for (Index i = 0; i < dim; ++i) eigenvalues[i] = std::exp(std::log(0.25) + rng.uniform01() * std::log(16.0));
    Eigen::MatrixXd cov = q * eigenvalues.asDiagonal() * q.transpose();
    cov = 0.5 * (cov + cov.transpose());
    const auto modes = static_cast<std::size_t>(spec.modes);
    for (std::size_t m = 0; m < modes; ++m) {
      GmmComponent comp;
      comp.label = c + 1;
      comp.covariance = cov;
      comp.mean = centre;
      if (modes > 1) {
        Eigen::VectorXd dir = standard_normal(rng, dim);
        comp.mean += spec.mode_spread * dir.normalized();
      }
      comp.count = spec.per_class / modes + (m < spec.per_class % modes ? 1 : 0);
      mix.components.push_back(std::move(comp));
    }
  }
  return mix;
}

LabeledDataset inject_noise(const LabeledDataset& ds, double percent, std::uint64_t seed) {
  if (!(percent >= 0.0 && percent <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise percent must lie in [0, 100], got " + std::to_string(percent));
  }
  if (percent == 0.0) return ds;
  const auto& x = ds.features();
  Eigen::VectorXd sigma(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    const double mean = x.row(i).mean();
    const double var = (x.row(i).array() - mean).square().mean();
    sigma[i] = std::sqrt(percent / 100.0 * var);
  }
  Rng rng(seed);
  Eigen::MatrixXd noisy = x;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) noisy(i, j) += sigma[i] * rng.normal();
  }
  return ds.with_features(std::move(noisy));
}

}  // namespace l1sc
