#include "support.hpp"

#include "l1sc/dataset.hpp"
#include "l1sc/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace l1sc;
using namespace l1sc::testing;

namespace {

ErrorCode code_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_dataset(in, DataFormat::Csv);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

std::string bytes_of(const LabeledDataset& ds, DataFormat format) {
  std::ostringstream out;
  write_dataset(out, ds, format);
  return out.str();
}

std::vector<std::vector<double>> sorted_columns(const Eigen::MatrixXd& x) {
  std::vector<std::vector<double>> cols;
  for (Index j = 0; j < x.cols(); ++j) cols.emplace_back(x.col(j).data(), x.col(j).data() + x.rows());
  std::sort(cols.begin(), cols.end());
  return cols;
}

}  // namespace

TEST_CASE("minimal csv") {
  std::istringstream in("# D=2 n=3 C=2\n0.5,1,1\n-2,3e-1,1\n4,4,2\n");
  const auto ds = read_dataset(in, DataFormat::Csv);
  CHECK(ds.dim() == 2);
  CHECK(ds.size() == 3);
  CHECK(ds.num_classes() == 2);
  CHECK(ds.label(0) == 1);
  CHECK(ds.label(2) == 2);
  CHECK(ds.features()(1, 1) == 0.3);
}

TEST_CASE("labels are remapped in order of first appearance") {
  std::istringstream in("# D=1 n=4 C=3\n1,7\n2,-3\n3,7\n4,10\n");
  const auto ds = read_dataset(in, DataFormat::Csv);
  CHECK(ds.label(0) == 1);
  CHECK(ds.label(1) == 2);
  CHECK(ds.label(2) == 1);
  CHECK(ds.label(3) == 3);
  CHECK(ds.original_label(2) == -3);
  const auto text = bytes_of(ds, DataFormat::Csv);
  CHECK(text == "# D=1 n=4 C=3\n1,7\n2,-3\n3,7\n4,10\n");
}

TEST_CASE("csv errors carry distinct codes") {
  CHECK(code_of("# D=2 n=1 C=2\nNaN,1,1\n") == ErrorCode::NonFiniteValue);
  CHECK(code_of("# D=2 n=1 C=2\n1,inf,1\n") == ErrorCode::NonFiniteValue);
  CHECK(code_of("# D=2 n=2\n1,2,1\n") == ErrorCode::MalformedHeader);
  CHECK(code_of("") == ErrorCode::MalformedHeader);
  CHECK(code_of("# D=2 n=2 C=2\n1,2\n3,4,2\n") == ErrorCode::MissingLabel);
  CHECK(code_of("# D=2 n=2 C=2\n1,x,1\n3,4,2\n") == ErrorCode::MalformedRow);
  CHECK(code_of("# D=2 n=2 C=2\n1,2,1\n3,4,1\n") == ErrorCode::EmptyClass);
  CHECK(code_of("# D=2 n=3 C=2\n1,2,1\n3,4,2\n") == ErrorCode::SizeMismatch);
}

TEST_CASE("NaN error names the row and column") {
  std::istringstream in("# D=2 n=2 C=2\n1,2,1\n3,NaN,2\n");
  try {
    read_dataset(in, DataFormat::Csv);
    FAIL("expected NonFiniteValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
    const std::string what = e.what();
    CHECK(what.find("3") != std::string::npos);
    CHECK(what.find("2") != std::string::npos);
  }
}

TEST_CASE("constructor invariants") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(LabeledDataset(x, {1, 1}, 2), Error);
  CHECK_THROWS_AS(LabeledDataset(x, {1, 1, 1}, 2), Error);
  CHECK_THROWS_AS(LabeledDataset(x, {1, 1, 1}, 1), Error);
  CHECK_THROWS_AS(LabeledDataset(x, {1, 2, 3}, 2), Error);
  x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LabeledDataset(x, {1, 2, 2}, 2), Error);
}

TEST_CASE("csv and rawf64 round trips are exact") {
  Rng rng(11);
  const auto ds = random_dataset(rng, 4, 3, 2, 6);
  for (auto format : {DataFormat::Csv, DataFormat::RawF64}) {
    const auto bytes = bytes_of(ds, format);
    std::istringstream in(bytes);
    const auto back = read_dataset(in, format);
    CHECK(back.features() == ds.features());
    for (Index i = 0; i < ds.size(); ++i) CHECK(back.original_label(back.label(i)) == ds.label(i));
    CHECK(bytes_of(back, format) == bytes);
  }
}

TEST_CASE("rawf64 rejects truncation and trailing bytes") {
  Rng rng(12);
  const auto bytes = bytes_of(random_dataset(rng, 3, 2, 2, 3), DataFormat::RawF64);
  std::istringstream short_in(bytes.substr(0, bytes.size() - 1));
  CHECK_THROWS_AS(read_dataset(short_in, DataFormat::RawF64), Error);
  std::istringstream long_in(bytes + "x");
  CHECK_THROWS_AS(read_dataset(long_in, DataFormat::RawF64), Error);
}

TEST_CASE("Salinas-shaped rawf64 file") {
  const Index dim = 204;
  const Index n = 54129;
  const int classes = 16;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = 1 + static_cast<int>(i % classes);
  Eigen::MatrixXd x(dim, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < dim; ++i) x(i, j) = static_cast<double>((i * 31 + j * 7) % 1000) / 1000.0;
  }
  const LabeledDataset ds(std::move(x), labels, classes);
  const auto path = std::filesystem::temp_directory_path() / "l1sc_salinas_shape.f64";
  save_dataset(path, ds, DataFormat::RawF64);
  CHECK(std::filesystem::file_size(path) == 24u + 8u * 204u * 54129u + 4u * 54129u);
  const auto back = load_dataset(path, DataFormat::RawF64);
  std::filesystem::remove(path);
  CHECK(back.dim() == 204);
  CHECK(back.size() == 54129);
  CHECK(back.num_classes() == 16);
  CHECK(back.features() == ds.features());
}

TEST_CASE("matrix block round trip") {
  Rng rng(13);
  const Eigen::MatrixXd m = random_matrix(rng, 3, 5);
  std::stringstream io;
  write_matrix_block(io, m);
  CHECK(read_matrix_block(io) == m);
}

TEST_CASE("class partition covers every sample once") {
  Rng rng(14);
  const auto ds = random_dataset(rng, 2, 4, 1, 9);
  const ClassPartition part(ds);
  std::vector<int> seen(static_cast<std::size_t>(ds.size()), 0);
  Index total = 0;
  for (int k = 1; k <= 4; ++k) {
    total += part.count(k);
    CHECK(part.complement_count(k) == ds.size() - part.count(k));
    CHECK(std::is_sorted(part.members(k).begin(), part.members(k).end()));
    for (Index i : part.members(k)) {
      CHECK(ds.label(i) == k);
      ++seen[static_cast<std::size_t>(i)];
    }
  }
  CHECK(total == ds.size());
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
}

TEST_CASE("stratified split") {
  Rng rng(15);
  std::vector<int> labels;
  for (int k = 1; k <= 16; ++k) labels.insert(labels.end(), static_cast<std::size_t>(11 + k), k);
  const auto n = static_cast<Index>(labels.size());
  const LabeledDataset ds(random_matrix(rng, 3, n), labels, 16);

  SUBCASE("ten per class over sixteen classes") {
    const auto split = stratified_split(ds, SplitSpec{10, 5, 0});
    CHECK(split.train.size() == 160);
    CHECK(split.test.size() == n - 160);
    const ClassPartition part(split.train);
    for (int k = 1; k <= 16; ++k) CHECK(part.count(k) == 10);
  }
  SUBCASE("union is the original multiset of columns") {
    const auto split = stratified_split(ds, SplitSpec{10, 5, 3});
    Eigen::MatrixXd both(ds.dim(), n);
    both << split.train.features(), split.test.features();
    CHECK(sorted_columns(both) == sorted_columns(ds.features()));
    std::vector<Index> all = split.train_indices;
    all.insert(all.end(), split.test_indices.begin(), split.test_indices.end());
    std::sort(all.begin(), all.end());
    for (Index i = 0; i < n; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
  }
  SUBCASE("deterministic and repetition dependent") {
    const auto a = stratified_split(ds, SplitSpec{10, 5, 1});
    const auto b = stratified_split(ds, SplitSpec{10, 5, 1});
    const auto c = stratified_split(ds, SplitSpec{10, 5, 2});
    CHECK(a.train_indices == b.train_indices);
    CHECK(bytes_of(a.train, DataFormat::RawF64) == bytes_of(b.train, DataFormat::RawF64));
    CHECK(bytes_of(a.test, DataFormat::RawF64) == bytes_of(b.test, DataFormat::RawF64));
    CHECK(a.train_indices != c.train_indices);
  }
  SUBCASE("class too small") {
    try {
      stratified_split(ds, SplitSpec{12, 5, 0});  // class 1 has exactly 12 samples
      FAIL("expected InsufficientClassSize");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientClassSize);
    }
  }
}

TEST_CASE("synth_gmm") {
  MixtureSpec spec;
  spec.seed = 21;
  spec.components = {{1, Eigen::Vector2d(2, 0), Eigen::Matrix2d::Identity(), 100},
                     {2, Eigen::Vector2d(-2, 0), Eigen::Matrix2d::Identity(), 100}};
  const auto ds = synth_gmm(spec);
  CHECK(ds.dim() == 2);
  CHECK(ds.size() == 200);

  SUBCASE("class means concentrate") {
    Eigen::Vector2d m1 = Eigen::Vector2d::Zero(), m2 = Eigen::Vector2d::Zero();
    for (Index i = 0; i < ds.size(); ++i) (ds.label(i) == 1 ? m1 : m2) += ds.features().col(i) / 100.0;
    CHECK((m1 - Eigen::Vector2d(2, 0)).norm() < 0.5);
    CHECK((m2 - Eigen::Vector2d(-2, 0)).norm() < 0.5);
  }
  SUBCASE("no outliers: every point within 6 sigma") {
    for (Index i = 0; i < ds.size(); ++i) {
      const Eigen::Vector2d mean(ds.label(i) == 1 ? 2.0 : -2.0, 0.0);
      CHECK((ds.features().col(i) - mean).norm() < 6.0);
    }
  }
  SUBCASE("reproducible") {
    const auto again = synth_gmm(spec);
    CHECK(again.features() == ds.features());
    CHECK(labels_of(again) == labels_of(ds));
  }
  SUBCASE("outliers are far out") {
    auto noisy = spec;
    noisy.outlier_fraction = 0.1;
    noisy.outlier_scale = 400.0;
    const auto out = synth_gmm(noisy);
    int far = 0;
    for (Index i = 0; i < out.size(); ++i) {
      const Eigen::Vector2d mean(out.label(i) == 1 ? 2.0 : -2.0, 0.0);
      far += (out.features().col(i) - mean).norm() > 6.0;
    }
    CHECK(far >= 10);
    CHECK(far <= 20);
  }
  SUBCASE("two far-apart components in one class") {
    auto multi = spec;
    multi.components.push_back({1, Eigen::Vector2d(20, 0), Eigen::Matrix2d::Identity(), 100});
    const auto bimodal = synth_gmm(multi);
    int near_first = 0, near_second = 0;
    for (Index i = 0; i < bimodal.size(); ++i) {
      if (bimodal.label(i) != 1) continue;
      near_first += bimodal.features()(0, i) < 11.0;
      near_second += bimodal.features()(0, i) >= 11.0;
    }
    CHECK(near_first == 100);
    CHECK(near_second == 100);
  }
  SUBCASE("non-PSD covariance") {
    auto bad = spec;
    bad.components[0].covariance << 1, 2, 2, 1;
    try {
      synth_gmm(bad);
      FAIL("expected NonPsdCovariance");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPsdCovariance);
    }
  }
}

TEST_CASE("benchmark mixture") {
  BenchmarkSpec b;
  b.seed = 3;
  const auto ds = synth_gmm(benchmark_mixture(b));
  CHECK(ds.dim() == 10);
  CHECK(ds.size() == 200);
  CHECK(ds.num_classes() == 2);
  b.modes = 3;
  b.classes = 4;
  const auto multi = synth_gmm(benchmark_mixture(b));
  CHECK(multi.size() == 400);
  CHECK(multi.num_classes() == 4);
}

TEST_CASE("inject_noise") {
  Rng rng(31);
  const Index n = 20000;
  Eigen::MatrixXd x(2, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    x(0, j) = j % 2 == 0 ? 2.0 : -2.0;  // population variance exactly 4
    x(1, j) = rng.normal() * 100.0;
    labels[static_cast<std::size_t>(j)] = 1 + static_cast<int>(j % 2);
  }
  const LabeledDataset ds(x, labels, 2);

  SUBCASE("zero percent is a bit-exact copy") {
    const auto same = inject_noise(ds, 0.0, 9);
    CHECK(bytes_of(same, DataFormat::RawF64) == bytes_of(ds, DataFormat::RawF64));
  }
  SUBCASE("ten percent of variance 4") {
    const auto noisy = inject_noise(ds, 10.0, 9);
    const Eigen::VectorXd added = noisy.features().row(0) - ds.features().row(0);
    const double mean = added.mean();
    const double var = (added.array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sigma = 0.4 * std::sqrt(2.0 / static_cast<double>(n - 1));
    CHECK(std::abs(var - 0.4) <= 3.0 * sigma);
    CHECK(labels_of(noisy) == labels);
    CHECK(noisy.dim() == 2);
    CHECK(noisy.size() == n);
  }
  SUBCASE("noise scales per row") {
    const auto noisy = inject_noise(ds, 10.0, 9);
    const Eigen::VectorXd added = noisy.features().row(1) - ds.features().row(1);
    const double row_var = (ds.features().row(1).array() - ds.features().row(1).mean()).square().mean();
    const double var = (added.array() - added.mean()).square().sum() / static_cast<double>(n - 1);
    CHECK(var / (0.1 * row_var) == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("reproducible and seed dependent") {
    CHECK(inject_noise(ds, 4.0, 1).features() == inject_noise(ds, 4.0, 1).features());
    CHECK(inject_noise(ds, 4.0, 1).features() != inject_noise(ds, 4.0, 2).features());
  }
  SUBCASE("sweep grid 2..10") {
    int made = 0;
    for (double pct = 2.0; pct <= 10.0; pct += 2.0) {
      const auto noisy = inject_noise(ds, pct, 5);
      const Eigen::VectorXd added = noisy.features().row(0) - ds.features().row(0);
      CHECK(added.squaredNorm() / n == doctest::Approx(4.0 * pct / 100.0).epsilon(0.1));
      ++made;
    }
    CHECK(made == 5);
  }
  SUBCASE("negative percent") {
    CHECK_THROWS_AS(inject_noise(ds, -1.0, 0), Error);
  }
}

TEST_CASE("rng streams are fixed") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.index(7) < 7u);
  }
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}
