#include "l1sc/eval.hpp"

#include "l1sc/baselines.hpp"
#include "l1sc/error.hpp"
#include "l1sc/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace l1sc {

LinearSvm::LinearSvm(Eigen::MatrixXd weights, Eigen::VectorXd bias, Eigen::VectorXd shift, Eigen::VectorXd scale)
    : weights_(std::move(weights)), bias_(std::move(bias)), shift_(std::move(shift)), scale_(std::move(scale)) {}

Eigen::MatrixXd LinearSvm::margins(const Eigen::MatrixXd& x) const {
  if (x.rows() != weights_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "classifier expects " + std::to_string(weights_.cols()) + " features");
  }
  const Eigen::MatrixXd z = (x.colwise() - shift_).array().colwise() / scale_.array();
  return (weights_ * z).colwise() + bias_;
}

std::vector<int> LinearSvm::predict(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd m = margins(x);
  std::vector<int> out(static_cast<std::size_t>(x.cols()));
  for (Index j = 0; j < m.cols(); ++j) {
    Index best = 0;
    for (Index c = 1; c < m.rows(); ++c) {
      if (m(c, j) > m(best, j)) best = c;
    }
    out[static_cast<std::size_t>(j)] = static_cast<int>(best) + 1;
  }
  return out;
}

LinearSvm train_linear_svm(const LabeledDataset& train, const SvmParams& params) {
  if (!(params.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (params.epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be positive");
  const Index dim = train.dim();
  const Index n = train.size();
  const int classes = train.num_classes();

  Eigen::VectorXd shift = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(dim);
  if (params.standardize) {
    shift = train.features().rowwise().mean();
    for (Index i = 0; i < dim; ++i) {
      const double sd = std::sqrt((train.features().row(i).array() - shift[i]).square().mean());
      scale[i] = sd > 0.0 ? sd : 1.0;
    }
  }
  // Augmented samples [z; 1].
  Eigen::MatrixXd z(dim + 1, n);
  z.topRows(dim) = (train.features().colwise() - shift).array().colwise() / scale.array();
  z.row(dim).setOnes();

  Eigen::MatrixXd weights(classes, dim);
  Eigen::VectorXd bias(classes);
  const double radius = 1.0 / std::sqrt(params.lambda);
  for (int c = 1; c <= classes; ++c) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(c)));
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim + 1);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.index(i))]);
      }
      for (Index idx : order) {
        ++t;
        const double eta = 1.0 / (params.lambda * static_cast<double>(t));
        const double y = train.label(idx) == c ? 1.0 : -1.0;
        const double margin = y * w.dot(z.col(idx));
        w *= (1.0 - eta * params.lambda);
        if (margin < 1.0) w += eta * y * z.col(idx);
        const double norm = w.norm();
        if (norm > radius) w *= radius / norm;
      }
    }
    weights.row(c - 1) = w.head(dim).transpose();
    bias[c - 1] = w[dim];
  }
  return LinearSvm(std::move(weights), std::move(bias), std::move(shift), std::move(scale));
}

std::vector<int> knn_classify(const LabeledDataset& train, const Eigen::MatrixXd& test, int k) {
  if (train.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty training set");
  if (k < 1 || k > train.size()) {
    throw Error(ErrorCode::InvalidArgument, "k=" + std::to_string(k) + " outside [1, " +
                                                std::to_string(train.size()) + "]");
  }
  if (test.rows() != train.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "test samples have " + std::to_string(test.rows()) +
                                                  " features, training samples " + std::to_string(train.dim()));
  }
  const auto& x = train.features();
  const Index n = x.cols();
  std::vector<int> out(static_cast<std::size_t>(test.cols()));
  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n));
  std::vector<int> votes(static_cast<std::size_t>(train.num_classes()));
  for (Index j = 0; j < test.cols(); ++j) {
    for (Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = {(x.col(i) - test.col(j)).squaredNorm(), i};
    // pair ordering: distance, then training index
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::fill(votes.begin(), votes.end(), 0);
    for (int t = 0; t < k; ++t) ++votes[static_cast<std::size_t>(train.label(dist[static_cast<std::size_t>(t)].second) - 1)];
    // max_element returns the first maximum, i.e. the smallest label
    out[static_cast<std::size_t>(j)] = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin()) + 1;
  }
  return out;
}

Metrics metrics(std::span<const int> predicted, std::span<const int> truth, int num_classes) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::SizeMismatch, std::to_string(predicted.size()) + " predictions for " +
                                             std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw Error(ErrorCode::InvalidArgument, "no samples to score");
  const auto classes = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (int label : {predicted[i], truth[i]}) {
      if (label < 1 || label > num_classes) {
        throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(label) + " at position " + std::to_string(i + 1));
      }
    }
    const auto p = static_cast<std::size_t>(predicted[i] - 1);
    const auto t = static_cast<std::size_t>(truth[i] - 1);
    if (p == t) {
      ++correct;
      ++tp[t];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  Metrics m;
  m.overall_accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (std::size_t k = 0; k < classes; ++k) {
    const double precision = tp[k] + fp[k] > 0 ? static_cast<double>(tp[k]) / static_cast<double>(tp[k] + fp[k]) : 0.0;
    const double recall = tp[k] + fn[k] > 0 ? static_cast<double>(tp[k]) / static_cast<double>(tp[k] + fn[k]) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.per_class_f1.push_back(f1);
  }
  m.macro_f1 = std::accumulate(m.per_class_f1.begin(), m.per_class_f1.end(), 0.0) / static_cast<double>(classes);
  return m;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::L1sc: return "l1sc";
    case Method::L2sc: return "l2sc";
    case Method::Lda: return "lda";
    case Method::None: return "none";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::L1sc, Method::L2sc, Method::Lda, Method::None}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t hash) noexcept {
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

Projection fit_method(const MethodSpec& spec, const LabeledDataset& train, Index d, std::uint64_t seed) {
  switch (spec.method) {
    case Method::L1sc: {
      SolverConfig cfg = spec.solver;
      cfg.seed = seed;
      return fit_l1sc(train, cfg, d);
    }
    case Method::L2sc: return fit_l2sc(train, d);
    case Method::Lda: return fit_lda(train, d);
    case Method::None: {
      Projection p;
      p.method = "none";
      p.basis = Eigen::MatrixXd::Identity(train.dim(), train.dim());
      return p;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

EvalReport run_protocol(const LabeledDataset& ds, const ProtocolSpec& spec) {
  if (spec.repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");
  if (spec.method.method != Method::None && (spec.d < 1 || spec.d >= ds.dim())) {
    throw Error(ErrorCode::InvalidArgument, "target dimension " + std::to_string(spec.d) + " outside [1, " +
                                                std::to_string(ds.dim() - 1) + "]");
  }
  const auto start = std::chrono::steady_clock::now();
  EvalReport report;
  report.method = std::string(to_string(spec.method.method));
  report.classifier = spec.classifier.kind == ClassifierKind::Svm ? "svm" : "knn";
  report.d = spec.method.method == Method::None ? ds.dim() : spec.d;
  report.train_per_class = spec.train_per_class;
  report.noise_percent = spec.noise_percent;
  report.seed = spec.seed;

  for (int r = 0; r < spec.repetitions; ++r) {
    const auto rep_start = std::chrono::steady_clock::now();
    RepetitionResult rep;
    rep.index = r;
    rep.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(r));
    const LabeledDataset data = inject_noise(ds, spec.noise_percent, derive_seed(rep.seed, 1));
    const auto split = stratified_split(data, SplitSpec{spec.train_per_class, rep.seed, static_cast<std::uint64_t>(r)});
    const Projection proj = fit_method(spec.method, split.train, spec.d, derive_seed(rep.seed ^ spec.method.solver.seed, 2));
    rep.dims = proj.output_dim();
    rep.projection_fingerprint = fnv1a(std::span(reinterpret_cast<const unsigned char*>(proj.basis.data()),
                                                 static_cast<std::size_t>(proj.basis.size()) * sizeof(double)));
    const auto train = transform(proj, split.train);
    const Eigen::MatrixXd test = transform(proj, split.test.features());
    std::vector<int> predicted;
    if (spec.classifier.kind == ClassifierKind::Svm) {
      SvmParams svm = spec.classifier.svm;
      svm.seed = derive_seed(rep.seed, 3);
      predicted = train_linear_svm(train, svm).predict(test);
    } else {
      predicted = knn_classify(train, test, spec.classifier.k);
    }
    const auto m = metrics(predicted, split.test.labels(), ds.num_classes());
    rep.overall_accuracy = m.overall_accuracy;
    rep.macro_f1 = m.macro_f1;
    rep.per_class_f1 = m.per_class_f1;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - rep_start).count();
    report.repetitions.push_back(std::move(rep));
  }

  const double count = static_cast<double>(report.repetitions.size());
  report.per_class_f1.assign(static_cast<std::size_t>(ds.num_classes()), 0.0);
  for (const auto& rep : report.repetitions) {
    report.mean_oa += rep.overall_accuracy / count;
    report.macro_f1 += rep.macro_f1 / count;
    for (std::size_t k = 0; k < rep.per_class_f1.size(); ++k) report.per_class_f1[k] += rep.per_class_f1[k] / count;
  }
  if (report.repetitions.size() > 1) {
    double ss = 0.0;
    for (const auto& rep : report.repetitions) ss += (rep.overall_accuracy - report.mean_oa) * (rep.overall_accuracy - report.mean_oa);
    report.std_oa = std::sqrt(ss / (count - 1.0));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto& cfg = report.config;
  cfg["classifier"] = report.classifier;
  cfg["dr_fit_on"] = "train split only";
  cfg["noise_injection"] = "whole dataset, before splitting";
  if (spec.classifier.kind == ClassifierKind::Svm) {
    cfg["svm.lambda"] = format_double(spec.classifier.svm.lambda);
    cfg["svm.epochs"] = std::to_string(spec.classifier.svm.epochs);
    cfg["svm.standardize"] = spec.classifier.svm.standardize ? "true" : "false";
  } else {
    cfg["knn.k"] = std::to_string(spec.classifier.k);
  }
  if (spec.method.method == Method::L1sc) {
    const auto& s = spec.method.solver;
    cfg["solver.gamma"] = format_double(s.gamma);
    cfg["solver.epsilon"] = format_double(s.epsilon);
    cfg["solver.itmax"] = std::to_string(s.itmax);
    cfg["solver.perturb_scale"] = format_double(s.perturb_scale);
    cfg["solver.restarts"] = std::to_string(s.restarts);
    cfg["solver.seed"] = std::to_string(s.seed);
  }
  if (spec.method.method == Method::L2sc || spec.method.method == Method::Lda) {
    cfg["preprocessing"] = "none (ridge 1e-8*Tr(B)/D instead of PCA)";
  }
  return report;
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["classifier"] = report.classifier;
  j["dims"] = report.d;
  j["train_per_class"] = report.train_per_class;
  j["noise_percent"] = report.noise_percent;
  j["seed"] = report.seed;
  j["mean_oa"] = report.mean_oa;
  j["std_oa"] = report.std_oa;
  j["macro_f1"] = report.macro_f1;
  j["per_class_f1"] = report.per_class_f1;
  j["wall_seconds"] = report.wall_seconds;
  auto& reps = j["repetitions"] = nlohmann::ordered_json::array();
  for (const auto& rep : report.repetitions) {
    nlohmann::ordered_json r;
    r["index"] = rep.index;
    r["seed"] = rep.seed;
    r["oa"] = rep.overall_accuracy;
    r["macro_f1"] = rep.macro_f1;
    r["per_class_f1"] = rep.per_class_f1;
    r["dims"] = rep.dims;
    r["projection_fingerprint"] = rep.projection_fingerprint;
    r["seconds"] = rep.seconds;
    reps.push_back(std::move(r));
  }
  j["config"] = report.config;
  return j.dump(2) + "\n";
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "method,dims,train_per_class,noise_percent,row,seed,oa,oa_std,macro_f1\n";
  const auto prefix = report.method + "," + std::to_string(report.d) + "," + std::to_string(report.train_per_class) +
                      "," + format_double(report.noise_percent) + ",";
  for (const auto& rep : report.repetitions) {
    out << prefix << rep.index << "," << rep.seed << "," << format_double(rep.overall_accuracy) << ",,"
        << format_double(rep.macro_f1) << "\n";
  }
  out << prefix << "mean," << report.seed << "," << format_double(report.mean_oa) << ","
      << format_double(report.std_oa) << "," << format_double(report.macro_f1) << "\n";
  return out.str();
}

}  // namespace l1sc
