#include "l1sc/experiment.hpp"

#include "l1sc/error.hpp"
#include "l1sc/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace l1sc {

namespace {

template <typename T>
std::string join_list(const std::vector<T>& values) {
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_same_v<T, double>) {
      s += format_double(values[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      s += '"' + values[i] + '"';
    } else {
      s += std::to_string(values[i]);
    }
  }
  return s + "]";
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

struct HelpRequested {
  std::string text;
};

/// CLI11 app whose options write straight into `cfg`.
class Parser {
 public:
  Parser() {
    app_.set_config("--config", "", "Read defaults from a key=value file; flags override it");
    app_.option_defaults()->always_capture_default();
    auto& c = cfg_;
    app_.add_option("--data", c.data, "Dataset file; empty selects the synthetic benchmark");
    app_.add_option("--format", c.format, "Dataset format: csv | rawf64");
    app_.add_option("--synth-dim", c.synth_dim, "Synthetic benchmark: feature dimension");
    app_.add_option("--synth-classes", c.synth_classes, "Synthetic benchmark: class count");
    app_.add_option("--synth-per-class", c.synth_per_class, "Synthetic benchmark: samples per class");
    app_.add_option("--synth-modes", c.synth_modes, "Synthetic benchmark: mixture components per class");
    app_.add_option("--synth-separation", c.synth_separation, "Synthetic benchmark: distance between class centres");
    app_.add_option("--synth-mode-spread", c.synth_mode_spread, "Synthetic benchmark: mode offset from class centre");
    app_.add_option("--synth-outlier-fraction", c.synth_outlier_fraction, "Synthetic benchmark: outlier fraction per class");
    app_.add_option("--synth-outlier-scale", c.synth_outlier_scale, "Synthetic benchmark: outlier covariance multiplier");
    app_.add_option("--method", c.method, "Reduction for fit/eval: l1sc | l2sc | lda | none");
    app_.add_option("--methods", c.methods, "Reductions for sweeps and table1 (default l1sc,l2sc,lda)")
        ->delimiter(',')
        ->expected(0, CLI::detail::expected_max_vector_size)
        ->always_capture_default(false)
        ->default_str("");
    app_.add_option("--d", c.d, "Target dimension");
    app_.add_option("--train-per-class", c.train_per_class, "Training samples per class");
    app_.add_option("--repetitions", c.repetitions, "Random splits averaged per cell");
    app_.add_option("--noise", c.noise, "Injected noise, percent of per-band variance");
    app_.add_option("--percents", c.percents, "Noise grid for sweep-noise (default 2,4,6,8,10)")
        ->delimiter(',')
        ->expected(0, CLI::detail::expected_max_vector_size)
        ->always_capture_default(false)
        ->default_str("");
    app_.add_option("--sizes", c.sizes, "Training sizes for sweep-samples (default 10,20,30,40,50)")
        ->delimiter(',')
        ->expected(0, CLI::detail::expected_max_vector_size)
        ->always_capture_default(false)
        ->default_str("");
    app_.add_option("--dims", c.dims, "Dimension grid for table1 (default 5,10,...,50)")
        ->delimiter(',')
        ->expected(0, CLI::detail::expected_max_vector_size)
        ->always_capture_default(false)
        ->default_str("");
    app_.add_option("--gamma", c.gamma, "L1-SC learning rate");
    app_.add_option("--epsilon", c.epsilon, "L1-SC step tolerance");
    app_.add_option("--itmax", c.itmax, "L1-SC iteration cap");
    app_.add_option("--perturb-scale", c.perturb_scale, "L1-SC perturbation norm");
    app_.add_option("--restarts", c.restarts, "L1-SC random restarts per direction");
    app_.add_option("--classifier", c.classifier, "svm | knn");
    app_.add_option("--svm-lambda", c.svm_lambda, "SVM regularization");
    app_.add_option("--svm-epochs", c.svm_epochs, "SVM epochs");
    app_.add_option("--standardize", c.standardize, "z-score features before the SVM");
    app_.add_option("--knn-k", c.knn_k, "Neighbours for knn");
    app_.add_option("--projection", c.projection, "Projection file for transform");
    app_.add_option("--output-format", c.output_format, "Format of written datasets: csv | rawf64");
    app_.add_option("--out", c.out, "Output directory");
    app_.add_option("--seed", c.seed, "Master seed");
    app_.add_option("--jobs", c.jobs, "Worker threads for sweeps (0 = all cores)");

    const std::pair<Command, const char*> subs[] = {
        {Command::Fit, "fit"},
        {Command::Transform, "transform"},
        {Command::Eval, "eval"},
        {Command::SweepSamples, "sweep-samples"},
        {Command::SweepNoise, "sweep-noise"},
        {Command::Table1, "table1"},
        {Command::Synth, "synth"},
        {Command::Noise, "noise"},
    };
    const char* help[] = {
        "Fit a projection and write it with diagnostics",
        "Project a dataset with a saved projection",
        "Run the split/fit/classify protocol once",
        "Accuracy versus training size",
        "Accuracy versus injected noise",
        "Best accuracy over the dimension grid per method",
        "Write the synthetic benchmark dataset",
        "Write a noisy copy of a dataset",
    };
    for (std::size_t i = 0; i < std::size(subs); ++i) {
      auto* sub = app_.add_subcommand(subs[i].second, help[i]);
      sub->fallthrough();
      subcommands_.emplace_back(subs[i].first, sub);
    }
  }

  CLI::App& app() { return app_; }

  /// A list flag given with no values means an empty list, not the default.
  void clear_empty_lists() {
    auto given_empty = [this](const char* name) {
      const auto* opt = app_.get_option(name);
      if (opt->count() == 0) return false;
      for (const auto& r : opt->results()) {
        if (!r.empty() && r != "{}") return false;
      }
      return true;
    };
    if (given_empty("--methods")) cfg_.methods.clear();
    if (given_empty("--percents")) cfg_.percents.clear();
    if (given_empty("--sizes")) cfg_.sizes.clear();
    if (given_empty("--dims")) cfg_.dims.clear();
  }
  ExperimentConfig& config() { return cfg_; }

  Command selected() const {
    for (const auto& [cmd, sub] : subcommands_) {
      if (sub->parsed()) return cmd;
    }
    throw UsageError("no subcommand given");
  }

 private:
  CLI::App app_{"L1-norm scaling cut: fit projections and run evaluation protocols", "l1sc"};
  ExperimentConfig cfg_;
  std::vector<std::pair<Command, CLI::App*>> subcommands_;
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Rethrows the
/// failure with the smallest index, so errors do not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::string> sorted_methods(const ExperimentConfig& cfg) {
  auto methods = cfg.methods;
  std::sort(methods.begin(), methods.end());
  return methods;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string dataset_extension(const std::string& format) { return format == "csv" ? ".csv" : ".f64"; }

}  // namespace

// ---------------------------------------------------------------------------

std::string ExperimentConfig::to_text() const {
  std::ostringstream s;
  s << "data=" << quoted(data) << "\n";
  s << "format=" << quoted(format) << "\n";
  s << "synth-dim=" << synth_dim << "\n";
  s << "synth-classes=" << synth_classes << "\n";
  s << "synth-per-class=" << synth_per_class << "\n";
  s << "synth-modes=" << synth_modes << "\n";
  s << "synth-separation=" << format_double(synth_separation) << "\n";
  s << "synth-mode-spread=" << format_double(synth_mode_spread) << "\n";
  s << "synth-outlier-fraction=" << format_double(synth_outlier_fraction) << "\n";
  s << "synth-outlier-scale=" << format_double(synth_outlier_scale) << "\n";
  s << "method=" << quoted(method) << "\n";
  s << "methods=" << join_list(methods) << "\n";
  s << "d=" << d << "\n";
  s << "train-per-class=" << train_per_class << "\n";
  s << "repetitions=" << repetitions << "\n";
  s << "noise=" << format_double(noise) << "\n";
  s << "percents=" << join_list(percents) << "\n";
  s << "sizes=" << join_list(sizes) << "\n";
  s << "dims=" << join_list(dims) << "\n";
  s << "gamma=" << format_double(gamma) << "\n";
  s << "epsilon=" << format_double(epsilon) << "\n";
  s << "itmax=" << itmax << "\n";
  s << "perturb-scale=" << format_double(perturb_scale) << "\n";
  s << "restarts=" << restarts << "\n";
  s << "classifier=" << quoted(classifier) << "\n";
  s << "svm-lambda=" << format_double(svm_lambda) << "\n";
  s << "svm-epochs=" << svm_epochs << "\n";
  s << "standardize=" << (standardize ? "true" : "false") << "\n";
  s << "knn-k=" << knn_k << "\n";
  s << "projection=" << quoted(projection) << "\n";
  s << "output-format=" << quoted(output_format) << "\n";
  s << "out=" << quoted(out) << "\n";
  s << "seed=" << seed << "\n";
  s << "jobs=" << jobs << "\n";
  return s.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // out and jobs do not change any result
  ExperimentConfig c = *this;
  c.out.clear();
  c.jobs = 0;
  const auto text = c.to_text();
  return fnv1a(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

SolverConfig ExperimentConfig::solver() const {
  SolverConfig s;
  s.gamma = gamma;
  s.epsilon = epsilon;
  s.itmax = itmax;
  s.perturb_scale = perturb_scale;
  s.restarts = restarts;
  s.seed = seed;
  return s;
}

ClassifierSpec ExperimentConfig::classifier_spec() const {
  ClassifierSpec c;
  c.kind = classifier == "knn" ? ClassifierKind::Knn : ClassifierKind::Svm;
  c.svm.lambda = svm_lambda;
  c.svm.epochs = svm_epochs;
  c.svm.standardize = standardize;
  c.k = knn_k;
  return c;
}

ProtocolSpec ExperimentConfig::protocol(const std::string& method_name) const {
  ProtocolSpec p;
  p.method.method = parse_method(method_name);
  p.method.solver = solver();
  p.classifier = classifier_spec();
  p.d = d;
  p.train_per_class = train_per_class;
  p.repetitions = repetitions;
  p.noise_percent = noise;
  p.seed = seed;
  return p;
}

CommandLine parse_command_line(std::span<const std::string> args) {
  Parser parser;
  parser.app().require_subcommand(1);
  try {
    parser.app().parse(std::vector<std::string>(args.rbegin(), args.rend()));
    parser.clear_empty_lists();
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{parser.app().help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{parser.app().help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return CommandLine{parser.selected(), parser.config()};
}

ExperimentConfig parse_config_text(const std::string& text) {
  Parser parser;
  std::istringstream in(text);
  try {
    parser.app().parse_from_stream(in);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return parser.config();
}

void validate(Command command, const ExperimentConfig& c) {
  auto fail = [](const std::string& why) { throw UsageError(why); };
  auto known_method = [](const std::string& m) { return m == "l1sc" || m == "l2sc" || m == "lda" || m == "none"; };
  if (c.format != "csv" && c.format != "rawf64") fail("--format must be csv or rawf64");
  if (c.output_format != "csv" && c.output_format != "rawf64") fail("--output-format must be csv or rawf64");
  if (!known_method(c.method)) fail("unknown --method '" + c.method + "'");
  for (const auto& m : c.methods) {
    if (!known_method(m)) fail("unknown method '" + m + "' in --methods");
  }
  if (c.d < 1) fail("--d must be at least 1");
  if (c.train_per_class < 1) fail("--train-per-class must be at least 1");
  if (c.repetitions < 1) fail("--repetitions must be at least 1");
  if (!(c.noise >= 0.0 && c.noise <= 100.0)) fail("--noise must lie in [0, 100]");
  if (!(c.gamma > 0.0)) fail("--gamma must be positive");
  if (!(c.epsilon > 0.0)) fail("--epsilon must be positive");
  if (c.itmax < 1) fail("--itmax must be at least 1");
  if (!(c.perturb_scale > 0.0)) fail("--perturb-scale must be positive");
  if (c.restarts < 1) fail("--restarts must be at least 1");
  if (c.classifier != "svm" && c.classifier != "knn") fail("--classifier must be svm or knn");
  if (!(c.svm_lambda > 0.0)) fail("--svm-lambda must be positive");
  if (c.svm_epochs < 1) fail("--svm-epochs must be at least 1");
  if (c.knn_k < 1) fail("--knn-k must be at least 1");
  if (c.jobs < 0) fail("--jobs must be non-negative");
  if (c.data.empty()) {
    if (c.synth_dim < 1 || c.synth_classes < 2 || c.synth_classes > c.synth_dim) {
      fail("synthetic benchmark needs 2 <= --synth-classes <= --synth-dim");
    }
    if (c.synth_per_class < 1 || c.synth_modes < 1) fail("--synth-per-class and --synth-modes must be positive");
    if (!(c.synth_outlier_fraction >= 0.0 && c.synth_outlier_fraction < 1.0)) {
      fail("--synth-outlier-fraction must lie in [0, 1)");
    }
    if (!(c.synth_outlier_scale > 0.0)) fail("--synth-outlier-scale must be positive");
  }
  switch (command) {
    case Command::SweepSamples:
      if (c.methods.empty()) fail("--methods is empty");
      if (c.sizes.empty()) fail("--sizes is empty");
      for (auto s : c.sizes) {
        if (s < 1) fail("--sizes entries must be positive");
      }
      break;
    case Command::SweepNoise:
      if (c.methods.empty()) fail("--methods is empty");
      if (c.percents.empty()) fail("--percents is empty");
      for (double p : c.percents) {
        if (!(p >= 0.0 && p <= 100.0)) fail("--percents entries must lie in [0, 100]");
      }
      break;
    case Command::Table1:
      if (c.methods.empty()) fail("--methods is empty");
      if (c.dims.empty()) fail("--dims is empty");
      for (auto d : c.dims) {
        if (d < 1) fail("--dims entries must be positive");
      }
      break;
    case Command::Transform:
      if (c.projection.empty()) fail("transform needs --projection");
      if (c.data.empty()) fail("transform needs --data");
      break;
    case Command::Noise:
      if (c.data.empty()) fail("noise needs --data");
      break;
    default:
      break;
  }
}

LabeledDataset load_input(const ExperimentConfig& cfg) {
  if (!cfg.data.empty()) return load_dataset(cfg.data, parse_format(cfg.format));
  BenchmarkSpec spec;
  spec.dim = cfg.synth_dim;
  spec.classes = cfg.synth_classes;
  spec.per_class = cfg.synth_per_class;
  spec.modes = cfg.synth_modes;
  spec.separation = cfg.synth_separation;
  spec.mode_spread = cfg.synth_mode_spread;
  spec.outlier_fraction = cfg.synth_outlier_fraction;
  spec.outlier_scale = cfg.synth_outlier_scale;
  spec.seed = cfg.seed;
  return synth_gmm(benchmark_mixture(spec));
}

std::string csv_provenance(const ExperimentConfig& cfg) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(cfg.hash()));
  return "# seed=" + std::to_string(cfg.seed) + " config_hash=" + hex + "\n";
}

FitOutput cmd_fit(const ExperimentConfig& cfg, const LabeledDataset& ds) {
  MethodSpec spec;
  spec.method = parse_method(cfg.method);
  spec.solver = cfg.solver();
  FitOutput out{fit_method(spec, ds, cfg.d, cfg.seed), {}};
  out.projection.metadata["config_hash"] = csv_provenance(cfg).substr(2, std::string::npos);
  out.projection.metadata["config_hash"].pop_back();

  nlohmann::ordered_json j;
  j["method"] = out.projection.method;
  j["input_dim"] = out.projection.input_dim();
  j["output_dim"] = out.projection.output_dim();
  j["samples"] = ds.size();
  j["classes"] = ds.num_classes();
  j["seed"] = cfg.seed;
  auto& cols = j["columns"] = nlohmann::ordered_json::array();
  for (const auto& dg : out.projection.diagnostics) {
    nlohmann::ordered_json c;
    c["objective"] = dg.objective;
    c["iterations"] = dg.iterations;
    c["converged"] = dg.converged;
    c["restart"] = dg.restart;
    c["safeguard_retries"] = dg.safeguard_retries;
    c["perturbations"] = dg.perturbations;
    std::vector<bool> rc;
    for (char x : dg.restart_converged) rc.push_back(x != 0);
    c["restart_converged"] = rc;
    cols.push_back(std::move(c));
  }
  j["metadata"] = out.projection.metadata;
  out.diagnostics_json = j.dump(2) + "\n";
  return out;
}

namespace {

struct SweepCell {
  std::string method;
  double value;
  EvalReport report;
};

std::string sweep_csv(const ExperimentConfig& cfg, const std::string& column, const std::vector<SweepCell>& cells,
                      bool integral) {
  std::ostringstream out;
  out << csv_provenance(cfg);
  out << "method," << column << ",meanOA,stdOA,macroF1\n";
  for (const auto& c : cells) {
    out << c.method << ",";
    if (integral) {
      out << static_cast<long long>(c.value);
    } else {
      out << format_double(c.value);
    }
    out << "," << format_double(c.report.mean_oa) << "," << format_double(c.report.std_oa) << ","
        << format_double(c.report.macro_f1) << "\n";
  }
  return out.str();
}

}  // namespace

std::string cmd_sweep_samples(const ExperimentConfig& cfg, const LabeledDataset& ds) {
  auto sizes = cfg.sizes;
  std::sort(sizes.begin(), sizes.end());
  std::vector<SweepCell> cells;
  for (const auto& m : sorted_methods(cfg)) {
    for (auto s : sizes) cells.push_back({m, static_cast<double>(s), {}});
  }
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    auto spec = cfg.protocol(cells[i].method);
    spec.train_per_class = static_cast<std::size_t>(cells[i].value);
    cells[i].report = run_protocol(ds, spec);
  });
  return sweep_csv(cfg, "size", cells, true);
}

std::string cmd_sweep_noise(const ExperimentConfig& cfg, const LabeledDataset& ds) {
  auto percents = cfg.percents;
  std::sort(percents.begin(), percents.end());
  std::vector<SweepCell> cells;
  for (const auto& m : sorted_methods(cfg)) {
    for (auto p : percents) cells.push_back({m, p, {}});
  }
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    auto spec = cfg.protocol(cells[i].method);
    spec.noise_percent = cells[i].value;
    cells[i].report = run_protocol(ds, spec);
  });
  return sweep_csv(cfg, "noise", cells, false);
}

std::vector<Table1Row> cmd_table1(const ExperimentConfig& cfg, const LabeledDataset& ds) {
  auto dims = cfg.dims;
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  struct Cell {
    std::string method;
    long d;
    EvalReport report;
  };
  std::vector<Cell> cells;
  for (const auto& m : sorted_methods(cfg)) {
    if (m == "none") {
      cells.push_back({m, static_cast<long>(ds.dim()), {}});
      continue;
    }
    for (auto d : dims) {
      if (d < ds.dim()) cells.push_back({m, d, {}});
    }
  }
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
    auto spec = cfg.protocol(cells[i].method);
    spec.d = cells[i].d;
    cells[i].report = run_protocol(ds, spec);
  });
  std::vector<Table1Row> rows;
  for (const auto& m : sorted_methods(cfg)) {
    const Cell* best = nullptr;
    for (const auto& c : cells) {
      // cells are in ascending d, so strict > keeps the smallest d on ties
      if (c.method == m && (best == nullptr || c.report.mean_oa > best->report.mean_oa)) best = &c;
    }
    if (best == nullptr) {
      throw Error(ErrorCode::InvalidArgument, "no dimension grid value below D=" + std::to_string(ds.dim()));
    }
    rows.push_back({m, best->d, best->report.mean_oa, best->report.std_oa, best->report.macro_f1});
  }
  return rows;
}

std::string table1_csv(const ExperimentConfig& cfg, const std::vector<Table1Row>& rows) {
  std::ostringstream out;
  out << csv_provenance(cfg);
  out << "method,dims,meanOA,stdOA,macroF1\n";
  for (const auto& r : rows) {
    out << r.method << "," << r.dims << "," << format_double(r.mean_oa) << "," << format_double(r.std_oa) << ","
        << format_double(r.macro_f1) << "\n";
  }
  return out.str();
}

std::string table1_json(const ExperimentConfig& cfg, const std::vector<Table1Row>& rows) {
  nlohmann::ordered_json j;
  j["seed"] = cfg.seed;
  j["config_hash"] = cfg.hash();
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"method", r.method},
                   {"dims", r.dims},
                   {"mean_oa", r.mean_oa},
                   {"std_oa", r.std_oa},
                   {"macro_f1", r.macro_f1}});
  }
  return j.dump(2) + "\n";
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CommandLine cl;
  try {
    cl = parse_command_line(args);
    validate(cl.command, cl.config);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  const auto& cfg = cl.config;
  try {
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    switch (cl.command) {
      case Command::Fit: {
        const auto result = cmd_fit(cfg, load_input(cfg));
        save_projection(dir / "projection.bin", result.projection);
        write_text(dir / "fit.json", result.diagnostics_json);
        out << "wrote " << (dir / "projection.bin").string() << " (" << result.projection.input_dim() << "x"
            << result.projection.output_dim() << ")\n";
        break;
      }
      case Command::Transform: {
        const auto proj = load_projection(cfg.projection);
        const auto projected = transform(proj, load_input(cfg));
        const auto path = dir / ("transformed" + dataset_extension(cfg.output_format));
        save_dataset(path, projected, parse_format(cfg.output_format));
        out << "wrote " << path.string() << "\n";
        break;
      }
      case Command::Eval: {
        const auto report = run_protocol(load_input(cfg), cfg.protocol(cfg.method));
        write_text(dir / "report.json", report_json(report));
        write_text(dir / "report.csv", csv_provenance(cfg) + report_csv(report));
        out << report.method << " d=" << report.d << " OA=" << format_double(report.mean_oa) << " +- "
            << format_double(report.std_oa) << " macroF1=" << format_double(report.macro_f1) << "\n";
        break;
      }
      case Command::SweepSamples: {
        const auto csv = cmd_sweep_samples(cfg, load_input(cfg));
        write_text(dir / "sweep_samples.csv", csv);
        out << csv;
        break;
      }
      case Command::SweepNoise: {
        const auto csv = cmd_sweep_noise(cfg, load_input(cfg));
        write_text(dir / "sweep_noise.csv", csv);
        out << csv;
        break;
      }
      case Command::Table1: {
        const auto rows = cmd_table1(cfg, load_input(cfg));
        const auto csv = table1_csv(cfg, rows);
        write_text(dir / "table1.csv", csv);
        write_text(dir / "table1.json", table1_json(cfg, rows));
        out << csv;
        break;
      }
      case Command::Synth: {
        const auto path = dir / ("synth" + dataset_extension(cfg.output_format));
        save_dataset(path, load_input(cfg), parse_format(cfg.output_format));
        out << "wrote " << path.string() << "\n";
        break;
      }
      case Command::Noise: {
        const auto noisy = inject_noise(load_input(cfg), cfg.noise, derive_seed(cfg.seed, 1));
        const auto path = dir / ("noisy" + dataset_extension(cfg.output_format));
        save_dataset(path, noisy, parse_format(cfg.output_format));
        out << "wrote " << path.string() << "\n";
        break;
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace l1sc
