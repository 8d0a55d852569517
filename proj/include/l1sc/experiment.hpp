#pragma once

// Command-line front end: configuration, parsing and the subcommands, kept in
// the library so that tests can drive them without a process boundary.

#include "l1sc/dataset.hpp"
#include "l1sc/eval.hpp"
#include "l1sc/l1_scaling_cut.hpp"
#include "l1sc/projection.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1sc {

/// Bad flags or values. The CLI maps it to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Fit, Transform, Eval, SweepSamples, SweepNoise, Table1, Synth, Noise };

struct ExperimentConfig {
  // input: a data file, or the synthetic benchmark when `data` is empty
  std::string data;
  std::string format = "csv";
  int synth_dim = 20;
  int synth_classes = 2;
  std::size_t synth_per_class = 100;
  int synth_modes = 1;
  double synth_separation = 3.0;
  double synth_mode_spread = 4.0;
  double synth_outlier_fraction = 0.0;
  double synth_outlier_scale = 20.0;

  std::string method = "l1sc";                          // fit, eval
  std::vector<std::string> methods{"l1sc", "l2sc", "lda"};  // sweeps, table1
  long d = 10;
  std::size_t train_per_class = 10;
  int repetitions = 5;
  double noise = 0.0;                                   // eval, sweep-samples, noise
  std::vector<double> percents{2, 4, 6, 8, 10};         // sweep-noise
  std::vector<std::size_t> sizes{10, 20, 30, 40, 50};   // sweep-samples
  std::vector<long> dims{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};  // table1

  double gamma = 0.1;
  double epsilon = 1e-6;
  int itmax = 200;
  double perturb_scale = 1e-6;
  int restarts = 5;

  std::string classifier = "svm";
  double svm_lambda = 1e-3;
  int svm_epochs = 100;
  bool standardize = true;
  int knn_k = 1;

  std::string projection;             // transform input
  std::string output_format = "csv";  // transform, synth, noise
  std::string out = "out";
  std::uint64_t seed = 0;
  int jobs = 0;  // worker threads for sweeps; 0 = hardware concurrency

  bool operator==(const ExperimentConfig&) const = default;

  /// "key=value" lines readable by --config.
  std::string to_text() const;
  /// FNV-1a of to_text() with out and jobs cleared.
  std::uint64_t hash() const;

  SolverConfig solver() const;
  ClassifierSpec classifier_spec() const;
  ProtocolSpec protocol(const std::string& method_name) const;
};

struct CommandLine {
  Command command = Command::Fit;
  ExperimentConfig config;
};

/// Parses arguments (without the program name). `--config FILE` loads
/// defaults from a file; explicit flags override it. Throws UsageError.
CommandLine parse_command_line(std::span<const std::string> args);

/// Reads the to_text() representation back.
ExperimentConfig parse_config_text(const std::string& text);

/// Range checks that do not depend on the data; throws UsageError.
void validate(Command command, const ExperimentConfig& cfg);

LabeledDataset load_input(const ExperimentConfig& cfg);

/// Comment header carried by every report CSV.
std::string csv_provenance(const ExperimentConfig& cfg);

struct FitOutput {
  Projection projection;
  std::string diagnostics_json;
};
FitOutput cmd_fit(const ExperimentConfig& cfg, const LabeledDataset& ds);

/// Aggregate rows "method,size,meanOA,stdOA,macroF1", sorted by method then size.
std::string cmd_sweep_samples(const ExperimentConfig& cfg, const LabeledDataset& ds);
/// Aggregate rows "method,noise,meanOA,stdOA,macroF1", sorted by method then noise.
std::string cmd_sweep_noise(const ExperimentConfig& cfg, const LabeledDataset& ds);

struct Table1Row {
  std::string method;
  long dims = 0;
  double mean_oa = 0.0;
  double std_oa = 0.0;
  double macro_f1 = 0.0;
};
/// Best mean OA over the dimension grid per method (smallest d on ties).
/// Grid values >= D are skipped; "none" is evaluated once at d = D.
std::vector<Table1Row> cmd_table1(const ExperimentConfig& cfg, const LabeledDataset& ds);
std::string table1_csv(const ExperimentConfig& cfg, const std::vector<Table1Row>& rows);
std::string table1_json(const ExperimentConfig& cfg, const std::vector<Table1Row>& rows);

/// The whole program. Returns the exit status: 0 success, 2 usage error,
/// 1 runtime or data error.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace l1sc
