#include "l1sc/dataset.hpp"
#include "l1sc/experiment.hpp"
#include "l1sc/projection.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

using namespace l1sc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("l1sc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Non-comment lines after the header.
std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// small synthetic problem shared by the end-to-end cases
const std::vector<std::string> kSmall{"--synth-dim", "6", "--synth-per-class", "60", "--d", "2", "--repetitions", "2",
                                      "--restarts", "1"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

}  // namespace

TEST_CASE("exit status") {
  TempDir tmp;
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"eval", "--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eval", "--no-such-flag", "1", "--out", tmp / "o"}).code == 2);
  CHECK(run({"fit", "--d", "0", "--out", tmp / "o"}).code == 2);
  CHECK(run({"eval", "--d", "abc", "--out", tmp / "o"}).code == 2);
  CHECK(run({"sweep-samples", "--sizes", "--out", tmp / "o"}).code == 2);
  CHECK(run({"sweep-noise", "--percents=-2", "--out", tmp / "o"}).code == 2);
  CHECK(run({"noise", "--noise=-1", "--out", tmp / "o"}).code == 2);
  CHECK(run({"eval", "--gamma", "0", "--out", tmp / "o"}).code == 2);
  CHECK(run({"eval", "--method", "pca", "--out", tmp / "o"}).code == 2);

  const auto missing = run({"eval", "--data", tmp / "absent.csv", "--out", tmp / "o"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("error") != std::string::npos);
  // d valid for the parser but not for the data
  CHECK(run({"fit", "--synth-dim", "6", "--d", "6", "--out", tmp / "o"}).code == 1);
  // single-valued options may be given once
  CHECK(run({"eval", "--d", "2", "--d", "3", "--out", tmp / "o"}).code == 2);
}

TEST_CASE("configuration text") {
  ExperimentConfig cfg;
  cfg.data = "some dir/x.csv";
  cfg.method = "lda";
  cfg.methods = {"none", "l2sc"};
  cfg.d = 7;
  cfg.percents = {0.5, 3};
  cfg.sizes = {5};
  cfg.dims = {1, 2, 3};
  cfg.gamma = 0.0125;
  cfg.standardize = false;
  cfg.seed = 123456789012345ULL;
  cfg.synth_outlier_fraction = 0.1;
  CHECK(parse_config_text(cfg.to_text()) == cfg);
  CHECK(parse_config_text(ExperimentConfig{}.to_text()) == ExperimentConfig{});
  CHECK(cfg.hash() != ExperimentConfig{}.hash());
  CHECK(cfg.hash() == parse_config_text(cfg.to_text()).hash());
  auto moved = cfg;
  moved.out = "elsewhere";
  moved.jobs = 3;
  CHECK(moved.hash() == cfg.hash());
}

TEST_CASE("config file with overriding flags") {
  TempDir tmp;
  ExperimentConfig file_cfg;
  file_cfg.d = 3;
  file_cfg.seed = 5;
  file_cfg.method = "l2sc";
  {
    std::ofstream f(tmp / "run.ini");
    f << file_cfg.to_text();
  }
  const std::vector<std::string> args{"eval", "--config", tmp / "run.ini", "--seed", "7"};
  const auto cl = parse_command_line(args);
  CHECK(cl.command == Command::Eval);
  CHECK(cl.config.d == 3);
  CHECK(cl.config.method == "l2sc");
  CHECK(cl.config.seed == 7);
}

TEST_CASE("end to end") {
  TempDir tmp;

  SUBCASE("same configuration, identical files") {
    const auto args = with_small({"sweep-samples", "--sizes", "10,20", "--methods", "l1sc,lda"});
    auto a = args, b = args;
    a.insert(a.end(), {"--out", tmp / "a", "--jobs", "4"});
    b.insert(b.end(), {"--out", tmp / "b", "--jobs", "1"});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    CHECK(slurp(tmp / "a/sweep_samples.csv") == slurp(tmp / "b/sweep_samples.csv"));
  }

  SUBCASE("row counts") {
    REQUIRE(run(with_small({"sweep-samples", "--out", tmp / "s"})).code == 0);
    const auto samples = data_rows(slurp(tmp / "s/sweep_samples.csv"));
    CHECK(samples.size() == 15);
    CHECK(samples.front()[0] == "l1sc");
    CHECK(samples.front()[1] == "10");
    CHECK(samples.back()[0] == "lda");
    CHECK(samples.back()[1] == "50");

    REQUIRE(run(with_small({"sweep-noise", "--methods", "lda,l2sc", "--out", tmp / "n"})).code == 0);
    const auto noise = data_rows(slurp(tmp / "n/sweep_noise.csv"));
    CHECK(noise.size() == 10);
    CHECK(noise.front()[0] == "l2sc");

    REQUIRE(run(with_small({"eval", "--out", tmp / "e"})).code == 0);
    const auto report = data_rows(slurp(tmp / "e/report.csv"));
    REQUIRE(report.size() == 3);
    CHECK(report.back()[4] == "mean");
    CHECK(slurp(tmp / "e/report.csv").rfind("# seed=0 config_hash=", 0) == 0);
  }

  SUBCASE("zero noise row equals the clean eval") {
    REQUIRE(run(with_small({"sweep-noise", "--methods", "lda", "--percents", "0", "--out", tmp / "n"})).code == 0);
    REQUIRE(run(with_small({"eval", "--method", "lda", "--out", tmp / "e"})).code == 0);
    const auto noise = data_rows(slurp(tmp / "n/sweep_noise.csv"));
    const auto report = data_rows(slurp(tmp / "e/report.csv"));
    REQUIRE(noise.size() == 1);
    CHECK(noise[0][2] == report.back()[6]);
    CHECK(noise[0][3] == report.back()[7]);
    CHECK(noise[0][4] == report.back()[8]);
  }

  SUBCASE("table1 on well separated classes") {
    const auto r = run(with_small({"table1", "--synth-separation", "60", "--dims", "3,1,2,9", "--methods", "lda,l2sc,none",
                                   "--out", tmp / "t"}));
    REQUIRE(r.code == 0);
    const auto rows = data_rows(slurp(tmp / "t/table1.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"l2sc", "1", "1", "0", "1"});
    CHECK(rows[1] == std::vector<std::string>{"lda", "1", "1", "0", "1"});
    CHECK(rows[2][0] == "none");
    CHECK(rows[2][1] == "6");
    CHECK(slurp(tmp / "t/table1.json").find("\"rows\"") != std::string::npos);
  }

  SUBCASE("synth, fit and transform") {
    REQUIRE(run(with_small({"synth", "--out", tmp / "d"})).code == 0);
    const auto ds = load_dataset(tmp / "d/synth.csv", DataFormat::Csv);
    CHECK(ds.dim() == 6);
    CHECK(ds.size() == 120);

    REQUIRE(run(with_small({"fit", "--data", tmp / "d/synth.csv", "--out", tmp / "f"})).code == 0);
    const auto proj = load_projection(tmp / "f/projection.bin");
    CHECK(proj.input_dim() == 6);
    CHECK(proj.output_dim() == 2);
    CHECK(proj.metadata.count("config_hash") == 1);
    CHECK(slurp(tmp / "f/fit.json").find("\"columns\"") != std::string::npos);

    REQUIRE(run({"transform", "--data", tmp / "d/synth.csv", "--projection", tmp / "f/projection.bin", "--out",
                 tmp / "t"}).code == 0);
    const auto projected = load_dataset(tmp / "t/transformed.csv", DataFormat::Csv);
    CHECK(projected.dim() == 2);
    CHECK(projected.size() == 120);
    const Eigen::MatrixXd expected = proj.basis.transpose() * ds.features();
    CHECK((projected.features() - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());

    // the file written by synth evaluates exactly like the generated data
    REQUIRE(run(with_small({"eval", "--method", "l2sc", "--out", tmp / "e1"})).code == 0);
    REQUIRE(run(with_small({"eval", "--method", "l2sc", "--data", tmp / "d/synth.csv", "--out", tmp / "e2"})).code == 0);
    CHECK(data_rows(slurp(tmp / "e1/report.csv")).back()[6] == data_rows(slurp(tmp / "e2/report.csv")).back()[6]);
  }

  SUBCASE("noise subcommand") {
    REQUIRE(run(with_small({"synth", "--out", tmp / "d"})).code == 0);
    REQUIRE(run({"noise", "--data", tmp / "d/synth.csv", "--noise", "0", "--out", tmp / "z"}).code == 0);
    CHECK(slurp(tmp / "z/noisy.csv") == slurp(tmp / "d/synth.csv"));
    REQUIRE(run({"noise", "--data", tmp / "d/synth.csv", "--noise", "5", "--out", tmp / "five"}).code == 0);
    CHECK(slurp(tmp / "five/noisy.csv") != slurp(tmp / "d/synth.csv"));
  }
}
