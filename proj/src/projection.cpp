#include "l1sc/projection.hpp"

#include "l1sc/error.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

namespace l1sc {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

LabeledDataset transform(const Projection& p, const LabeledDataset& ds) {
  return ds.with_features(transform(p, ds.features()));
}

Eigen::MatrixXd transform(const Projection& p, const Eigen::MatrixXd& x) {
  if (x.rows() != p.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "data has " + std::to_string(x.rows()) + " features, projection expects " +
                                                  std::to_string(p.input_dim()));
  }
  return p.basis.transpose() * x;
}

namespace {

double parse_double(const std::string& text, const std::string& key) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::MalformedRow, "metadata '" + key + "' is not a number");
  }
  return value;
}

int parse_int(const std::string& text, const std::string& key) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::MalformedRow, "metadata '" + key + "' is not an integer");
  }
  return value;
}

}  // namespace

void write_projection(std::ostream& out, const Projection& p) {
  write_matrix_block(out, p.basis);
  std::ostringstream text;
  text << "method=" << p.method << "\n";
  text << "D=" << p.input_dim() << "\n";
  text << "d=" << p.output_dim() << "\n";
  for (std::size_t j = 0; j < p.diagnostics.size(); ++j) {
    const auto& dg = p.diagnostics[j];
    const auto prefix = "column." + std::to_string(j + 1) + ".";
    text << prefix << "objective=" << format_double(dg.objective) << "\n";
    text << prefix << "iterations=" << dg.iterations << "\n";
    text << prefix << "converged=" << (dg.converged ? 1 : 0) << "\n";
    text << prefix << "restart=" << dg.restart << "\n";
    text << prefix << "safeguard_retries=" << dg.safeguard_retries << "\n";
    text << prefix << "perturbations=" << dg.perturbations << "\n";
    text << prefix << "restart_converged=";
    for (char c : dg.restart_converged) text << (c ? '1' : '0');
    text << "\n";
  }
  for (const auto& [key, value] : p.metadata) text << "meta." << key << "=" << value << "\n";
  const auto s = text.str();
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out) throw Error(ErrorCode::IoError, "projection write failed");
}

Projection read_projection(std::istream& in) {
  Projection p;
  p.basis = read_matrix_block(in);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::MalformedRow, "metadata line without '=': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto take = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::MalformedHeader, "projection metadata lacks '" + key + "'");
    return it->second;
  };
  p.method = take("method");
  if (parse_int(take("D"), "D") != p.basis.rows() || parse_int(take("d"), "d") != p.basis.cols()) {
    throw Error(ErrorCode::SizeMismatch, "projection metadata disagrees with the matrix block shape");
  }
  for (Index j = 0; j < p.basis.cols(); ++j) {
    const auto prefix = "column." + std::to_string(j + 1) + ".";
    if (!kv.contains(prefix + "objective")) break;
    DirectionDiagnostics dg;
    dg.objective = parse_double(take(prefix + "objective"), prefix + "objective");
    dg.iterations = parse_int(take(prefix + "iterations"), prefix + "iterations");
    dg.converged = take(prefix + "converged") == "1";
    dg.restart = parse_int(take(prefix + "restart"), prefix + "restart");
    dg.safeguard_retries = parse_int(take(prefix + "safeguard_retries"), prefix + "safeguard_retries");
    dg.perturbations = parse_int(take(prefix + "perturbations"), prefix + "perturbations");
    for (char c : take(prefix + "restart_converged")) dg.restart_converged.push_back(c == '1' ? 1 : 0);
    p.diagnostics.push_back(std::move(dg));
  }
  for (const auto& [key, value] : kv) {
    if (key.rfind("meta.", 0) == 0) p.metadata[key.substr(5)] = value;
  }
  return p;
}

void save_projection(const std::filesystem::path& path, const Projection& p) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot create " + path.string());
  write_projection(out, p);
}

Projection load_projection(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_projection(in);
}

}  // namespace l1sc
