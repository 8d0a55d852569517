#include "l1sc/l1_scaling_cut.hpp"

#include "l1sc/error.hpp"
#include "l1sc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace l1sc {

void SolverConfig::validate() const {
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (itmax < 1) throw Error(ErrorCode::InvalidArgument, "itmax must be at least 1");
  if (!(perturb_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "perturb_scale must be positive");
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be at least 1");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_shapes(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part) {
  if (v.size() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "direction has " + std::to_string(v.size()) + " entries, data has " +
                                                  std::to_string(x.rows()) + " features");
  }
  if (x.cols() != part.size()) {
    throw Error(ErrorCode::SizeMismatch, "partition covers " + std::to_string(part.size()) + " samples, data has " +
                                             std::to_string(x.cols()));
  }
}

struct PairWeights {
  std::vector<double> between;  // 1 / (n_k (n - n_k))
  std::vector<double> within;   // 1 / n_k^2
  std::vector<Index> counts;
};

PairWeights pair_weights(const ClassPartition& part) {
  PairWeights w;
  for (int k = 1; k <= part.num_classes(); ++k) {
    const double nk = static_cast<double>(part.count(k));
    w.between.push_back(1.0 / (nk * static_cast<double>(part.complement_count(k))));
    w.within.push_back(1.0 / (nk * nk));
    w.counts.push_back(part.count(k));
  }
  return w;
}

std::vector<Index> sorted_order(const Eigen::VectorXd& z) {
  std::vector<Index> order(static_cast<std::size_t>(z.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return z[a] < z[b]; });
  return order;
}

Eigen::VectorXd random_direction(Rng& rng, Index dim, double norm) {
  Eigen::VectorXd u(dim);
  double n2 = 0.0;
  do {
    for (Index i = 0; i < dim; ++i) u[i] = rng.normal();
    n2 = u.squaredNorm();
  } while (n2 == 0.0);
  return u * (norm / std::sqrt(n2));
}

/// J(v) without the unit-norm check; NaN for 0/0, +inf for x/0.
double ratio_or_nan(const Dispersion& d) {
  if (d.within > 0.0) return d.between / d.within;
  return d.between > 0.0 ? std::numeric_limits<double>::infinity() : kNaN;
}

}  // namespace

Dispersion l1_dispersion(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part) {
  check_shapes(v, x, part);
  // v and -v give the same gaps in mirrored order; fixing the orientation
  // makes J(v) == J(-v) hold exactly rather than to rounding.
  Index lead = 0;
  while (lead + 1 < v.size() && v[lead] == 0.0) ++lead;
  const Eigen::VectorXd z = v[lead] < 0.0 ? Eigen::VectorXd(x.transpose() * (-v)) : Eigen::VectorXd(x.transpose() * v);
  const auto order = sorted_order(z);
  const auto w = pair_weights(part);
  const auto classes = w.counts.size();
  const auto labels = part.labels();
  const Index n = z.size();

  // left[k]: members of class k among the first t+1 sorted samples.
  std::vector<Index> left(classes, 0);
  Dispersion d;
  for (Index t = 0; t + 1 < n; ++t) {
    ++left[static_cast<std::size_t>(labels[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] - 1)];
    const double gap = z[order[static_cast<std::size_t>(t + 1)]] - z[order[static_cast<std::size_t>(t)]];
    if (gap == 0.0) continue;
    double between = 0.0;
    double within = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double l_in = static_cast<double>(left[k]);
      const double r_in = static_cast<double>(w.counts[k] - left[k]);
      const double l_out = static_cast<double>(t + 1 - left[k]);
      const double r_out = static_cast<double>(n - w.counts[k]) - l_out;
      between += w.between[k] * (l_in * r_out + l_out * r_in);
      within += w.within[k] * 2.0 * l_in * r_in;  // ordered pairs: both (i,j) and (j,i)
    }
    d.between += gap * between;
    d.within += gap * within;
  }
  return d;
}

double l1_objective(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part) {
  const double norm = v.norm();
  if (std::abs(norm - 1.0) > 1e-8) {
    throw Error(ErrorCode::NotUnitNorm, "||v|| = " + format_double(norm));
  }
  const auto d = l1_dispersion(v, x, part);
  if (!(d.within > 0.0)) {
    throw Error(ErrorCode::ZeroWithinDispersion, "every within-class pair coincides under v");
  }
  return d.between / d.within;
}

double l1_objective(const Eigen::VectorXd& v, const LabeledDataset& ds, const ClassPartition& part) {
  return l1_objective(v, ds.features(), part);
}

// ---------------------------------------------------------------------------

SignState::SignState(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part)
    : n_(x.cols()), labels_(part.labels().begin(), part.labels().end()) {
  check_shapes(v, x, part);
  const Eigen::VectorXd z = x.transpose() * v;
  signs_.resize(static_cast<std::size_t>(n_ * n_));
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < n_; ++j) {
      signs_[static_cast<std::size_t>(i * n_ + j)] = (z[i] - z[j] > 0.0) ? 1 : -1;
    }
  }
}

int SignState::q(Index i, Index j) const {
  if (labels_[static_cast<std::size_t>(i)] == labels_[static_cast<std::size_t>(j)]) {
    throw Error(ErrorCode::InvalidArgument, "q is defined on between-class pairs only");
  }
  return at(i, j);
}

int SignState::r(Index i, Index j) const {
  if (labels_[static_cast<std::size_t>(i)] != labels_[static_cast<std::size_t>(j)]) {
    throw Error(ErrorCode::InvalidArgument, "r is defined on within-class pairs only");
  }
  return at(i, j);
}

SignState sign_state(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part) {
  return SignState(v, x, part);
}

Accumulators accumulators(const Eigen::MatrixXd& x, const ClassPartition& part, const SignState& signs) {
  if (signs.size() != x.cols() || x.cols() != part.size()) {
    throw Error(ErrorCode::SizeMismatch, "sign state, data and partition disagree on sample count");
  }
  const auto w = pair_weights(part);
  const Index n = x.cols();
  Eigen::VectorXd cb = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd cw = Eigen::VectorXd::Zero(n);
  for (int k = 1; k <= part.num_classes(); ++k) {
    const auto ki = static_cast<std::size_t>(k - 1);
    const auto members = part.members(k);
    for (Index i : members) {
      for (Index j = 0; j < n; ++j) {
        if (part.labels()[static_cast<std::size_t>(j)] == k) {
          const double s = w.within[ki] * signs.r(i, j);
          cw[i] += s;
          cw[j] -= s;
        } else {
          const double s = w.between[ki] * signs.q(i, j);
          cb[i] += s;
          cb[j] -= s;
        }
      }
    }
  }
  return {x * cb, x * cw};
}

Accumulators accumulators(const Eigen::VectorXd& v, const Eigen::MatrixXd& x, const ClassPartition& part) {
  check_shapes(v, x, part);
  const Eigen::VectorXd z = x.transpose() * v;
  const auto order = sorted_order(z);
  const auto w = pair_weights(part);
  const auto classes = w.counts.size();
  const auto labels = part.labels();
  const Index n = z.size();
  auto label_of = [&](Index i) { return static_cast<std::size_t>(labels[static_cast<std::size_t>(i)] - 1); };

  double weighted_total = 0.0;
  for (std::size_t k = 0; k < classes; ++k) weighted_total += w.between[k] * static_cast<double>(w.counts[k]);

  // Coefficient of x_m, with a = label(m) and j ranging over the other
  // classes: +(w_a + w_j) if z_j < z_m, -(w_a + w_j) if z_j > z_m and
  // (w_j - w_a) on ties. Within its own class: 2 w'_a (#below - #above).
  Eigen::VectorXd cb = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd cw = Eigen::VectorXd::Zero(n);
  std::vector<Index> below(classes, 0), tie(classes, 0);
  Index below_total = 0;
  double below_weighted = 0.0;
  std::size_t g0 = 0;
  while (g0 < order.size()) {
    std::size_t g1 = g0 + 1;
    while (g1 < order.size() && z[order[g1]] == z[order[g0]]) ++g1;
    Index tie_total = 0;
    double tie_weighted = 0.0;
    for (std::size_t t = g0; t < g1; ++t) {
      const auto a = label_of(order[t]);
      ++tie[a];
      ++tie_total;
      tie_weighted += w.between[a];
    }
    const Index above_total = n - below_total - tie_total;
    const double above_weighted = weighted_total - below_weighted - tie_weighted;
    for (std::size_t t = g0; t < g1; ++t) {
      const Index m = order[t];
      const auto a = label_of(m);
      const double wa = w.between[a];
      const Index above_a = w.counts[a] - below[a] - tie[a];
      const auto nb = static_cast<double>(below_total - below[a]);
      const auto na = static_cast<double>(above_total - above_a);
      const double wnb = below_weighted - wa * static_cast<double>(below[a]);
      const double wna = above_weighted - wa * static_cast<double>(above_a);
      const auto nt = static_cast<double>(tie_total - tie[a]);
      const double wnt = tie_weighted - wa * static_cast<double>(tie[a]);
      cb[m] = wa * (nb - na) + (wnb - wna) + (wnt - wa * nt);
      cw[m] = 2.0 * w.within[a] * static_cast<double>(below[a] - above_a);
    }
    for (std::size_t t = g0; t < g1; ++t) {
      const auto a = label_of(order[t]);
      --tie[a];
      ++below[a];
      ++below_total;
      below_weighted += w.between[a];
    }
    g0 = g1;
  }
  return {x * cb, x * cw};
}

Eigen::VectorXd ascent_direction(const Eigen::VectorXd& v, const Eigen::VectorXd& p, const Eigen::VectorXd& b) {
  if (v.size() != p.size() || v.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "v, p and b must have equal length");
  }
  const double vp = v.dot(p);
  const double vb = v.dot(b);
  // Relative floor: |v^T p| <= ||v|| ||p||, so anything below a few ulps of
  // that bound is rounding noise around zero.
  const double vn = v.norm();
  if (!(std::abs(vp) > 1e-14 * vn * p.norm())) {
    throw Error(ErrorCode::ZeroDenominator, "v^T p = " + format_double(vp));
  }
  if (!(std::abs(vb) > 1e-14 * vn * b.norm())) {
    throw Error(ErrorCode::ZeroDenominator, "v^T b = " + format_double(vb));
  }
  return p / vp - b / vb;
}

// ---------------------------------------------------------------------------

DirectionDiagnostics DirectionResult::diagnostics() const {
  DirectionDiagnostics dg;
  const auto& win = restarts[static_cast<std::size_t>(best_restart)];
  dg.objective = objective;
  dg.iterations = win.iterations;
  dg.converged = win.converged;
  dg.restart = best_restart;
  dg.safeguard_retries = win.safeguard_retries;
  dg.perturbations = win.perturbations;
  for (const auto& r : restarts) dg.restart_converged.push_back(r.converged ? 1 : 0);
  return dg;
}

namespace {

RestartOutcome run_restart(const Eigen::MatrixXd& x, const ClassPartition& part, const SolverConfig& cfg,
                           std::uint64_t seed) {
  Rng rng(seed);
  RestartOutcome out;
  Eigen::VectorXd v = random_direction(rng, x.rows(), 1.0);
  out.initial = v;
  out.initial_objective = ratio_or_nan(l1_dispersion(v, x, part));
  if (std::isinf(out.initial_objective)) out.initial_objective = kNaN;

  int t = 0;
  while (t < cfg.itmax) {
    const auto acc = accumulators(v, x, part);
    Eigen::VectorXd g;
    try {
      g = ascent_direction(v, acc.between, acc.within);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroDenominator) throw;
      v = (v + random_direction(rng, v.size(), cfg.perturb_scale)).normalized();
      ++out.perturbations;
      ++t;
      continue;
    }
    const double current = v.dot(acc.between) / v.dot(acc.within);
    Eigen::VectorXd next = (v + cfg.gamma * g).normalized();
    const double next_objective = ratio_or_nan(l1_dispersion(next, x, part));
    if (!(next_objective >= current)) {
      next = (v + 0.5 * cfg.gamma * g).normalized();
      ++out.safeguard_retries;
    }
    const double step = (next - v).norm();
    v = std::move(next);
    ++t;
    if (step <= cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.iterations = t;
  out.final = v;
  const auto d = l1_dispersion(v, x, part);
  if (d.within > 0.0) {
    out.final_objective = d.between / d.within;
  } else {
    out.final_objective = kNaN;
    out.degenerate = true;
  }
  return out;
}

}  // namespace

DirectionResult solve_direction(const Eigen::MatrixXd& x, const ClassPartition& part, const SolverConfig& cfg) {
  cfg.validate();
  if (x.cols() != part.size()) {
    throw Error(ErrorCode::SizeMismatch, "partition does not match the data");
  }
  if (x.rows() < 1) throw Error(ErrorCode::InvalidArgument, "data has no features");
  DirectionResult result;
  int best = -1;
  for (int r = 0; r < cfg.restarts; ++r) {
    result.restarts.push_back(run_restart(x, part, cfg, cfg.seed ^ static_cast<std::uint64_t>(r)));
    const auto& out = result.restarts.back();
    if (out.degenerate) continue;
    if (best < 0 || out.final_objective > result.restarts[static_cast<std::size_t>(best)].final_objective) best = r;
  }
  if (best < 0) {
    throw Error(ErrorCode::ZeroWithinDispersion,
                "all " + std::to_string(cfg.restarts) + " restarts ended with zero within-class dispersion");
  }
  const auto& win = result.restarts[static_cast<std::size_t>(best)];
  result.best_restart = best;
  result.direction = win.final;
  result.objective = win.final_objective;
  return result;
}

DirectionResult solve_direction(const LabeledDataset& ds, const ClassPartition& part, const SolverConfig& cfg) {
  return solve_direction(ds.features(), part, cfg);
}

Projection fit_l1sc(const LabeledDataset& ds, const SolverConfig& cfg, Index d) {
  cfg.validate();
  const Index dim = ds.dim();
  if (d < 1 || d >= dim) {
    throw Error(ErrorCode::InvalidArgument, "target dimension " + std::to_string(d) + " outside [1, " +
                                                std::to_string(dim - 1) + "]");
  }
  const ClassPartition part(ds);
  Eigen::MatrixXd x = ds.features();
  const double scale = x.cwiseAbs().maxCoeff();

  Projection proj;
  proj.method = "l1sc";
  proj.basis.resize(dim, d);
  proj.metadata["gamma"] = format_double(cfg.gamma);
  proj.metadata["epsilon"] = format_double(cfg.epsilon);
  proj.metadata["itmax"] = std::to_string(cfg.itmax);
  proj.metadata["perturb_scale"] = format_double(cfg.perturb_scale);
  proj.metadata["restarts"] = std::to_string(cfg.restarts);
  proj.metadata["seed"] = std::to_string(cfg.seed);

  for (Index j = 0; j < d; ++j) {
    const auto exhausted = [&](const std::string& why) {
      return Error(ErrorCode::DimensionExhausted, "direction " + std::to_string(j + 1) + ": " + why);
    };
    const double spread = (x.colwise() - x.col(0)).cwiseAbs().maxCoeff();
    if (!(spread > 1e-12 * scale)) throw exhausted("residual samples are all identical");

    SolverConfig step_cfg = cfg;
    if (j > 0) step_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(j));
    DirectionResult found;
    try {
      found = solve_direction(x, part, step_cfg);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ZeroWithinDispersion) throw exhausted(e.what());
      throw;
    }

    Eigen::VectorXd v = found.direction;
    if (j > 0) {
      // The residual data has no component in span(basis), so this changes
      // neither z = X^T v nor J; it only fixes the free in-span part.
      for (int pass = 0; pass < 2; ++pass) {
        for (Index i = 0; i < j; ++i) v -= proj.basis.col(i).dot(v) * proj.basis.col(i);
      }
      const double norm = v.norm();
      if (!(norm > 1e-8)) throw exhausted("solution lies in the span of earlier directions");
      v /= norm;
    }
    proj.basis.col(j) = v;

    x -= v * (v.transpose() * x);
    double residual = 0.0;
    for (Index i = 0; i <= j; ++i) {
      residual = std::max(residual, (proj.basis.col(i).transpose() * x).cwiseAbs().maxCoeff());
    }
    if (residual > 1e-10 * scale) {
      // One more pass over all accepted directions removes rounding drift.
      for (Index i = 0; i <= j; ++i) x -= proj.basis.col(i) * (proj.basis.col(i).transpose() * x);
      residual = 0.0;
      for (Index i = 0; i <= j; ++i) {
        residual = std::max(residual, (proj.basis.col(i).transpose() * x).cwiseAbs().maxCoeff());
      }
      if (residual > 1e-10 * scale) throw exhausted("deflation left a residual of " + format_double(residual));
    }
    proj.diagnostics.push_back(found.diagnostics());
    proj.metadata["direction." + std::to_string(j + 1) + ".seed"] = std::to_string(step_cfg.seed);
    proj.metadata["direction." + std::to_string(j + 1) + ".deflation_residual"] =
        format_double(scale > 0.0 ? residual / scale : 0.0);
  }
  return proj;
}

}  // namespace l1sc
