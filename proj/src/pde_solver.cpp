#include "bdfdoc/pde_solver.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "bdfdoc/doc_kernels.hpp"
#include "bdfdoc/errors.hpp"
#include "bdfdoc/starting_effects.hpp"

namespace bdfdoc {

Grid1D Grid1D::uniform(int num_interior, double length) {
  if (num_interior < 1) throw PreconditionError("grid needs at least one interior node");
  if (!(length > 0.0)) throw DomainError("domain length must be positive");
  Grid1D g;
  g.length_ = length;
  g.spacing_ = length / (num_interior + 1);
  g.nodes_.resize(static_cast<std::size_t>(num_interior));
  for (int i = 0; i < num_interior; ++i) g.nodes_[static_cast<std::size_t>(i)] = (i + 1) * g.spacing_;
  return g;
}

Grid1D Grid1D::scalar_point() {
  Grid1D g;
  g.scalar_ = true;
  g.length_ = 0.0;
  g.spacing_ = 1.0;
  g.nodes_ = {0.0};
  return g;
}

double Grid1D::norm(std::span<const double> v) const {
  if (v.size() != nodes_.size()) throw DimensionError("norm: vector length differs from grid");
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(spacing_ * sum);
}

std::vector<double> Grid1D::sample(const SpaceFn& fn) const {
  std::vector<double> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[i] = fn(nodes_[i]);
  return out;
}

std::vector<double> Grid1D::sample(const SpaceTimeFn& fn, double t) const {
  std::vector<double> out(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[i] = fn(nodes_[i], t);
  return out;
}

Tridiagonal assemble_operator(const Grid1D& grid, double epsilon) {
  if (grid.is_scalar()) return Tridiagonal(1);
  const int m = grid.num_interior();
  if (m < 2) throw PreconditionError("assemble_operator: need M >= 2");
  Tridiagonal a(static_cast<std::size_t>(m));
  const double w = epsilon / (grid.spacing() * grid.spacing());
  for (std::size_t i = 0; i < a.size(); ++i) a.diag[i] = -2.0 * w;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) a.lower[i] = a.upper[i] = w;
  return a;
}

std::string describe(const StartupMode& mode) {
  struct Visitor {
    std::string operator()(const AutoStartup&) const { return "auto"; }
    std::string operator()(const ExactStartup&) const { return "exact"; }
    std::string operator()(const CascadedStartup& c) const { return "cascaded:" + std::to_string(c.substeps); }
    std::string operator()(const PrescribedStartup&) const { return "prescribed"; }
  };
  return std::visit(Visitor{}, mode);
}

double stability_step_limit(int k, double beta_star) {
  if (beta_star <= 0.0) return std::numeric_limits<double>::infinity();
  return (7.0 - k) / (7.0 * decay_rho(k).to_double() * beta_star);
}

std::vector<double> sample_forcing(const ProblemSpec& problem, const Grid1D& grid, const Tridiagonal& op,
                                   double t, ForcingMode mode) {
  if (mode == ForcingMode::Continuous) return grid.sample(problem.forcing, t);
  if (!problem.exact || !problem.exact_dt) {
    throw ConfigError("grid-consistent forcing needs the exact solution and its time derivative");
  }
  const auto u = grid.sample(*problem.exact, t);
  const auto ut = grid.sample(*problem.exact_dt, t);
  const auto au = op.apply(u);
  const auto beta = grid.sample(problem.beta, t);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = ut[i] - au[i] - beta[i] * u[i];
  return f;
}

std::vector<double> bdf_step(std::span<const std::vector<double>> history, const BdfKernels& kernels,
                             const Tridiagonal& op, std::span<const double> beta,
                             std::span<const double> forcing, double tau) {
  const int k = kernels.order();
  if (!(tau > 0.0)) throw DomainError("time step must be positive");
  if (history.size() != static_cast<std::size_t>(k)) {
    throw DimensionError("bdf_step needs " + std::to_string(k) + " history levels");
  }
  const std::size_t m = op.size();
  if (beta.size() != m || forcing.size() != m) throw DimensionError("bdf_step: coefficient length mismatch");
  for (const auto& level : history) {
    if (level.size() != m) throw DimensionError("bdf_step: history length mismatch");
  }

  // Solve for the increment u^n - u^{n-1}: the solve's relative rounding
  // then applies to a quantity of size O(tau) instead of to u^n itself.
  // history.back() is u^{n-1}; u^{n-j} sits at index k - j.
  const double b0 = kernels[0];
  const auto& prev = history.back();
  std::vector<double> rhs = op.apply(prev);
  for (std::size_t i = 0; i < m; ++i) rhs[i] += forcing[i] + beta[i] * prev[i];
  for (int j = 1; j < k; ++j) {
    const auto& newer = history[static_cast<std::size_t>(k - j)];
    const auto& older = history[static_cast<std::size_t>(k - j - 1)];
    const double w = kernels[j] / tau;
    for (std::size_t i = 0; i < m; ++i) rhs[i] -= w * (newer[i] - older[i]);
  }

  Tridiagonal system(m);
  for (std::size_t i = 0; i < m; ++i) system.diag[i] = b0 / tau - op.diag[i] - beta[i];
  for (std::size_t i = 0; i + 1 < m; ++i) {
    system.lower[i] = -op.lower[i];
    system.upper[i] = -op.upper[i];
  }
  std::vector<double> next = solve_tridiagonal(system, rhs);
  for (std::size_t i = 0; i < m; ++i) next[i] += prev[i];
  return next;
}

namespace {

void check_beta_bound(const ProblemSpec& problem, std::span<const double> beta, double t) {
  const double limit = problem.beta_star * (1.0 + 1e-12) + 1e-14;
  for (double b : beta) {
    if (std::abs(b) > limit) {
      std::ostringstream msg;
      msg << "|beta| = " << std::abs(b) << " exceeds beta_star = " << problem.beta_star << " at t = " << t;
      throw DomainError(msg.str());
    }
  }
}

std::vector<std::vector<double>> cascaded_startup(const ProblemSpec& problem, const Grid1D& grid,
                                                  const SolverConfig& config, int substeps) {
  if (substeps < 1) throw ConfigError("cascaded startup needs substeps >= 1");
  const int k = config.k;
  const double sub_tau = config.tau / substeps;
  const Tridiagonal op = assemble_operator(grid, grid.is_scalar() ? 0.0 : problem.epsilon);
  std::vector<BdfKernels> schemes;
  for (int order = 1; order <= k; ++order) schemes.push_back(generate_bdf_kernels(order));

  std::vector<std::vector<double>> levels{grid.sample(problem.initial)};
  std::vector<std::vector<double>> fine{levels.front()};
  const int total = (k - 1) * substeps;
  for (int i = 1; i <= total; ++i) {
    const int order = std::min(i, k);
    const double t = i * sub_tau;
    const auto beta = grid.sample(problem.beta, t);
    check_beta_bound(problem, beta, t);
    const auto f = sample_forcing(problem, grid, op, t, config.forcing);
    const std::span<const std::vector<double>> hist(fine.data() + fine.size() - order, static_cast<std::size_t>(order));
    auto next = bdf_step(hist, schemes[static_cast<std::size_t>(order - 1)], op, beta, f, sub_tau);
    fine.push_back(std::move(next));
    if (fine.size() > static_cast<std::size_t>(k)) fine.erase(fine.begin());
    if (i % substeps == 0) levels.push_back(fine.back());
  }
  return levels;
}

}  // namespace

std::vector<std::vector<double>> startup(const ProblemSpec& problem, const Grid1D& grid,
                                         const SolverConfig& config) {
  const int k = config.k;
  StartupMode mode = config.startup;
  if (std::holds_alternative<AutoStartup>(mode)) {
    if (problem.exact) {
      mode = ExactStartup{};
    } else {
      int substeps = 1;
      for (int i = 0; i < k; ++i) substeps *= 4;
      mode = CascadedStartup{substeps};
    }
  }

  if (std::holds_alternative<ExactStartup>(mode)) {
    if (!problem.exact) throw ConfigError("exact startup requested but the problem has no exact solution");
    std::vector<std::vector<double>> levels{grid.sample(problem.initial)};
    for (int l = 1; l < k; ++l) levels.push_back(grid.sample(*problem.exact, l * config.tau));
    return levels;
  }
  if (const auto* c = std::get_if<CascadedStartup>(&mode)) return cascaded_startup(problem, grid, config, c->substeps);

  const auto& given = std::get<PrescribedStartup>(mode).levels;
  if (given.size() != static_cast<std::size_t>(k - 1)) {
    throw ConfigError("prescribed startup needs " + std::to_string(k - 1) + " levels");
  }
  std::vector<std::vector<double>> levels{grid.sample(problem.initial)};
  for (const auto& level : given) {
    if (level.size() != static_cast<std::size_t>(grid.num_interior())) {
      throw ConfigError("prescribed startup level has the wrong length");
    }
    levels.push_back(level);
  }
  return levels;
}

RunRecord run(const ProblemSpec& problem, const Grid1D& grid, const SolverConfig& config,
              const StepObserver& observer) {
  const int k = config.k;
  const BdfKernels scheme = generate_bdf_kernels(k);
  if (!(config.tau > 0.0)) throw ConfigError("tau must be positive");
  if (config.num_steps < k - 1) throw ConfigError("num_steps must be at least k-1");
  if (problem.beta_star < 0.0) throw ConfigError("beta_star must be non-negative");

  const double epsilon = grid.is_scalar() ? 0.0 : problem.epsilon;
  const Tridiagonal op = assemble_operator(grid, epsilon);

  RunRecord rec;
  rec.problem = problem.name;
  rec.k = k;
  rec.tau = config.tau;
  rec.num_steps = config.num_steps;
  rec.num_interior = grid.is_scalar() ? 0 : grid.num_interior();
  rec.epsilon = epsilon;
  rec.beta_star = problem.beta_star;
  rec.startup = describe(config.startup);
  rec.forcing = config.forcing == ForcingMode::Continuous ? "continuous" : "grid_consistent";
  rec.dissipative_hypotheses = problem.beta_time_independent;

  if (k >= 3) {
    const double limit = stability_step_limit(k, problem.beta_star);
    rec.general_hypotheses = config.tau <= limit * (1.0 + 1e-12);
    if (!rec.general_hypotheses) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "tau = " << config.tau << " exceeds the stability step limit " << limit;
      rec.warnings.push_back(msg.str());
    }
  }

  auto record_level = [&](int n, std::span<const double> u, std::span<const double> f) {
    const double t = n * config.tau;
    rec.times.push_back(t);
    rec.norms.push_back(grid.norm(u));
    rec.forcing_norms.push_back(grid.norm(f));
    if (problem.exact) {
      const auto ex = grid.sample(*problem.exact, t);
      std::vector<double> diff(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) diff[i] = ex[i] - u[i];
      rec.errors.push_back(grid.norm(diff));
    }
    if (observer) observer(n, t, u);
  };

  auto levels = startup(problem, grid, config);
  for (int n = 0; n < k && n <= config.num_steps; ++n) {
    const double t = n * config.tau;
    const auto beta = grid.sample(problem.beta, t);
    check_beta_bound(problem, beta, t);
    for (double b : beta) {
      if (b > 0.0) rec.dissipative_hypotheses = false;
    }
    record_level(n, levels[static_cast<std::size_t>(n)], sample_forcing(problem, grid, op, t, config.forcing));
  }
  for (int l = 1; l < k; ++l) {
    const auto& a = levels[static_cast<std::size_t>(l)];
    const auto& b = levels[static_cast<std::size_t>(l - 1)];
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    rec.start_difference_norms.push_back(grid.norm(diff));
  }

  for (int n = k; n <= config.num_steps; ++n) {
    const double t = n * config.tau;
    const auto beta = grid.sample(problem.beta, t);
    check_beta_bound(problem, beta, t);
    for (double b : beta) {
      if (b > 0.0) rec.dissipative_hypotheses = false;
    }
    const auto f = sample_forcing(problem, grid, op, t, config.forcing);
    std::vector<double> next;
    try {
      next = bdf_step(levels, scheme, op, beta, f, config.tau);
    } catch (const NumericalError& e) {
      throw StepError(n, e.what());
    }
    record_level(n, next, f);
    levels.erase(levels.begin());
    levels.push_back(std::move(next));
  }

  if (!rec.errors.empty()) rec.final_error = rec.errors.back();
  return rec;
}

RunRecord scalar_ode_mode(const ProblemSpec& problem, const SolverConfig& config, const StepObserver& observer) {
  return run(problem, Grid1D::scalar_point(), config, observer);
}

StabilityConstants certified_stability_constants(int k) {
  if (k < 3 || k > 5) throw UnsupportedOrderError(k);
  static const std::array<StabilityConstants, 3> table = [] {
    std::array<StabilityConstants, 3> t{};
    for (int order = 3; order <= 5; ++order) {
      const auto cert = certify_starting_bound(order, 200);
      t[static_cast<std::size_t>(order - 3)] = {decay_rho(order).to_double(), cert.c_I.to_double()};
    }
    return t;
  }();
  return table[static_cast<std::size_t>(k - 3)];
}

std::vector<double> theoretical_stability_bound(const RunRecord& record, const StabilityConstants& constants,
                                                StabilityTheorem theorem) {
  const int k = record.k;
  if (k < 3 || k > 5) throw UnsupportedOrderError(k);
  const std::size_t count = record.norms.size();
  std::vector<double> bound(count, std::numeric_limits<double>::quiet_NaN());
  if (count < static_cast<std::size_t>(k)) return bound;

  const double rho = constants.rho;
  const double c_i = constants.c_I;
  const double gain = 7.0 * rho / (7.0 - k);

  double start_norms = 0.0;
  for (int l = 0; l < k; ++l) start_norms += record.norms[static_cast<std::size_t>(l)];
  double start_diffs = 0.0;
  for (double d : record.start_difference_norms) start_diffs += d;

  double forcing_sum = 0.0;
  for (std::size_t n = static_cast<std::size_t>(k); n < count; ++n) {
    forcing_sum += record.tau * record.forcing_norms[n];
    if (theorem == StabilityTheorem::Dissipative) {
      bound[n] = record.norms[static_cast<std::size_t>(k - 1)] + gain * c_i / 4.0 * start_diffs +
                 gain / 2.0 * forcing_sum;
    } else {
      const double t_shift = record.times[n - static_cast<std::size_t>(k)];
      bound[n] = gain * std::exp(gain * record.beta_star * t_shift) * (c_i * start_norms + forcing_sum);
    }
  }
  return bound;
}

}  // namespace bdfdoc
