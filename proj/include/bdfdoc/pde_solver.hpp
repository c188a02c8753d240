#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bdfdoc/kernel_core.hpp"
#include "bdfdoc/tridiagonal.hpp"

namespace bdfdoc {

using SpaceTimeFn = std::function<double(double x, double t)>;
using SpaceFn = std::function<double(double x)>;

/// u_t = eps u_xx + beta(x,t) u + f(x,t) on (0, L), u = 0 at both ends.
/// With eps = 0 and a scalar grid this is the ODE u' = beta(t) u + f(t).
struct ProblemSpec {
  std::string name;
  double epsilon = 1.0;
  SpaceTimeFn beta;
  /// Claimed bound |beta| <= beta_star; checked on the grid at every step.
  double beta_star = 0.0;
  /// beta depends on x only; required by the dissipative stability bound.
  bool beta_time_independent = false;
  SpaceTimeFn forcing;
  SpaceFn initial;
  std::optional<SpaceTimeFn> exact;
  /// Time derivative of the exact solution, used for grid-consistent forcing.
  std::optional<SpaceTimeFn> exact_dt;
  double length = 1.0;
};

/// Uniform grid of interior nodes x_i = i h, h = L / (M + 1), or a single
/// unweighted point for the scalar ODE mode.
class Grid1D {
 public:
  static Grid1D uniform(int num_interior, double length = 1.0);
  static Grid1D scalar_point();

  int num_interior() const { return static_cast<int>(nodes_.size()); }
  double length() const { return length_; }
  double spacing() const { return spacing_; }
  std::span<const double> nodes() const { return nodes_; }
  bool is_scalar() const { return scalar_; }

  /// sqrt(h sum v_i^2); plain |v| in scalar mode.
  double norm(std::span<const double> v) const;
  std::vector<double> sample(const SpaceFn& fn) const;
  std::vector<double> sample(const SpaceTimeFn& fn, double t) const;

 private:
  Grid1D() = default;
  double length_ = 1.0;
  double spacing_ = 1.0;
  std::vector<double> nodes_;
  bool scalar_ = false;
};

/// Central-difference eps d^2/dx^2 with Dirichlet rows eliminated:
/// eps/h^2 [1, -2, 1]. Zero 1x1 operator on a scalar grid.
/// Throws PreconditionError on a non-scalar grid with M < 2.
Tridiagonal assemble_operator(const Grid1D& grid, double epsilon);

struct ExactStartup {};
struct CascadedStartup {
  int substeps = 0;
};
struct PrescribedStartup {
  /// u^1 .. u^{k-1}; u^0 is always sampled from the initial condition.
  std::vector<std::vector<double>> levels;
};
/// ExactSolution when the problem has one, else CascadedBdf with 4^k substeps.
struct AutoStartup {};
using StartupMode = std::variant<AutoStartup, ExactStartup, CascadedStartup, PrescribedStartup>;

enum class ForcingMode {
  /// f(x_i, t) sampled from the problem.
  Continuous,
  /// f_i = u_t(x_i,t) - (A u(.,t))_i - beta u(x_i,t): makes the sampled exact
  /// solution solve the spatially discrete problem, so the measured error is
  /// purely temporal. Needs exact and exact_dt.
  GridConsistent,
};

struct SolverConfig {
  int k = 3;
  double tau = 0.01;
  int num_steps = 100;
  StartupMode startup = AutoStartup{};
  ForcingMode forcing = ForcingMode::Continuous;

  double final_time() const { return tau * num_steps; }
};

std::string describe(const StartupMode& mode);

/// Largest step the general stability bound admits: (7-k)/(7 rho_k beta_star).
/// Infinity when beta_star == 0; k in 3..5.
double stability_step_limit(int k, double beta_star);

struct RunRecord {
  std::string problem;
  int k = 0;
  double tau = 0.0;
  int num_steps = 0;
  int num_interior = 0;
  double epsilon = 0.0;
  double beta_star = 0.0;
  std::string startup;
  std::string forcing;

  /// Indexed by step n = 0..N.
  std::vector<double> times;
  std::vector<double> norms;
  std::vector<double> errors;  // empty without an exact solution
  std::vector<double> forcing_norms;
  /// ||u^l - u^{l-1}|| for l = 1..k-1.
  std::vector<double> start_difference_norms;

  std::optional<double> final_error;
  /// beta depends on x only and beta <= 0 on every sampled step.
  bool dissipative_hypotheses = false;
  /// tau <= (7-k)/(7 rho_k beta_star) (k in 3..5 only).
  bool general_hypotheses = false;
  std::vector<std::string> warnings;
};

/// Samples beta and the forcing at time t in the requested mode.
std::vector<double> sample_forcing(const ProblemSpec& problem, const Grid1D& grid, const Tridiagonal& op,
                                   double t, ForcingMode mode);

/// Solves (b_0/tau - A - diag(beta)) u^n = f + (b_0/tau) u^{n-1} - (1/tau) sum_{j=1}^{k-1} b_j (u^{n-j} - u^{n-j-1}).
/// history = {u^{n-k}, ..., u^{n-1}}, oldest first. Throws NumericalError
/// if the system is singular and DimensionError on inconsistent sizes.
std::vector<double> bdf_step(std::span<const std::vector<double>> history, const BdfKernels& kernels,
                             const Tridiagonal& op, std::span<const double> beta,
                             std::span<const double> forcing, double tau);

/// Levels u^0 .. u^{k-1}. Throws ConfigError when ExactStartup is requested
/// without an exact solution or prescribed levels have the wrong shape.
std::vector<std::vector<double>> startup(const ProblemSpec& problem, const Grid1D& grid,
                                         const SolverConfig& config);

using StepObserver = std::function<void(int n, double t, std::span<const double> u)>;

/// Runs steps k..N. Step failures are rethrown as StepError with the index.
RunRecord run(const ProblemSpec& problem, const Grid1D& grid, const SolverConfig& config,
              const StepObserver& observer = {});

/// run() on the one-point grid; the problem's epsilon is ignored.
RunRecord scalar_ode_mode(const ProblemSpec& problem, const SolverConfig& config,
                          const StepObserver& observer = {});

struct StabilityConstants {
  double rho = 0.0;
  double c_I = 0.0;
};

/// rho_k and the certified starting constant c_{I,k}, k in 3..5.
StabilityConstants certified_stability_constants(int k);

enum class StabilityTheorem { Dissipative, General };

/// Right-hand side of the selected stability estimate for n = k..N
/// (NaN for n < k). k in 3..5.
std::vector<double> theoretical_stability_bound(const RunRecord& record, const StabilityConstants& constants,
                                                StabilityTheorem theorem);

}  // namespace bdfdoc
