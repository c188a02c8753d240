#pragma once

#include <string>
#include <vector>

#include "bdfdoc/pde_solver.hpp"

namespace bdfdoc::presets {

/// u = e^{-t} sin(pi x) on [0, 1]; f makes it an exact solution of the
/// continuous problem for the given eps and constant beta.
ProblemSpec manufactured_sine(double epsilon = 1.0, double beta = -1.0);

/// Constant beta <= 0, f = 0, u0 = sin(pi x).
ProblemSpec dissipative_decay(double epsilon = 1.0, double beta = -1.0);

/// beta = beta_star sin t, f = 0, u0 = sin(pi x).
ProblemSpec oscillating_beta(double epsilon = 1.0, double beta_star = 1.0);

/// u' = lambda u, u(0) = 1.
ProblemSpec scalar_decay(double lambda = -1.0);

/// u' = beta_star sin(t) u, u(0) = 1.
ProblemSpec scalar_oscillating(double beta_star = 1.0);

/// Everything zero: the trivial fixed point.
ProblemSpec zero_problem();

struct PresetParams {
  double epsilon = 1.0;
  double beta = -1.0;
  double beta_star = 1.0;
};

/// Looks a preset up by name; throws ConfigError for unknown names.
ProblemSpec by_name(const std::string& name, const PresetParams& params = {});
std::vector<std::string> names();

}  // namespace bdfdoc::presets
