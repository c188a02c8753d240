#include "bdfdoc/problems.hpp"

#include <cmath>
#include <numbers>

#include "bdfdoc/errors.hpp"

namespace bdfdoc::presets {

using std::numbers::pi;

ProblemSpec manufactured_sine(double epsilon, double beta) {
  ProblemSpec p;
  p.name = "manufactured_sine";
  p.epsilon = epsilon;
  p.beta = [beta](double, double) { return beta; };
  p.beta_star = std::abs(beta);
  p.beta_time_independent = true;
  // u_t - eps u_xx - beta u = (-1 + eps pi^2 - beta) u
  const double factor = -1.0 + epsilon * pi * pi - beta;
  p.forcing = [factor](double x, double t) { return factor * std::exp(-t) * std::sin(pi * x); };
  p.initial = [](double x) { return std::sin(pi * x); };
  p.exact = [](double x, double t) { return std::exp(-t) * std::sin(pi * x); };
  p.exact_dt = [](double x, double t) { return -std::exp(-t) * std::sin(pi * x); };
  return p;
}

ProblemSpec dissipative_decay(double epsilon, double beta) {
  if (beta > 0.0) throw ConfigError("dissipative_decay needs beta <= 0");
  ProblemSpec p;
  p.name = "dissipative_decay";
  p.epsilon = epsilon;
  p.beta = [beta](double, double) { return beta; };
  p.beta_star = std::abs(beta);
  p.beta_time_independent = true;
  p.forcing = [](double, double) { return 0.0; };
  p.initial = [](double x) { return std::sin(pi * x); };
  const double rate = beta - epsilon * pi * pi;
  p.exact = [rate](double x, double t) { return std::exp(rate * t) * std::sin(pi * x); };
  p.exact_dt = [rate](double x, double t) { return rate * std::exp(rate * t) * std::sin(pi * x); };
  return p;
}

ProblemSpec oscillating_beta(double epsilon, double beta_star) {
  ProblemSpec p;
  p.name = "oscillating_beta";
  p.epsilon = epsilon;
  p.beta = [beta_star](double, double t) { return beta_star * std::sin(t); };
  p.beta_star = beta_star;
  p.forcing = [](double, double) { return 0.0; };
  p.initial = [](double x) { return std::sin(pi * x); };
  // log u = beta_star (1 - cos t) - eps pi^2 t along the sin(pi x) mode
  p.exact = [epsilon, beta_star](double x, double t) {
    return std::exp(beta_star * (1.0 - std::cos(t)) - epsilon * pi * pi * t) * std::sin(pi * x);
  };
  p.exact_dt = [epsilon, beta_star](double x, double t) {
    const double rate = beta_star * std::sin(t) - epsilon * pi * pi;
    return rate * std::exp(beta_star * (1.0 - std::cos(t)) - epsilon * pi * pi * t) * std::sin(pi * x);
  };
  return p;
}

ProblemSpec scalar_decay(double lambda) {
  ProblemSpec p;
  p.name = "scalar_decay";
  p.epsilon = 0.0;
  p.beta = [lambda](double, double) { return lambda; };
  p.beta_star = std::abs(lambda);
  p.beta_time_independent = true;
  p.forcing = [](double, double) { return 0.0; };
  p.initial = [](double) { return 1.0; };
  p.exact = [lambda](double, double t) { return std::exp(lambda * t); };
  p.exact_dt = [lambda](double, double t) { return lambda * std::exp(lambda * t); };
  return p;
}

ProblemSpec scalar_oscillating(double beta_star) {
  ProblemSpec p;
  p.name = "scalar_oscillating";
  p.epsilon = 0.0;
  p.beta = [beta_star](double, double t) { return beta_star * std::sin(t); };
  p.beta_star = beta_star;
  p.forcing = [](double, double) { return 0.0; };
  p.initial = [](double) { return 1.0; };
  p.exact = [beta_star](double, double t) { return std::exp(beta_star * (1.0 - std::cos(t))); };
  p.exact_dt = [beta_star](double, double t) {
    return beta_star * std::sin(t) * std::exp(beta_star * (1.0 - std::cos(t)));
  };
  return p;
}

ProblemSpec zero_problem() {
  ProblemSpec p;
  p.name = "zero";
  p.epsilon = 1.0;
  p.beta = [](double, double) { return 0.0; };
  p.beta_star = 0.0;
  p.beta_time_independent = true;
  p.forcing = [](double, double) { return 0.0; };
  p.initial = [](double) { return 0.0; };
  p.exact = [](double, double) { return 0.0; };
  p.exact_dt = [](double, double) { return 0.0; };
  return p;
}

ProblemSpec by_name(const std::string& name, const PresetParams& params) {
  if (name == "manufactured_sine") return manufactured_sine(params.epsilon, params.beta);
  if (name == "dissipative_decay") return dissipative_decay(params.epsilon, params.beta);
  if (name == "oscillating_beta") return oscillating_beta(params.epsilon, params.beta_star);
  if (name == "scalar_decay") return scalar_decay(params.beta);
  if (name == "scalar_oscillating") return scalar_oscillating(params.beta_star);
  if (name == "zero") return zero_problem();
  throw ConfigError("unknown problem preset '" + name + "'");
}

std::vector<std::string> names() {
  return {"manufactured_sine", "dissipative_decay", "oscillating_beta", "scalar_decay", "scalar_oscillating", "zero"};
}

}  // namespace bdfdoc::presets
