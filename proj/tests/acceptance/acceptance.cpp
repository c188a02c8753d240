// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bdfdoc/doc_kernels.hpp"
#include "bdfdoc/kernel_core.hpp"
#include "bdfdoc/pde_solver.hpp"
#include "bdfdoc/problems.hpp"
#include "bdfdoc/spectral_analysis.hpp"
#include "bdfdoc/starting_effects.hpp"

using namespace bdfdoc;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [" << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream budget;
  budget << "runtime " << secs << " s exceeds " << budget_s << " s";
  o.expect(secs < budget_s, budget.str());
  if (!o.ok) ++failures;
  std::printf("%s %2d %s (%.3f s)%s\n", o.ok ? "PASS" : "FAIL", id, title.c_str(), secs, o.notes.str().c_str());
  std::fflush(stdout);
}

Rational q(long p, long d = 1) { return Rational(p, d); }

std::vector<double> slopes(const std::vector<double>& e) {
  std::vector<double> s;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) s.push_back(std::log2(e[i] / e[i + 1]));
  return s;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double run_error(const ProblemSpec& p, const Grid1D& grid, int k, double tau, double T) {
  SolverConfig cfg;
  cfg.k = k;
  cfg.tau = tau;
  cfg.num_steps = static_cast<int>(std::lround(T / tau));
  cfg.forcing = p.exact_dt ? ForcingMode::GridConsistent : ForcingMode::Continuous;
  return *run(p, grid, cfg).final_error;
}

}  // namespace

int main() {
  criterion(1, "BDF kernel rows k = 2..5 (14 entries)", 1e-3, [](Outcome& o) {
    const std::vector<std::vector<Rational>> rows{
        {q(3, 2), q(-1, 2)},
        {q(11, 6), q(-7, 6), q(1, 3)},
        {q(25, 12), q(-23, 12), q(13, 12), q(-1, 4)},
        {q(137, 60), q(-163, 60), q(137, 60), q(-21, 20), q(1, 5)},
    };
    int matched = 0;
    for (int k = 2; k <= 5; ++k) {
      const BdfKernels b = generate_bdf_kernels(k);
      for (int j = 0; j < k; ++j) {
        const bool eq = b.exact(j) == rows[static_cast<std::size_t>(k - 2)][static_cast<std::size_t>(j)];
        matched += eq ? 1 : 0;
        o.expect(eq, "k=" + std::to_string(k) + " b_" + std::to_string(j));
      }
    }
    o.expect(matched == 14, "entry count");
  });

  criterion(2, "leading DOC kernel values", 1e-2, [](Outcome& o) {
    const auto t3 = compute_doc_kernels(generate_bdf_kernels(3), 2);
    const auto t4 = compute_doc_kernels(generate_bdf_kernels(4), 3);
    const auto t5 = compute_doc_kernels(generate_bdf_kernels(5), 1);
    o.expect(t3.exact(0) == q(6, 11), "theta_0^(3)");
    o.expect(t3.exact(1) == q(42, 121), "theta_1^(3)");
    o.expect(t4.exact(0) == q(12, 25), "theta_0^(4)");
    o.expect(t4.exact(1) == q(276, 625), "theta_1^(4)");
    o.expect(t4.exact(2) == q(2448, 15625), "theta_2^(4)");
    o.expect(t5.exact(0) == q(60, 137), "theta_0^(5)");
  });

  criterion(3, "orthogonality identities, k = 2..5, n <= 200", 5.0, [](Outcome& o) {
    for (int k = 2; k <= 5; ++k) {
      const BdfKernels b = generate_bdf_kernels(k);
      const auto res = verify_orthogonality(b, compute_doc_kernels(b, 200 - k + 1), 200);
      o.expect(res.holds, "k=" + std::to_string(k));
    }
  });

  criterion(4, "minima of the generating functions", 1.0, [](Outcome& o) {
    const auto s3 = minimize_generating_function(make_generating_function(generate_bdf_kernels(3)));
    o.expect(s3.exact_sigma && *s3.exact_sigma == q(95, 48), "sigma_3 = 95/48");
    const auto s4 = minimize_generating_function(make_generating_function(generate_bdf_kernels(4)));
    o.expect(std::abs(s4.sigma - 1.62828) <= 1e-5, "sigma_4 ~ 1.62828");
    o.expect(std::abs(s4.sigma - (2656.0 - 43.0 * std::sqrt(43.0)) / 1458.0) <= 1e-12, "sigma_4 radical");
    const auto s5 = minimize_generating_function(make_generating_function(generate_bdf_kernels(5)));
    std::ostringstream got;
    got.precision(12);
    got << "sigma_5 = " << s5.sigma << ", expected 0.477683 +- 1e-5";
    o.expect(std::abs(s5.sigma - 0.477683) <= 1e-5, got.str());
    o.expect(std::abs(s5.argmin_cos - (-0.064041)) <= 1e-5, "x* ~ -0.064041");
  });

  criterion(5, "eigenvalue sandwich, m = 50..400", 30.0, [](Outcome& o) {
    for (int k = 3; k <= 5; ++k) {
      const auto g = make_generating_function(generate_bdf_kernels(k));
      const double lo = minimize_generating_function(g).sigma;
      const double hi = maximize_generating_function(g).sigma;
      for (int m : {50, 100, 200, 400}) {
        const double lambda = min_eigenvalue(build_toeplitz(k, m));
        o.expect(lambda >= lo - 1e-8 && lambda <= hi, "k=" + std::to_string(k) + " m=" + std::to_string(m));
      }
    }
  });

  criterion(6, "characteristic root magnitudes", 0.1, [](Outcome& o) {
    const auto r3 = characteristic_roots(3);
    for (auto z : r3.roots) o.expect(std::abs(std::abs(z) - std::sqrt(2.0 / 11.0)) <= 1e-10, "|lambda_3|");
    const auto r4 = characteristic_roots(4);
    o.expect(std::abs(std::abs(r4.roots[0]) - 0.560862) <= 1e-5, "|lambda_4,1|");
    o.expect(std::abs(r4.roots[2].imag()) < 1e-12 && std::abs(r4.roots[2].real() - 0.381478) <= 1e-5, "lambda_4,3");
    const auto r5 = characteristic_roots(5);
    o.expect(std::abs(std::abs(r5.roots[0]) - 0.708711) <= 1e-5, "|lambda_5,1|");
    o.expect(std::abs(std::abs(r5.roots[2]) - 0.417601) <= 1e-5, "|lambda_5,3|");
  });

  criterion(7, "DOC decay certificates to j = 200", 5.0, [](Outcome& o) {
    const Rational rho[] = {q(10, 3), q(6), q(96, 5)};
    const Rational sharp[] = {q(5, 6), q(3, 2), q(24, 5)};
    for (int k = 3; k <= 5; ++k) {
      const auto theta = compute_doc_kernels(generate_bdf_kernels(k), 201);
      const auto i = static_cast<std::size_t>(k - 3);
      const auto general = certify_decay(theta, 200, {rho[i] / q(4), q(k, 7)});
      o.expect(general.valid, "rho/4 bound k=" + std::to_string(k));
      const auto per_k = certify_decay(theta, 200, {sharp[i], q(k, 7)});
      o.expect(per_k.valid, "per-k bound k=" + std::to_string(k));
    }
  });

  criterion(8, "starting-effect constants", 10.0, [](Outcome& o) {
    const auto c3 = certify_starting_bound(3, 200);
    o.expect(c3.valid && c3.c_I == q(11, 7), "c_I,3 = 11/7");
    const BdfKernels b3 = generate_bdf_kernels(3);
    const auto base = starting_coefficients(3, 3, compute_doc_kernels(b3, 1), b3);
    o.expect(base.c[0] == q(1, 11), "c_1(3) = " + base.c[0].str() + ", expected 1/11");
    o.expect(base.c[1] == q(-7, 11), "c_2(3) = " + base.c[1].str() + ", expected -7/11");
    for (int k = 4; k <= 5; ++k) {
      const auto a = certify_starting_bound(k, 200);
      const auto b = certify_starting_bound(k, 400);
      const bool finite = std::isfinite(a.c_I.to_double()) && a.valid && b.valid;
      o.expect(finite, "c_I," + std::to_string(k) + " finite");
      o.expect(std::abs(a.c_I.to_double() - b.c_I.to_double()) <= 1e-12, "c_I," + std::to_string(k) + " stable");
    }
  });

  criterion(9, "observed convergence orders", 120.0, [](Outcome& o) {
    const ProblemSpec scalar = presets::scalar_decay(-1.0);
    for (int k = 1; k <= 5; ++k) {
      std::vector<double> errs;
      for (int d : {20, 40, 80, 160}) errs.push_back(run_error(scalar, Grid1D::scalar_point(), k, 1.0 / d, 1.0));
      const double m = mean(slopes(errs));
      o.expect(std::abs(m - k) <= 0.2, "scalar k=" + std::to_string(k) + " order " + std::to_string(m));
    }
    const ProblemSpec sine = presets::manufactured_sine();
    const Grid1D fine = Grid1D::uniform(1024);
    const Grid1D finer = Grid1D::uniform(2048);
    const std::vector<std::vector<int>> ladders{{20, 40, 80, 160}, {10, 20, 40, 80}, {10, 20, 40}};
    for (int k = 3; k <= 5; ++k) {
      std::vector<double> errs;
      bool subdominant = true;
      for (int d : ladders[static_cast<std::size_t>(k - 3)]) {
        const double e = run_error(sine, fine, k, 1.0 / d, 1.0);
        const double e2 = run_error(sine, finer, k, 1.0 / d, 1.0);
        errs.push_back(e);
        subdominant = subdominant && std::abs(e2 - e) / e < 0.05;
      }
      const double m = mean(slopes(errs));
      o.expect(std::abs(m - k) <= 0.2, "pde k=" + std::to_string(k) + " order " + std::to_string(m));
      o.expect(subdominant, "pde k=" + std::to_string(k) + " spatial error not subdominant");
    }
  });

  criterion(10, "norms stay under the stability bounds", 60.0, [](Outcome& o) {
    const Grid1D grid = Grid1D::uniform(255);
    auto dominated = [](const RunRecord& rec, StabilityTheorem th) {
      const auto bound = theoretical_stability_bound(rec, certified_stability_constants(rec.k), th);
      for (std::size_t n = static_cast<std::size_t>(rec.k); n < bound.size(); ++n) {
        if (!(rec.norms[n] <= bound[n])) return false;
      }
      return true;
    };
    for (int k = 3; k <= 5; ++k) {
      SolverConfig cfg;
      cfg.k = k;
      cfg.tau = 0.01;
      cfg.num_steps = 500;
      const auto rec = run(presets::dissipative_decay(1.0, -1.0), grid, cfg);
      o.expect(rec.dissipative_hypotheses && dominated(rec, StabilityTheorem::Dissipative),
               "dissipative k=" + std::to_string(k));

      cfg.tau = stability_step_limit(k, 1.0);
      cfg.num_steps = static_cast<int>(std::ceil(5.0 / cfg.tau));
      const auto osc = run(presets::oscillating_beta(1.0, 1.0), grid, cfg);
      o.expect(osc.general_hypotheses && dominated(osc, StabilityTheorem::General),
               "oscillating k=" + std::to_string(k));
    }
  });

  criterion(11, "randomized positive-definiteness trials", 30.0, [](Outcome& o) {
    for (int k = 3; k <= 5; ++k) {
      const double sigma = minimize_generating_function(make_generating_function(generate_bdf_kernels(k))).sigma;
      o.expect(quadratic_form_check(k, 50, 10000) >= sigma - 1e-6, "BDF form k=" + std::to_string(k));
      o.expect(doc_positive_definiteness_check(k, 50, 10000).all_positive, "DOC form k=" + std::to_string(k));
    }
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
