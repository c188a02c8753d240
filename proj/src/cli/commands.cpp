#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdfdoc/cli.hpp"
#include "bdfdoc/doc_kernels.hpp"
#include "bdfdoc/kernel_core.hpp"
#include "bdfdoc/pde_solver.hpp"
#include "bdfdoc/problems.hpp"
#include "bdfdoc/spectral_analysis.hpp"
#include "bdfdoc/starting_effects.hpp"

namespace bdfdoc::cli {

using nlohmann::json;

namespace {

// Reference rows, kept as text so that a generator bug cannot leak into
// the comparison.
const std::map<int, std::vector<std::string>> kKernelTable = {
    {1, {"1"}},
    {2, {"3/2", "-1/2"}},
    {3, {"11/6", "-7/6", "1/3"}},
    {4, {"25/12", "-23/12", "13/12", "-1/4"}},
    {5, {"137/60", "-163/60", "137/60", "-21/20", "1/5"}},
};

// Reference minima of g, compared against the computed ones.
const std::map<int, double> kReferenceSigma = {{4, 1.62828}, {5, 0.477683}};
const Rational kReferenceSigma3(95, 48);

std::vector<int> orders_or(const CampaignConfig& c, std::vector<int> fallback, int lo, int hi) {
  std::vector<int> ks = c.k_list.empty() ? std::move(fallback) : c.k_list;
  for (int k : ks) {
    if (k < lo || k > hi) {
      throw UsageError(c.command + ": order k=" + std::to_string(k) + " not supported (allowed " +
                       std::to_string(lo) + ".." + std::to_string(hi) + ")");
    }
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

int single_order(const CampaignConfig& c, int fallback, int lo, int hi) {
  const auto ks = orders_or(c, {fallback}, lo, hi);
  if (ks.size() != 1) throw UsageError(c.command + " takes exactly one order via --k");
  return ks.front();
}

BdfKernels kernels_for(int k, const Hooks& hooks) {
  const BdfKernels base = generate_bdf_kernels(k);
  if (!hooks.perturb_kernels) return base;
  std::vector<Rational> b(base.exact().begin(), base.exact().end());
  hooks.perturb_kernels(k, b);
  return kernels_from_coefficients(std::move(b));
}

void write_header(std::ostream& out, const CampaignConfig& c) {
  out << "# bdfdoc " << version_string() << "\n";
  out << "# config " << config_echo(c) << "\n";
  out << "# seed " << c.seed << "\n";
}

json report_base(const CampaignConfig& c) {
  json j;
  j["version"] = version_string();
  j["config"] = json::parse(config_echo(c));
  j["seed"] = c.seed;
  return j;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

json starting_json(const StartingBoundConstant& s) {
  json j;
  j["k"] = s.order;
  j["c_I"] = s.c_I.str();
  j["c_I_decimal"] = s.c_I.to_double();
  j["c_I_tight"] = s.c_I_tight.str();
  j["c_I_tight_decimal"] = s.c_I_tight.to_double();
  j["n_max"] = s.j_max_checked;
  json base = json::array();
  for (const auto& bc : s.base_cases) base.push_back({{"n", bc.step}, {"ratio", bc.ratio.str()}});
  j["base_cases"] = base;
  json env = json::array();
  for (const auto& e : s.envelope) env.push_back(e.str());
  j["envelope"] = env;
  j["envelope_slack_min"] = s.envelope_slack_min;
  j["valid"] = s.valid;
  return j;
}

StartupMode parse_startup(const std::string& s) {
  if (s == "auto") return AutoStartup{};
  if (s == "exact") return ExactStartup{};
  if (s == "cascaded") return AutoStartup{};
  if (s.rfind("cascaded:", 0) == 0) {
    try {
      const int n = std::stoi(s.substr(9));
      if (n >= 1) return CascadedStartup{n};
    } catch (const std::exception&) {
    }
  }
  throw UsageError("unknown startup '" + s + "' (expected auto, exact, cascaded or cascaded:N)");
}

StartupMode resolve_startup(const std::string& s, int k) {
  if (s == "cascaded") {
    int n = 1;
    for (int i = 0; i < k; ++i) n *= 4;
    return CascadedStartup{n};
  }
  return parse_startup(s);
}

ForcingMode parse_forcing(const std::string& s) {
  if (s == "continuous") return ForcingMode::Continuous;
  if (s == "grid_consistent") return ForcingMode::GridConsistent;
  throw UsageError("unknown forcing '" + s + "' (expected continuous or grid_consistent)");
}

ProblemSpec make_problem(const CampaignConfig& c, const std::string& name) {
  try {
    return presets::by_name(name, {c.epsilon, c.beta, c.beta_star});
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

std::vector<std::string> default_ladder(RunMode mode, int k) {
  if (mode == RunMode::Scalar) return {"1/20", "1/40", "1/80", "1/160"};
  // Below these steps the k = 4, 5 errors reach the rounding floor of the
  // M = 1024 solve and the observed slope flattens.
  if (k == 5) return {"1/10", "1/20", "1/40"};
  if (k == 4) return {"1/10", "1/20", "1/40", "1/80"};
  return {"1/20", "1/40", "1/80", "1/160"};
}

int steps_for(double final_time, double tau, bool exact) {
  const double ratio = final_time / tau;
  const long long n = exact ? std::llround(ratio) : static_cast<long long>(std::ceil(ratio - 1e-9));
  if (exact && std::abs(static_cast<double>(n) * tau - final_time) > 1e-9 * std::max(1.0, final_time)) {
    throw UsageError("T = " + format_double(final_time) + " is not a whole number of steps of " + format_double(tau));
  }
  if (n < 1 || n > 100000000) throw UsageError("step count out of range");
  return static_cast<int>(n);
}

CampaignConfig resolved(const CampaignConfig& c, std::vector<int> ks) {
  CampaignConfig r = c;
  r.k_list = std::move(ks);
  return r;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

}  // namespace

int cmd_kernels(const CampaignConfig& config, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  const auto ks = orders_or(config, {2, 3, 4, 5}, kMinOrder, kMaxOrder);
  const CampaignConfig echo = resolved(config, ks);
  const OutputFormat fmt = config.format.value_or(OutputFormat::Text);

  std::vector<std::string> mismatches;
  std::ostringstream body;
  json rows = json::array();
  if (fmt == OutputFormat::Csv) body << "k,j,b,b_decimal\n";
  for (int k : ks) {
    const BdfKernels b = kernels_for(k, hooks);
    const auto& table = kKernelTable.at(k);
    std::vector<std::string> cells;
    for (int j = 0; j < k; ++j) {
      const Rational v = b.exact(j);
      cells.push_back(v.str());
      if (!(v == Rational::parse(table[static_cast<std::size_t>(j)]))) {
        mismatches.push_back("k=" + std::to_string(k) + " b_" + std::to_string(j) + " = " + v.str() +
                             " differs from table value " + table[static_cast<std::size_t>(j)]);
      }
      if (fmt == OutputFormat::Csv) body << k << "," << j << "," << v.str() << "," << format_double(b[j]) << "\n";
    }
    if (fmt == OutputFormat::Text) body << k << ": " << join(cells, " ") << "\n";
    rows.push_back({{"k", k}, {"b", cells}});
  }

  if (fmt == OutputFormat::Json) {
    json j = report_base(echo);
    j["kernels"] = rows;
    j["matches_table"] = mismatches.empty();
    emit(out, j);
  } else {
    write_header(out, echo);
    out << body.str();
  }
  for (const auto& m : mismatches) err << "kernels: " << m << "\n";
  return mismatches.empty() ? kExitPass : kExitFailure;
}

int cmd_doc(const CampaignConfig& config, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  if (config.action == "dump") {
    const int k = single_order(config, 3, kMinOrder, kMaxOrder);
    const CampaignConfig echo = resolved(config, {k});
    if (config.count < 1) throw UsageError("doc dump: --count must be at least 1");
    const DocKernels theta = compute_doc_kernels(kernels_for(k, hooks), config.count);

    if (config.format == OutputFormat::Json) {
      json j = report_base(echo);
      j["k"] = k;
      json list = json::array();
      for (const auto& t : theta.exact()) list.push_back(t.str());
      j["theta"] = list;
      emit(out, j);
      return kExitPass;
    }
    const std::string& f = config.doc_format;
    if (f != "fraction" && f != "decimal" && f != "csv") {
      throw UsageError("doc dump: unknown format '" + f + "' (expected fraction, decimal or csv)");
    }
    write_header(out, echo);
    if (f == "csv") out << "j,theta,theta_decimal\n";
    for (int j = 0; j < theta.size(); ++j) {
      if (f == "fraction") out << j << " " << theta.exact(j).str() << "\n";
      else if (f == "decimal") out << j << " " << format_double(theta[j]) << "\n";
      else out << j << "," << theta.exact(j).str() << "," << format_double(theta[j]) << "\n";
    }
    return kExitPass;
  }
  if (config.action != "verify") throw UsageError("doc needs an action: dump or verify");

  const auto ks = orders_or(config, {2, 3, 4, 5}, 2, kMaxOrder);
  CampaignConfig echo = resolved(config, ks);
  const int n_max = config.n_max.value_or(200);
  echo.n_max = n_max;
  if (n_max < 1) throw UsageError("doc verify: --n-max must be positive");
  std::function<OrthogonalityResult(const int&)> fn = [&](const int& k) {
    const BdfKernels b = kernels_for(k, hooks);
    return verify_orthogonality(b, compute_doc_kernels(b, n_max + 1), n_max);
  };
  const auto cells = run_cells<int, OrthogonalityResult>(ks, fn, config.jobs);

  bool ok = true;
  json reports = json::array();
  std::ostringstream body;
  for (const auto& [k, cell] : cells) {
    json r{{"k", k}, {"n_max", n_max}};
    if (!cell.value) {
      ok = false;
      r["error"] = cell.error;
      err << "doc verify: k=" << k << ": " << cell.error << "\n";
      body << "k=" << k << " error: " << cell.error << "\n";
    } else {
      const auto& res = *cell.value;
      r["holds"] = res.holds;
      if (!res.holds) {
        ok = false;
        r["first_failure"] = {res.first_failure->first, res.first_failure->second};
        r["failing_identity"] = res.failing_identity;
        err << "doc verify: k=" << k << " identity " << res.failing_identity << " fails at (n, j) = ("
            << res.first_failure->first << ", " << res.first_failure->second << ")\n";
      }
      body << "k=" << k << " orthogonality for k <= j <= n <= " << n_max << ": " << (res.holds ? "holds" : "FAILS")
           << "\n";
    }
    reports.push_back(r);
  }
  if (config.format == OutputFormat::Json) {
    json j = report_base(echo);
    j["reports"] = reports;
    j["pass"] = ok;
    emit(out, j);
  } else {
    write_header(out, echo);
    out << body.str();
  }
  return ok ? kExitPass : kExitFailure;
}

namespace {

struct SpectralCell {
  json report;
  bool pass = true;
  std::vector<std::string> failures;
};

SpectralCell spectral_report(const CampaignConfig& config, int k) {
  const BdfKernels b = generate_bdf_kernels(k);
  const auto g = make_generating_function(b);
  const SigmaBound lo = minimize_generating_function(g);
  const SigmaBound hi = maximize_generating_function(g);

  SpectralCell cell;
  json& r = cell.report;
  r["k"] = k;
  r["sigma"] = lo.sigma;
  r["sigma_exact"] = lo.exact_sigma ? json(lo.exact_sigma->str()) : json(nullptr);
  r["argmin_cos"] = lo.argmin_cos;
  r["g_max"] = hi.sigma;

  json by_m = json::object();
  for (int m : config.m_list) {
    const double lambda = min_eigenvalue(build_toeplitz(k, m));
    by_m[std::to_string(m)] = lambda;
    if (lambda < lo.sigma - 1e-8 || lambda > hi.sigma) {
      cell.pass = false;
      cell.failures.push_back("k=" + std::to_string(k) + " m=" + std::to_string(m) + ": lambda_min = " +
                              format_double(lambda) + " outside [sigma - 1e-8, g_max]");
    }
  }
  r["lambda_min_by_m"] = by_m;

  const double qf = quadratic_form_check(k, config.form_size, config.trials, config.seed);
  r["quadratic_form_min"] = qf;
  r["quadratic_form_trials"] = config.trials;
  r["quadratic_form_n"] = config.form_size;
  if (qf < lo.sigma - 1e-6) {
    cell.pass = false;
    cell.failures.push_back("k=" + std::to_string(k) + ": quadratic form ratio " + format_double(qf) +
                            " below sigma - 1e-6");
  }

  if (k >= 3) {
    const auto s = certify_starting_bound(k, config.n_max.value_or(kDefaultStartingNMax));
    r["starting_effects"] = starting_json(s);
    if (!s.valid) {
      cell.pass = false;
      cell.failures.push_back("k=" + std::to_string(k) + ": starting-effect bound not certified");
    }
  } else {
    r["starting_effects"] = nullptr;
  }
  r["pass"] = cell.pass;
  return cell;
}

void validate_spectral(const CampaignConfig& config) {
  if (config.m_list.empty()) throw UsageError("--m-list must not be empty");
  for (int m : config.m_list) {
    if (m < 1) throw UsageError("--m-list entries must be positive");
  }
  if (config.trials < 1) throw UsageError("--trials must be positive");
}

}  // namespace

int cmd_spectral(const CampaignConfig& config, std::ostream& out, std::ostream& err) {
  if (config.action != "certify") throw UsageError("spectral needs the action 'certify'");
  const int k = single_order(config, 3, 2, kMaxOrder);
  CampaignConfig echo = resolved(config, {k});
  echo.n_max = config.n_max.value_or(kDefaultStartingNMax);
  validate_spectral(config);
  if (config.form_size < k) throw UsageError("--n must be at least k");

  SpectralCell cell = spectral_report(config, k);
  json j = report_base(echo);
  j.update(cell.report);
  emit(out, j);
  for (const auto& f : cell.failures) err << "spectral: " << f << "\n";
  return cell.pass ? kExitPass : kExitFailure;
}

int cmd_starting(const CampaignConfig& config, std::ostream& out, std::ostream& err) {
  const auto ks = orders_or(config, {3, 4, 5}, 3, kMaxOrder);
  CampaignConfig echo = resolved(config, ks);
  const int n_max = config.n_max.value_or(kDefaultStartingNMax);
  echo.n_max = n_max;
  if (n_max < 5) throw UsageError("--n-max must be at least 5");
  std::function<StartingBoundConstant(const int&)> fn = [&](const int& k) { return certify_starting_bound(k, n_max); };
  const auto cells = run_cells<int, StartingBoundConstant>(ks, fn, config.jobs);

  const OutputFormat fmt = config.format.value_or(OutputFormat::Text);
  bool ok = true;
  json reports = json::array();
  std::ostringstream body;
  if (fmt == OutputFormat::Csv) body << "k,c_I,c_I_decimal,c_I_tight,c_I_tight_decimal,n_max,envelope_slack_min,valid\n";
  for (const auto& [k, cell] : cells) {
    if (!cell.value) {
      ok = false;
      err << "starting: k=" << k << ": " << cell.error << "\n";
      continue;
    }
    const auto& s = *cell.value;
    ok = ok && s.valid;
    if (!s.valid) err << "starting: k=" << k << ": bound not certified up to n = " << n_max << "\n";
    reports.push_back(starting_json(s));
    if (fmt == OutputFormat::Csv) {
      body << k << "," << s.c_I.str() << "," << format_double(s.c_I.to_double()) << "," << s.c_I_tight.str() << ","
           << format_double(s.c_I_tight.to_double()) << "," << n_max << "," << format_double(s.envelope_slack_min)
           << "," << (s.valid ? "true" : "false") << "\n";
    } else {
      body << "k=" << k << " c_I=" << s.c_I.str() << " (" << format_double(s.c_I.to_double()) << ")"
           << " tight=" << s.c_I_tight.str() << " (" << format_double(s.c_I_tight.to_double()) << ")"
           << " slack_min=" << format_double(s.envelope_slack_min) << (s.valid ? " certified" : " NOT CERTIFIED")
           << "\n";
    }
  }
  if (fmt == OutputFormat::Json) {
    json j = report_base(echo);
    j["reports"] = reports;
    j["pass"] = ok;
    emit(out, j);
  } else {
    write_header(out, echo);
    out << body.str();
  }
  return ok ? kExitPass : kExitFailure;
}

namespace {

struct CertifyCell {
  json report;
  bool pass = true;
  std::vector<std::string> failures;
};

CertifyCell certify_order(const CampaignConfig& config, int k, const Hooks& hooks) {
  CertifyCell cell;
  json checks;
  auto fail = [&](const std::string& check, const std::string& detail) {
    cell.pass = false;
    cell.failures.push_back("k=" + std::to_string(k) + " " + check + ": " + detail);
  };

  const int j_max = config.j_max;
  const BdfKernels b = kernels_for(k, hooks);
  const DocKernels theta = compute_doc_kernels(b, j_max + 1);

  const auto orth = verify_orthogonality(b, theta, j_max);
  checks["orthogonality"] = {{"pass", orth.holds}, {"n_max", j_max}};
  if (!orth.holds) {
    fail("orthogonality", "identity " + std::to_string(orth.failing_identity) + " fails at (n, j) = (" +
                              std::to_string(orth.first_failure->first) + ", " +
                              std::to_string(orth.first_failure->second) + ")");
  }

  if (k >= 3) {
    const auto dec = certify_decay(theta, j_max);
    json d{{"pass", dec.valid}, {"rho", dec.rho.str()}, {"ratio", dec.ratio.str()}, {"j_max", dec.j_max},
           {"min_slack", dec.max_slack}};
    if (dec.first_violation) d["first_violation"] = *dec.first_violation;
    checks["decay"] = d;
    if (!dec.valid) fail("decay", "|theta_j| exceeds the envelope at j = " + std::to_string(dec.first_violation.value_or(-1)));
  }

  {
    const auto roots = characteristic_roots(k);
    double worst = 0.0;
    const int j_top = std::min(j_max, 60);
    for (int j = 0; j <= j_top; ++j) {
      worst = std::max(worst, std::abs(closed_form_theta(roots, j) - theta[j]));
    }
    json moduli = json::array();
    for (const auto& r : roots.roots) moduli.push_back(std::abs(r));
    const bool ok = worst <= 1e-9;
    checks["characteristic_roots"] = {{"pass", ok}, {"moduli", moduli}, {"max_residual", roots.max_residual},
                                      {"closed_form_max_error", worst}};
    if (!ok) fail("characteristic_roots", "closed form misses theta by " + format_double(worst));
  }

  {
    const auto g = make_generating_function(b);
    const auto lo = minimize_generating_function(g);
    const auto hi = maximize_generating_function(g);
    json by_m = json::object();
    bool ok = lo.sigma > 0.0;
    if (!ok) fail("positive_definiteness", "min g = " + format_double(lo.sigma) + " is not positive");
    for (int m : config.m_list) {
      const double lambda = min_eigenvalue(ToeplitzForm(b, m));
      by_m[std::to_string(m)] = lambda;
      if (lambda < lo.sigma - 1e-8 || lambda > hi.sigma) {
        ok = false;
        fail("positive_definiteness", "lambda_min(m=" + std::to_string(m) + ") = " + format_double(lambda) +
                                          " outside [sigma - 1e-8, g_max]");
      }
    }
    const double qf = quadratic_form_check(k, config.form_size, config.trials, config.seed);
    if (qf < lo.sigma - 1e-6) {
      ok = false;
      fail("positive_definiteness", "quadratic form ratio " + format_double(qf) + " below sigma");
    }
    const auto doc = doc_positive_definiteness_check(k, config.form_size, config.trials, config.seed);
    if (!doc.all_positive) {
      ok = false;
      fail("positive_definiteness", "a DOC quadratic form was not positive");
    }
    checks["positive_definiteness"] = {{"pass", ok},
                                       {"sigma", lo.sigma},
                                       {"sigma_exact", lo.exact_sigma ? json(lo.exact_sigma->str()) : json(nullptr)},
                                       {"argmin_cos", lo.argmin_cos},
                                       {"g_max", hi.sigma},
                                       {"lambda_min_by_m", by_m},
                                       {"quadratic_form_min", qf},
                                       {"doc_form_min", doc.min_ratio}};

    json discrepancies = json::array();
    if (k == 3 && !(lo.exact_sigma && *lo.exact_sigma == kReferenceSigma3)) {
      discrepancies.push_back("reference sigma_3 = 95/48 not reproduced exactly");
    }
    if (auto it = kReferenceSigma.find(k); it != kReferenceSigma.end() && std::abs(lo.sigma - it->second) > 1e-5) {
      discrepancies.push_back("reference sigma_" + std::to_string(k) + " = " + format_double(it->second) +
                              " differs from min g = " + format_double(lo.sigma) +
                              (it->second > lo.sigma ? "; the reference value is not a lower bound of g" : ""));
    }
    cell.report["discrepancies"] = discrepancies;
  }

  if (k >= 3) {
    const auto s = certify_starting_bound(k, config.n_max.value_or(kDefaultStartingNMax));
    const bool ok = s.valid && s.c_I > Rational(1);
    json sj = starting_json(s);
    sj["pass"] = ok;
    checks["starting_effects"] = sj;
    if (!ok) fail("starting_effects", s.valid ? "c_I is not above 1" : "bound not certified");
  }

  cell.report["k"] = k;
  cell.report["checks"] = checks;
  cell.report["pass"] = cell.pass;
  return cell;
}

}  // namespace

int cmd_certify(const CampaignConfig& config, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  const auto ks = orders_or(config, {3, 4, 5}, 2, kMaxOrder);
  CampaignConfig echo = resolved(config, ks);
  echo.n_max = config.n_max.value_or(kDefaultStartingNMax);
  validate_spectral(config);
  if (config.j_max < kMaxOrder) throw UsageError("--j-max must be at least 5");
  if (config.form_size < kMaxOrder) throw UsageError("--n must be at least 5");

  std::function<CertifyCell(const int&)> fn = [&](const int& k) { return certify_order(config, k, hooks); };
  const auto cells = run_cells<int, CertifyCell>(ks, fn, config.jobs);

  bool ok = true;
  json reports = json::array();
  for (const auto& [k, cell] : cells) {
    if (!cell.value) {
      ok = false;
      reports.push_back({{"k", k}, {"pass", false}, {"error", cell.error}});
      err << "certify: k=" << k << ": " << cell.error << "\n";
      continue;
    }
    ok = ok && cell.value->pass;
    reports.push_back(cell.value->report);
    for (const auto& f : cell.value->failures) err << "certify: " << f << "\n";
  }
  json j = report_base(echo);
  j["reports"] = reports;
  j["pass"] = ok;
  emit(out, j);
  return ok ? kExitPass : kExitFailure;
}

int cmd_converge(const CampaignConfig& config, std::ostream& out, std::ostream& err) {
  const RunMode mode = config.mode.value_or(RunMode::Scalar);
  const auto ks = orders_or(config, mode == RunMode::Scalar ? std::vector<int>{1, 2, 3, 4, 5} : std::vector<int>{3, 4, 5},
                            kMinOrder, kMaxOrder);
  const std::string problem_name =
      config.problem.empty() ? (mode == RunMode::Scalar ? "scalar_decay" : "manufactured_sine") : config.problem;
  const ProblemSpec probe = make_problem(config, problem_name);
  if (!probe.exact) throw UsageError("converge needs a problem with an exact solution");
  if (mode == RunMode::Pde && config.num_interior < 2) throw UsageError("--M must be at least 2");
  const double final_time = config.final_time.value_or(1.0);
  CampaignConfig echo = resolved(config, ks);
  echo.mode = mode;
  echo.problem = problem_name;
  echo.final_time = final_time;
  const ForcingMode forcing = parse_forcing(config.forcing);
  parse_startup(config.startup);
  const bool spatial = mode == RunMode::Pde && config.spatial_check;

  std::map<int, std::vector<std::string>> ladders;
  for (int k : ks) {
    auto ladder = config.tau_ladder.empty() ? default_ladder(mode, k) : config.tau_ladder;
    if (ladder.size() < 2) throw UsageError("the tau ladder needs at least two entries");
    for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
      if (!(parse_step(ladder[i]) > parse_step(ladder[i + 1]))) {
        throw UsageError("tau ladder entries must be strictly decreasing");
      }
    }
    for (const auto& t : ladder) steps_for(final_time, parse_step(t), true);
    ladders[k] = ladder;
  }

  using Key = std::tuple<int, int, int>;  // k, ladder index, grid refinement
  std::vector<Key> keys;
  for (int k : ks) {
    for (int i = 0; i < static_cast<int>(ladders[k].size()); ++i) {
      keys.emplace_back(k, i, 0);
      if (spatial) keys.emplace_back(k, i, 1);
    }
  }
  std::function<double(const Key&)> fn = [&](const Key& key) {
    const auto [k, i, refine] = key;
    const double tau = parse_step(ladders[k][static_cast<std::size_t>(i)]);
    SolverConfig sc;
    sc.k = k;
    sc.tau = tau;
    sc.num_steps = steps_for(final_time, tau, true);
    sc.startup = resolve_startup(config.startup, k);
    sc.forcing = forcing;
    const ProblemSpec problem = make_problem(config, problem_name);
    const RunRecord rec = mode == RunMode::Scalar
                              ? scalar_ode_mode(problem, sc)
                              : run(problem, Grid1D::uniform(config.num_interior << refine, problem.length), sc);
    return *rec.final_error;
  };
  const auto cells = run_cells<Key, double>(keys, fn, config.jobs);
  std::map<Key, const CellOutcome<double>*> by_key;
  for (const auto& [key, cell] : cells) by_key[key] = &cell;

  const OutputFormat fmt = config.format.value_or(OutputFormat::Csv);
  bool ok = true;
  std::ostringstream body;
  json reports = json::array();
  body << "k,tau,num_steps,final_error,observed_order,spatial_change,mean_order,min_order,pass,status\n";
  for (int k : ks) {
    const auto& ladder = ladders[k];
    std::vector<double> taus, errors, changes;
    std::vector<std::string> status(ladder.size(), "ok");
    bool complete = true;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const auto* coarse = by_key.at({k, static_cast<int>(i), 0});
      taus.push_back(parse_step(ladder[i]));
      if (!coarse->value) {
        complete = false;
        status[i] = "failed: " + coarse->error;
        errors.push_back(std::nan(""));
        continue;
      }
      errors.push_back(*coarse->value);
      if (spatial) {
        const auto* fine = by_key.at({k, static_cast<int>(i), 1});
        if (!fine->value) {
          complete = false;
          status[i] = "failed (2M): " + fine->error;
          changes.push_back(std::nan(""));
        } else {
          changes.push_back(std::abs(*fine->value - *coarse->value) / *coarse->value);
        }
      }
    }
    std::optional<OrderReport> rep;
    if (complete) rep = make_order_report(k, taus, errors, changes);
    const bool pass = rep && rep->pass;
    ok = ok && pass;
    if (!pass) {
      err << "converge: k=" << k << " "
          << (rep ? "observed mean order " + format_double(rep->mean_order) + ", min pairwise " +
                        format_double(rep->min_order) + (rep->spatial_ok ? "" : ", spatial error not subdominant")
                  : std::string("has failed cells"))
          << "\n";
    }
    json r{{"k", k}, {"tau_ladder", ladder}, {"pass", pass}};
    json errs = json::array();
    for (double e : errors) errs.push_back(std::isnan(e) ? json(nullptr) : json(e));
    r["final_errors"] = errs;
    r["status"] = status;
    if (rep) {
      r["orders"] = rep->orders;
      r["mean_order"] = rep->mean_order;
      r["min_order"] = rep->min_order;
      if (spatial) r["spatial_changes"] = rep->spatial_changes;
    }
    reports.push_back(r);

    for (std::size_t i = 0; i < ladder.size(); ++i) {
      body << k << "," << ladder[i] << "," << steps_for(final_time, taus[i], true) << ","
           << (std::isnan(errors[i]) ? "" : format_double(errors[i])) << ",";
      if (rep && i > 0) body << format_double(rep->orders[i - 1]);
      body << ",";
      if (spatial && !std::isnan(changes[i])) body << format_double(changes[i]);
      body << ",";
      if (rep) body << format_double(rep->mean_order) << "," << format_double(rep->min_order);
      else body << ",";
      body << "," << (pass ? "true" : "false") << "," << status[i] << "\n";
    }
  }

  if (fmt == OutputFormat::Json) {
    json j = report_base(echo);
    j["reports"] = reports;
    j["pass"] = ok;
    emit(out, j);
  } else {
    write_header(out, echo);
    out << body.str();
  }
  return ok ? kExitPass : kExitFailure;
}

int cmd_stability(const CampaignConfig& config, std::ostream& out, std::ostream& err) {
  const int k = single_order(config, 3, kMinOrder, kMaxOrder);
  const RunMode mode = config.mode.value_or(RunMode::Pde);
  const std::string problem_name =
      config.problem.empty() ? (mode == RunMode::Scalar ? "scalar_oscillating" : "dissipative_decay") : config.problem;
  const ProblemSpec problem = make_problem(config, problem_name);
  if (mode == RunMode::Pde && config.num_interior < 2) throw UsageError("--M must be at least 2");
  if (!(config.tau_factor > 0.0)) throw UsageError("--tau-factor must be positive");
  if (config.theorem != "auto" && config.theorem != "dissipative" && config.theorem != "general") {
    throw UsageError("unknown theorem '" + config.theorem + "' (expected auto, dissipative or general)");
  }

  double tau = 0.0;
  if (config.tau) {
    tau = parse_step(*config.tau);
  } else if (k >= 3 && problem.beta_star > 0.0) {
    tau = config.tau_factor * stability_step_limit(k, problem.beta_star);
  } else {
    tau = config.tau_factor / 20.0;
  }
  const double final_time = config.final_time.value_or(5.0);
  CampaignConfig echo = resolved(config, {k});
  echo.mode = mode;
  echo.problem = problem_name;
  echo.final_time = final_time;

  SolverConfig sc;
  sc.k = k;
  sc.tau = tau;
  sc.num_steps = steps_for(final_time, tau, false);
  sc.startup = resolve_startup(config.startup, k);
  sc.forcing = parse_forcing(config.forcing);
  if (sc.forcing == ForcingMode::GridConsistent && !problem.exact) sc.forcing = ForcingMode::Continuous;

  const RunRecord rec = mode == RunMode::Scalar ? scalar_ode_mode(problem, sc)
                                                : run(problem, Grid1D::uniform(config.num_interior, problem.length), sc);
  for (const auto& w : rec.warnings) err << "stability: warning: " << w << "\n";

  std::string theorem = config.theorem;
  if (theorem == "auto") theorem = rec.dissipative_hypotheses ? "dissipative" : "general";
  const bool supported = k >= 3;
  const bool met = supported && (theorem == "dissipative" ? rec.dissipative_hypotheses : rec.general_hypotheses);

  std::vector<double> bound(rec.norms.size(), std::nan(""));
  std::string status = "hypotheses unmet";
  std::optional<int> violation;
  if (met) {
    bound = theoretical_stability_bound(rec, certified_stability_constants(k),
                                        theorem == "dissipative" ? StabilityTheorem::Dissipative
                                                                 : StabilityTheorem::General);
    for (std::size_t n = static_cast<std::size_t>(k); n < rec.norms.size(); ++n) {
      if (rec.norms[n] > bound[n] * (1.0 + 1e-12)) {
        violation = static_cast<int>(n);
        break;
      }
    }
    status = violation ? "fail" : "pass";
  }
  if (violation) {
    err << "stability: norm " << format_double(rec.norms[static_cast<std::size_t>(*violation)]) << " exceeds bound "
        << format_double(bound[static_cast<std::size_t>(*violation)]) << " at step " << *violation << "\n";
  }

  const OutputFormat fmt = config.format.value_or(OutputFormat::Csv);
  if (fmt == OutputFormat::Json) {
    json j = report_base(echo);
    j["k"] = k;
    j["tau"] = tau;
    j["num_steps"] = sc.num_steps;
    j["theorem"] = theorem;
    j["status"] = status;
    j["warnings"] = rec.warnings;
    json steps = json::array();
    for (std::size_t n = 0; n < rec.norms.size(); ++n) {
      json s{{"step", n}, {"t", rec.times[n]}, {"norm", rec.norms[n]}};
      s["error"] = rec.errors.empty() ? json(nullptr) : json(rec.errors[n]);
      s["bound"] = std::isnan(bound[n]) ? json(nullptr) : json(bound[n]);
      steps.push_back(s);
    }
    j["steps"] = steps;
    if (violation) j["first_violation"] = *violation;
    emit(out, j);
  } else {
    write_header(out, echo);
    out << "# tau " << format_double(tau) << "\n";
    out << "# theorem " << (supported ? theorem : "none") << "\n";
    out << "# status " << status << "\n";
    out << "step,t,norm,error,bound\n";
    for (std::size_t n = 0; n < rec.norms.size(); ++n) {
      out << n << "," << format_double(rec.times[n]) << "," << format_double(rec.norms[n]) << ",";
      if (!rec.errors.empty()) out << format_double(rec.errors[n]);
      out << ",";
      if (!std::isnan(bound[n])) out << format_double(bound[n]);
      out << "\n";
    }
  }
  return violation ? kExitFailure : kExitPass;
}

namespace {

// Records which flags were given so that only those override the config file.
class Overrides {
 public:
  template <class T, class Set>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help, Set set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    appliers_.push_back([opt, value, set](CampaignConfig& c) {
      if (opt->count() > 0) set(c, *value);
    });
    return opt;
  }
  void apply(CampaignConfig& c) const {
    for (const auto& f : appliers_) f(c);
  }

 private:
  std::vector<std::function<void(CampaignConfig&)>> appliers_;
};

CLI::Option* add_orders(Overrides& o, CLI::App* app) {
  return o.add<std::vector<int>>(app, "--k", "BDF order(s), comma separated",
                                 [](CampaignConfig& c, const std::vector<int>& v) { c.k_list = v; })
      ->delimiter(',');
}

void add_spectral_options(Overrides& o, CLI::App* app) {
  o.add<std::vector<int>>(app, "--m-list", "Toeplitz orders for the eigenvalue sweep",
                          [](CampaignConfig& c, const std::vector<int>& v) { c.m_list = v; })
      ->delimiter(',');
  o.add<int>(app, "--trials", "randomized quadratic-form trials", [](CampaignConfig& c, int v) { c.trials = v; });
  o.add<int>(app, "--n", "n for the quadratic-form trials", [](CampaignConfig& c, int v) { c.form_size = v; });
  o.add<int>(app, "--n-max", "last step checked by the starting-effect certificate",
             [](CampaignConfig& c, int v) { c.n_max = v; });
}

void add_run_options(Overrides& o, CLI::App* app) {
  o.add<std::string>(app, "--mode", "scalar or pde",
                     [](CampaignConfig& c, const std::string& v) {
                       c.mode = v == "scalar" ? RunMode::Scalar
                                : v == "pde"  ? RunMode::Pde
                                              : throw UsageError("unknown mode '" + v + "'");
                     });
  o.add<std::string>(app, "--problem", "problem preset", [](CampaignConfig& c, const std::string& v) { c.problem = v; });
  o.add<int>(app, "--M", "interior grid nodes", [](CampaignConfig& c, int v) { c.num_interior = v; });
  o.add<double>(app, "--T", "final time", [](CampaignConfig& c, double v) { c.final_time = v; });
  o.add<double>(app, "--epsilon", "diffusion coefficient", [](CampaignConfig& c, double v) { c.epsilon = v; });
  o.add<double>(app, "--beta", "constant reaction coefficient", [](CampaignConfig& c, double v) { c.beta = v; });
  o.add<double>(app, "--beta-star", "bound on |beta|", [](CampaignConfig& c, double v) { c.beta_star = v; });
  o.add<std::string>(app, "--startup", "auto, exact, cascaded or cascaded:N",
                     [](CampaignConfig& c, const std::string& v) { c.startup = v; });
  o.add<std::string>(app, "--forcing", "continuous or grid_consistent",
                     [](CampaignConfig& c, const std::string& v) { c.forcing = v; });
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Certification and experiment harness for BDF-k time stepping and DOC kernels", "bdfdoc_cli"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  Overrides o;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");
  o.add<std::string>(&app, "--out", "write the report to PATH", [](CampaignConfig& c, const std::string& v) { c.out = v; });
  o.add<std::string>(&app, "--format", "text, csv or json",
                     [](CampaignConfig& c, const std::string& v) {
                       c.format = v == "text" ? OutputFormat::Text
                                  : v == "csv" ? OutputFormat::Csv
                                  : v == "json" ? OutputFormat::Json
                                                : throw UsageError("unknown format '" + v + "'");
                     });
  o.add<std::uint64_t>(&app, "--seed", "random seed", [](CampaignConfig& c, std::uint64_t v) { c.seed = v; });
  o.add<int>(&app, "--jobs", "worker threads (0: all cores)", [](CampaignConfig& c, int v) { c.jobs = v; });

  auto* kernels = app.add_subcommand("kernels", "print the BDF-k kernels and check them against the reference rows");
  add_orders(o, kernels);

  auto* doc = app.add_subcommand("doc", "DOC kernels");
  doc->require_subcommand(1);
  auto* dump = doc->add_subcommand("dump", "print theta_0 .. theta_{count-1}");
  add_orders(o, dump);
  o.add<int>(dump, "--count", "number of kernels", [](CampaignConfig& c, int v) { c.count = v; });
  o.add<std::string>(dump, "--format", "fraction, decimal or csv",
                     [](CampaignConfig& c, const std::string& v) { c.doc_format = v; });
  auto* verify = doc->add_subcommand("verify", "check both orthogonality identities exactly");
  add_orders(o, verify);
  o.add<int>(verify, "--n-max", "largest n checked", [](CampaignConfig& c, int v) { c.n_max = v; });

  auto* spectral = app.add_subcommand("spectral", "generating-function and Toeplitz eigenvalue checks");
  spectral->require_subcommand(1);
  auto* spectral_certify = spectral->add_subcommand("certify", "JSON certificate for one order");
  add_orders(o, spectral_certify);
  add_spectral_options(o, spectral_certify);

  auto* starting = app.add_subcommand("starting", "certify the starting-effect constants c_I");
  add_orders(o, starting);
  o.add<int>(starting, "--n-max", "last step checked", [](CampaignConfig& c, int v) { c.n_max = v; });

  auto* certify = app.add_subcommand("certify", "run every kernel, spectral and starting-effect check");
  add_orders(o, certify);
  add_spectral_options(o, certify);
  o.add<int>(certify, "--j-max", "largest index for orthogonality and decay", [](CampaignConfig& c, int v) { c.j_max = v; });

  auto* converge = app.add_subcommand("converge", "observed convergence orders over a tau ladder");
  add_orders(o, converge);
  add_run_options(o, converge);
  o.add<std::vector<std::string>>(converge, "--tau-ladder", "strictly decreasing steps, e.g. 1/20,1/40",
                                  [](CampaignConfig& c, const std::vector<std::string>& v) { c.tau_ladder = v; })
      ->delimiter(',');
  auto* no_spatial = converge->add_flag("--no-spatial-check", "skip the 2M subdominance runs");

  auto* stability = app.add_subcommand("stability", "compare norms with the stability bound");
  add_orders(o, stability);
  add_run_options(o, stability);
  o.add<std::string>(stability, "--tau", "time step (default: the step limit times --tau-factor)",
                     [](CampaignConfig& c, const std::string& v) { c.tau = v; });
  o.add<double>(stability, "--tau-factor", "multiple of the step limit", [](CampaignConfig& c, double v) { c.tau_factor = v; });
  o.add<std::string>(stability, "--theorem", "auto, dissipative or general",
                     [](CampaignConfig& c, const std::string& v) { c.theorem = v; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    CampaignConfig config;
    if (!config_path.empty()) config = load_config_file(config_path, config);
    o.apply(config);
    if (no_spatial->count() > 0) config.spatial_check = false;

    CLI::App* sub = app.get_subcommands().front();
    config.command = sub->get_name();
    if (!sub->get_subcommands().empty()) config.action = sub->get_subcommands().front()->get_name();
    if (config.jobs < 0) throw UsageError("--jobs must be non-negative");

    std::ofstream file;
    std::ostream* sink = &out;
    if (!config.out.empty()) {
      file.open(config.out);
      if (!file) throw UsageError("cannot write to '" + config.out + "'");
      sink = &file;
    }

    const std::string& cmd = config.command;
    if (cmd == "kernels") return cmd_kernels(config, *sink, err, hooks);
    if (cmd == "doc") return cmd_doc(config, *sink, err, hooks);
    if (cmd == "spectral") return cmd_spectral(config, *sink, err);
    if (cmd == "starting") return cmd_starting(config, *sink, err);
    if (cmd == "certify") return cmd_certify(config, *sink, err, hooks);
    if (cmd == "converge") return cmd_converge(config, *sink, err);
    if (cmd == "stability") return cmd_stability(config, *sink, err);
    throw UsageError("unknown command '" + cmd + "'");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedOrderError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace bdfdoc::cli
