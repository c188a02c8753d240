#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bdfdoc/cli.hpp"

#ifndef BDFDOC_VERSION
#define BDFDOC_VERSION "unknown"
#endif

namespace bdfdoc::cli {

using nlohmann::json;

namespace {

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Text: return "text";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
  }
  return "text";
}

OutputFormat parse_format(const std::string& s) {
  if (s == "text") return OutputFormat::Text;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw UsageError("unknown format '" + s + "' (expected text, csv or json)");
}

RunMode parse_mode(const std::string& s) {
  if (s == "scalar") return RunMode::Scalar;
  if (s == "pde") return RunMode::Pde;
  throw UsageError("unknown mode '" + s + "' (expected scalar or pde)");
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::vector<int> int_list(const json& j, const char* key) {
  if (j.is_array()) return get_as<std::vector<int>>(j, key);
  return {get_as<int>(j, key)};
}

std::string step_text(const json& j, const char* key) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  throw UsageError(std::string("config key '") + key + "' must be a string like \"1/20\" or a number");
}

void apply_keys(const json& j, CampaignConfig& c) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "command") c.command = get_as<std::string>(v, k);
    else if (key == "action") c.action = get_as<std::string>(v, k);
    else if (key == "k") c.k_list = int_list(v, k);
    else if (key == "tau_ladder") {
      if (!v.is_array()) throw UsageError("config key 'tau_ladder' must be an array");
      c.tau_ladder.clear();
      for (const auto& e : v) c.tau_ladder.push_back(step_text(e, k));
    } else if (key == "m_list") c.m_list = int_list(v, k);
    else if (key == "trials") c.trials = get_as<int>(v, k);
    else if (key == "n") c.form_size = get_as<int>(v, k);
    else if (key == "j_max") c.j_max = get_as<int>(v, k);
    else if (key == "n_max") c.n_max = get_as<int>(v, k);
    else if (key == "count") c.count = get_as<int>(v, k);
    else if (key == "doc_format") c.doc_format = get_as<std::string>(v, k);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, k);
    else if (key == "jobs") c.jobs = get_as<int>(v, k);
    else if (key == "out") c.out = get_as<std::string>(v, k);
    else if (key == "format") c.format = parse_format(get_as<std::string>(v, k));
    else if (key == "mode") c.mode = parse_mode(get_as<std::string>(v, k));
    else if (key == "problem" || key == "f") c.problem = get_as<std::string>(v, k);
    else if (key == "epsilon") c.epsilon = get_as<double>(v, k);
    else if (key == "beta") {
      if (!v.is_number()) throw UsageError("'beta' must be a number; pick a problem preset for variable beta");
      c.beta = v.get<double>();
    } else if (key == "beta_star") c.beta_star = get_as<double>(v, k);
    else if (key == "M") c.num_interior = get_as<int>(v, k);
    else if (key == "T") c.final_time = get_as<double>(v, k);
    else if (key == "startup") c.startup = get_as<std::string>(v, k);
    else if (key == "forcing") c.forcing = get_as<std::string>(v, k);
    else if (key == "spatial_check") c.spatial_check = get_as<bool>(v, k);
    else if (key == "tau") c.tau = step_text(v, k);
    else if (key == "tau_factor") c.tau_factor = get_as<double>(v, k);
    else if (key == "theorem") c.theorem = get_as<std::string>(v, k);
    else throw UsageError("unknown config key '" + key + "'");
  }
}

}  // namespace

CampaignConfig apply_config_text(const std::string& json_text, CampaignConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  apply_keys(j, base);
  return base;
}

CampaignConfig load_config_file(const std::string& path, CampaignConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return apply_config_text(buf.str(), std::move(base));
}

std::string config_echo(const CampaignConfig& c) {
  json j;
  j["command"] = c.command;
  if (!c.action.empty()) j["action"] = c.action;
  j["k"] = c.k_list;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  if (c.format) j["format"] = format_name(*c.format);
  if (c.command == "doc") {
    j["count"] = c.count;
    j["doc_format"] = c.doc_format;
    if (c.n_max) j["n_max"] = *c.n_max;
  }
  if (c.command == "spectral" || c.command == "certify") {
    j["m_list"] = c.m_list;
    j["trials"] = c.trials;
    j["n"] = c.form_size;
  }
  if (c.command == "certify") j["j_max"] = c.j_max;
  if ((c.command == "spectral" || c.command == "certify" || c.command == "starting") && c.n_max) {
    j["n_max"] = *c.n_max;
  }
  if (c.command == "converge" || c.command == "stability") {
    if (c.mode) j["mode"] = *c.mode == RunMode::Scalar ? "scalar" : "pde";
    j["problem"] = c.problem;
    j["epsilon"] = c.epsilon;
    j["beta"] = c.beta;
    j["beta_star"] = c.beta_star;
    if (c.mode != RunMode::Scalar) j["M"] = c.num_interior;
    if (c.final_time) j["T"] = *c.final_time;
    j["startup"] = c.startup;
    j["forcing"] = c.forcing;
  }
  if (c.command == "converge") {
    j["tau_ladder"] = c.tau_ladder;
    j["spatial_check"] = c.spatial_check;
  }
  if (c.command == "stability") {
    if (c.tau) j["tau"] = *c.tau;
    j["tau_factor"] = c.tau_factor;
    j["theorem"] = c.theorem;
  }
  return j.dump();
}

std::string version_string() { return BDFDOC_VERSION; }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_step(const std::string& text) {
  double value = 0.0;
  try {
    if (text.find('/') != std::string::npos) {
      value = Rational::parse(text).to_double();
    } else {
      std::size_t used = 0;
      value = std::stod(text, &used);
      if (used != text.size()) throw UsageError("trailing characters");
    }
  } catch (const std::exception&) {
    throw UsageError("cannot parse time step '" + text + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) throw UsageError("time step '" + text + "' must be positive");
  return value;
}

OrderReport make_order_report(int k, std::vector<double> taus, std::vector<double> errors,
                              std::vector<double> spatial_changes) {
  if (taus.size() != errors.size() || taus.size() < 2) {
    throw PreconditionError("order report needs at least two (tau, error) pairs");
  }
  OrderReport r;
  r.k = k;
  r.taus = std::move(taus);
  r.errors = std::move(errors);
  r.spatial_changes = std::move(spatial_changes);
  bool finite = true;
  for (double e : r.errors) finite = finite && e > 0.0 && std::isfinite(e);
  for (std::size_t i = 0; i + 1 < r.errors.size(); ++i) {
    const double p = std::log(r.errors[i] / r.errors[i + 1]) / std::log(r.taus[i] / r.taus[i + 1]);
    r.orders.push_back(p);
  }
  double sum = 0.0;
  r.min_order = r.orders.front();
  for (double p : r.orders) {
    sum += p;
    r.min_order = std::min(r.min_order, p);
  }
  r.mean_order = sum / static_cast<double>(r.orders.size());
  for (double s : r.spatial_changes) r.spatial_ok = r.spatial_ok && s < 0.05;
  r.pass = finite && std::abs(r.mean_order - k) <= 0.2 && r.min_order >= k - 0.35 && r.spatial_ok;
  return r;
}

}  // namespace bdfdoc::cli
