#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bdfdoc/errors.hpp"
#include "bdfdoc/rational.hpp"
#include "bdfdoc/spectral_analysis.hpp"

namespace bdfdoc::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Invalid request: bad flag values, unsupported orders, malformed config.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class OutputFormat { Text, Csv, Json };
enum class RunMode { Scalar, Pde };

/// Everything a campaign needs. Built from defaults, then the optional
/// config file, then command-line flags (later sources win).
struct CampaignConfig {
  std::string command;
  /// doc: "dump" or "verify"; spectral: "certify".
  std::string action;

  std::vector<int> k_list;
  /// Kept as text ("1/20") so the config echo shows exactly what was asked.
  std::vector<std::string> tau_ladder;
  std::vector<int> m_list{50, 100, 200, 400};
  int trials = 10000;
  /// n in the randomized quadratic-form trials (matrix order n-k+1).
  int form_size = 50;
  int j_max = 200;
  std::optional<int> n_max;
  int count = 16;
  std::string doc_format = "fraction";

  std::uint64_t seed = kDefaultSeed;
  /// 0 uses one thread per core.
  int jobs = 1;
  std::string out;
  std::optional<OutputFormat> format;

  /// converge defaults to scalar, stability to pde.
  std::optional<RunMode> mode;
  std::string problem;
  double epsilon = 1.0;
  double beta = -1.0;
  double beta_star = 1.0;
  int num_interior = 1024;
  std::optional<double> final_time;
  std::string startup = "auto";
  std::string forcing = "grid_consistent";
  bool spatial_check = true;

  std::optional<std::string> tau;
  double tau_factor = 1.0;
  std::string theorem = "auto";
};

/// Reads a JSON config file into `base`. Throws UsageError on unknown
/// keys, wrong types or an unreadable file.
CampaignConfig load_config_file(const std::string& path, CampaignConfig base);
/// Applies the keys of a JSON object given as text.
CampaignConfig apply_config_text(const std::string& json_text, CampaignConfig base);
/// Compact JSON echo of the effective configuration.
std::string config_echo(const CampaignConfig& config);

std::string version_string();
/// Fixed 17-significant-digit rendering used in every text and CSV report.
std::string format_double(double value);
/// Parses "p/q" or a decimal into a positive step. Throws UsageError.
double parse_step(const std::string& text);

/// Observed orders for one k over a step ladder.
struct OrderReport {
  int k = 0;
  std::vector<double> taus;
  std::vector<double> errors;
  /// log2(e_i / e_{i+1}) for consecutive ladder entries.
  std::vector<double> orders;
  double mean_order = 0.0;
  double min_order = 0.0;
  /// |e(2M) - e(M)| / e(M) per cell; empty in scalar mode.
  std::vector<double> spatial_changes;
  bool spatial_ok = true;
  bool pass = false;
};

/// pass iff |mean - k| <= 0.2, every pairwise order >= k - 0.35 and every
/// spatial change < 5%. Needs at least two errors, all positive.
OrderReport make_order_report(int k, std::vector<double> taus, std::vector<double> errors,
                              std::vector<double> spatial_changes = {});

template <class Result>
struct CellOutcome {
  std::optional<Result> value;
  std::string error;
};

/// Runs fn over the keys on `jobs` threads (0: one per core). Keys are sorted
/// first and the outcomes come back in that order, so output never depends
/// on scheduling.
template <class Key, class Result>
std::vector<std::pair<Key, CellOutcome<Result>>> run_cells(std::vector<Key> keys,
                                                           const std::function<Result(const Key&)>& fn,
                                                           int jobs) {
  std::sort(keys.begin(), keys.end());
  std::vector<std::pair<Key, CellOutcome<Result>>> out;
  out.reserve(keys.size());
  for (auto& key : keys) out.push_back({key, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.size(); i = next++) {
      try {
        out[i].second.value = fn(out[i].first);
      } catch (const std::exception& e) {
        out[i].second.error = e.what();
      }
    }
  };
  const std::size_t wanted = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min(wanted, out.size());
  if (threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

/// Test hooks; the default is a no-op.
struct Hooks {
  /// Called with the generated b_j of order k before any check uses them.
  std::function<void(int k, std::vector<Rational>& b)> perturb_kernels;
};

int cmd_kernels(const CampaignConfig& config, std::ostream& out, std::ostream& err, const Hooks& hooks = {});
int cmd_doc(const CampaignConfig& config, std::ostream& out, std::ostream& err, const Hooks& hooks = {});
int cmd_spectral(const CampaignConfig& config, std::ostream& out, std::ostream& err);
int cmd_starting(const CampaignConfig& config, std::ostream& out, std::ostream& err);
int cmd_certify(const CampaignConfig& config, std::ostream& out, std::ostream& err, const Hooks& hooks = {});
int cmd_converge(const CampaignConfig& config, std::ostream& out, std::ostream& err);
int cmd_stability(const CampaignConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv, dispatches, and maps errors to exit codes (0 pass,
/// 1 certification or experiment failure, 2 usage error).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

}  // namespace bdfdoc::cli
