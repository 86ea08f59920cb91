#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mwg/kernel.hpp"

namespace mwg::experiment {

/// Sampling schemes for the hierarchical logistic study. GS20/GS100 approximate
/// exact Gibbs with 20/100 inner RWM steps; MWG_* take one RWM step per
/// theta update. MWG_FIXED (sigma = 5 for every theta) is a mis-tuned control.
enum class Scheme { GS20, GS100, MWG_PILOT, MWG_RM, MWG_SMOOTH, MWG_FIXED };

std::string scheme_name(Scheme s);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(const std::string& name);

struct ExperimentConfig {
  std::vector<int> n_values{32, 64, 128, 256, 512};
  int replications = 100;
  int J = 20;
  int burnin = 1000;
  int sweeps = 4000;
  double mu_star = 1.0;
  std::vector<Scheme> schemes{Scheme::GS20, Scheme::MWG_PILOT, Scheme::MWG_RM,
                              Scheme::MWG_SMOOTH};
  std::uint64_t base_seed = 0;

  /// Defaults with 20 replications.
  static ExperimentConfig desk_scale();
  void validate() const;
};

/// Flat `key=value` text; keys are the field names above, lists are
/// comma-separated, `#` starts a comment. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig read_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& cfg);

/// Seed of replication `rep` at sample size `n`; keys the dataset shared by all schemes.
std::uint64_t replication_seed(std::uint64_t base_seed, int n, int rep);
/// Seed of the chain for `scheme` on that dataset.
std::uint64_t chain_seed(std::uint64_t rep_seed, Scheme scheme);

struct ResultRow {
  std::string scheme;
  int n = 0;
  int replication = 0;
  double max_iat = 0.0;
  long long wall_ms = 0;
  std::uint64_t seed = 0;
};

struct RunEnvironment {
  /// Where datasets/ and pilots/ are written; pilots found there are reused.
  std::optional<std::filesystem::path> artifact_dir;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool record_timing = false;  // wall_ms stays 0 unless set
  std::function<void(const std::string&)> log;
};

/// Runs one scheme on one dataset (y counts at sample size n) and returns its trace.
ChainTrace run_scheme_trace(Scheme scheme, int n, const std::vector<int>& y,
                            const ExperimentConfig& cfg, std::uint64_t rep_seed,
                            const RunEnvironment& env = {});

/// Max IAT of one scheme on one dataset.
double run_scheme(Scheme scheme, int n, const std::vector<int>& y, const ExperimentConfig& cfg,
                  std::uint64_t rep_seed, const RunEnvironment& env = {});

/// Every (scheme, n, replication) combination; rows sorted by
/// (scheme, n, replication). A diverging chain drops its row and is logged.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunEnvironment& env = {});

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);
std::string format_results_csv(const std::vector<ResultRow>& rows);

struct SummaryRow {
  std::string scheme;
  int n = 0;
  double median_max_iat = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  std::size_t count = 0;
};
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

/// Median max-IAT of `scheme` at `n`; throws if there are no rows.
double median_for(const std::vector<ResultRow>& rows, const std::string& scheme, int n);

/// Least-squares slope of log(median max-IAT) against log(n).
double fit_loglog_slope(const std::vector<ResultRow>& rows, const std::string& scheme);

/// SVG log-log plot of median max-IAT against n, one polyline per scheme.
std::string render_plot(const std::vector<ResultRow>& rows);
void emit_plot(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

}  // namespace mwg::experiment
