#include "mwg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "mwg/adapt.hpp"
#include "mwg/diagnostics.hpp"
#include "mwg/io.hpp"
#include "mwg/kernel.hpp"
#include "mwg/model.hpp"
#include "mwg/rng.hpp"

namespace mwg::experiment {
namespace {

constexpr int kPilotIters = 2000;
constexpr double kFixedControlSigma = 5.0;

const std::vector<std::pair<Scheme, std::string>>& scheme_table() {
  static const std::vector<std::pair<Scheme, std::string>> table{
      {Scheme::GS20, "GS20"},           {Scheme::GS100, "GS100"},
      {Scheme::MWG_PILOT, "MWG_PILOT"}, {Scheme::MWG_RM, "MWG_RM"},
      {Scheme::MWG_SMOOTH, "MWG_SMOOTH"}, {Scheme::MWG_FIXED, "MWG_FIXED"}};
  return table;
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& part : io::split(v, ',')) out.push_back(static_cast<int>(io::parse_int(part)));
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string scheme_name(Scheme s) {
  for (const auto& [k, name] : scheme_table()) {
    if (k == s) return name;
  }
  throw std::invalid_argument("unknown scheme");
}

Scheme parse_scheme(const std::string& name) {
  for (const auto& [k, n] : scheme_table()) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

ExperimentConfig ExperimentConfig::desk_scale() {
  ExperimentConfig cfg;
  cfg.replications = 20;
  return cfg;
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw std::invalid_argument("config: n_values is empty");
  for (int n : n_values) {
    if (n < 1) throw std::invalid_argument("config: n_values must be positive");
  }
  if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
  if (J < 1) throw std::invalid_argument("config: J must be >= 1");
  if (burnin < 0) throw std::invalid_argument("config: burnin must be >= 0");
  if (sweeps < 100) throw std::invalid_argument("config: sweeps must be >= 100");
  if (!std::isfinite(mu_star)) throw std::invalid_argument("config: mu_star must be finite");
  if (schemes.empty()) throw std::invalid_argument("config: schemes is empty");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = io::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = io::trim(line.substr(0, eq));
    std::string value = io::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw std::invalid_argument("config: duplicate key '" + key + "'");
    if (key == "n_values") {
      cfg.n_values = parse_int_list(value);
    } else if (key == "replications") {
      cfg.replications = static_cast<int>(io::parse_int(value));
    } else if (key == "J") {
      cfg.J = static_cast<int>(io::parse_int(value));
    } else if (key == "burnin") {
      cfg.burnin = static_cast<int>(io::parse_int(value));
    } else if (key == "sweeps") {
      cfg.sweeps = static_cast<int>(io::parse_int(value));
    } else if (key == "mu_star") {
      cfg.mu_star = io::parse_double(value);
    } else if (key == "schemes") {
      cfg.schemes.clear();
      for (const auto& s : io::split(value, ',')) cfg.schemes.push_back(parse_scheme(io::trim(s)));
    } else if (key == "base_seed") {
      long long v = io::parse_int(value);
      if (v < 0) throw std::invalid_argument("config: base_seed must be non-negative");
      cfg.base_seed = static_cast<std::uint64_t>(v);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig read_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path));
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "n_values=";
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) out << (i ? "," : "") << cfg.n_values[i];
  out << "\nreplications=" << cfg.replications << "\nJ=" << cfg.J << "\nburnin=" << cfg.burnin
      << "\nsweeps=" << cfg.sweeps << "\nmu_star=" << io::format_double(cfg.mu_star)
      << "\nschemes=";
  for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
    out << (i ? "," : "") << scheme_name(cfg.schemes[i]);
  }
  out << "\nbase_seed=" << cfg.base_seed << '\n';
  return out.str();
}

std::uint64_t replication_seed(std::uint64_t base_seed, int n, int rep) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

std::uint64_t chain_seed(std::uint64_t rep_seed, Scheme scheme) {
  return derive_seed({rep_seed, 0x5c4e3eULL, static_cast<std::uint64_t>(scheme)});
}

ChainTrace run_scheme_trace(Scheme scheme, int n, const std::vector<int>& y,
                            const ExperimentConfig& cfg, std::uint64_t rep_seed,
                            const RunEnvironment& env) {
  HierLogisticPosterior model(n, y);
  RunOptions opts;
  opts.burnin = cfg.burnin;
  opts.iters = cfg.sweeps;
  opts.seed = chain_seed(rep_seed, scheme);

  auto smooth = ProposalPolicy::smoothness_scaled(model);
  std::optional<ProposalPolicy> policy;
  switch (scheme) {
    case Scheme::GS20:
      opts.inner_steps = 20;
      policy = smooth;
      break;
    case Scheme::GS100:
      opts.inner_steps = 100;
      policy = smooth;
      break;
    case Scheme::MWG_SMOOTH:
      policy = smooth;
      break;
    case Scheme::MWG_RM: {
      std::vector<double> init(model.dim());
      for (std::size_t m = 0; m < init.size(); ++m) init[m] = smooth.variance(m);
      policy = ProposalPolicy::robbins_monro(std::move(init));
      break;
    }
    case Scheme::MWG_FIXED:
      policy = ProposalPolicy::fixed(std::vector<double>(model.dim(), kFixedControlSigma));
      break;
    case Scheme::MWG_PILOT: {
      std::vector<double> variances;
      std::optional<std::filesystem::path> cache;
      if (env.artifact_dir) {
        cache = *env.artifact_dir / "pilots" /
                ("n" + std::to_string(n) + "_seed" + std::to_string(rep_seed) + ".csv");
        if (std::filesystem::exists(*cache)) variances = read_pilot_csv(*cache);
      }
      if (variances.size() != model.dim()) {
        auto est = pilot_variance(model, kPilotIters, derive_seed({opts.seed, 1}));
        if (cache) write_pilot_csv(*cache, est);
        variances = std::move(est.variances);
      }
      policy = ProposalPolicy::pilot(std::move(variances), 1.0);
      break;
    }
  }
  return run_chain(model, std::move(*policy), opts);
}

double run_scheme(Scheme scheme, int n, const std::vector<int>& y, const ExperimentConfig& cfg,
                  std::uint64_t rep_seed, const RunEnvironment& env) {
  return max_iat(run_scheme_trace(scheme, n, y, cfg, rep_seed, env)).max_iat;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, const RunEnvironment& env) {
  cfg.validate();
  struct Dataset {
    int n;
    int rep;
    std::uint64_t seed;
    std::vector<int> y;
  };
  std::vector<Dataset> datasets;
  for (int n : cfg.n_values) {
    for (int rep = 0; rep < cfg.replications; ++rep) {
      auto seed = replication_seed(cfg.base_seed, n, rep);
      datasets.push_back({n, rep, seed, sample_dataset(cfg.J, n, cfg.mu_star, seed)});
      if (env.artifact_dir) {
        write_dataset_csv(*env.artifact_dir / "datasets" /
                              ("n" + std::to_string(n) + "_rep" + std::to_string(rep) + ".csv"),
                          n, datasets.back().y);
      }
    }
  }

  struct Job {
    std::size_t dataset;
    Scheme scheme;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (Scheme s : cfg.schemes) jobs.push_back({d, s});
  }

  std::vector<std::optional<ResultRow>> slots(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto& job = jobs[j];
      const auto& ds = datasets[job.dataset];
      auto start = std::chrono::steady_clock::now();
      try {
        double v = run_scheme(job.scheme, ds.n, ds.y, cfg, ds.seed, env);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        slots[j] = ResultRow{scheme_name(job.scheme), ds.n, ds.rep, v,
                             env.record_timing ? static_cast<long long>(ms) : 0LL, ds.seed};
      } catch (const std::exception& e) {
        std::lock_guard lock(log_mutex);
        if (env.log) {
          env.log("row " + scheme_name(job.scheme) + " n=" + std::to_string(ds.n) +
                  " rep=" + std::to_string(ds.rep) + " failed: " + e.what());
        }
      }
    }
  };
  unsigned threads = env.threads ? env.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ResultRow> rows;
  for (auto& s : slots) {
    if (s) rows.push_back(std::move(*s));
  }
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scheme, a.n, a.replication) < std::tie(b.scheme, b.n, b.replication);
  });
  return rows;
}

std::string format_results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "scheme,n,replication,max_iat,wall_ms,seed\n";
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.n << ',' << r.replication << ',' << io::format_double(r.max_iat)
        << ',' << r.wall_ms << ',' << r.seed << '\n';
  }
  return out.str();
}

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  io::write_text(path, format_results_csv(rows));
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  std::vector<ResultRow> rows;
  for (const auto& f : io::read_csv(path, "scheme,n,replication,max_iat,wall_ms,seed")) {
    if (f.size() != 6) throw std::runtime_error(path.string() + ": expected 6 columns");
    ResultRow r;
    r.scheme = f[0];
    r.n = static_cast<int>(io::parse_int(f[1]));
    r.replication = static_cast<int>(io::parse_int(f[2]));
    r.max_iat = io::parse_double(f[3]);
    r.wall_ms = io::parse_int(f[4]);
    r.seed = std::stoull(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::map<std::string, std::map<int, std::vector<double>>> group_rows(
    const std::vector<ResultRow>& rows) {
  std::map<std::string, std::map<int, std::vector<double>>> g;
  for (const auto& r : rows) g[r.scheme][r.n].push_back(r.max_iat);
  return g;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  for (const auto& [scheme, by_n] : group_rows(rows)) {
    for (const auto& [n, v] : by_n) {
      out.push_back({scheme, n, median_over_reps(v), quantile(v, 0.25), quantile(v, 0.75), v.size()});
    }
  }
  return out;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "scheme,n,median_max_iat,q25,q75,count\n";
  for (const auto& r : rows) {
    out << r.scheme << ',' << r.n << ',' << io::format_double(r.median_max_iat) << ','
        << io::format_double(r.q25) << ',' << io::format_double(r.q75) << ',' << r.count << '\n';
  }
  io::write_text(path, out.str());
}

double median_for(const std::vector<ResultRow>& rows, const std::string& scheme, int n) {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.scheme == scheme && r.n == n) v.push_back(r.max_iat);
  }
  if (v.empty()) throw std::invalid_argument("no rows for " + scheme + " at n=" + std::to_string(n));
  return median_over_reps(std::move(v));
}

double fit_loglog_slope(const std::vector<ResultRow>& rows, const std::string& scheme) {
  auto g = group_rows(rows);
  auto it = g.find(scheme);
  if (it == g.end() || it->second.size() < 2) {
    throw std::domain_error("fit_loglog_slope: need at least two distinct n values for " + scheme);
  }
  std::vector<double> xs, ys;
  for (const auto& [n, v] : it->second) {
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(median_over_reps(v)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0)) throw std::domain_error("fit_loglog_slope: degenerate n range");
  return sxy / sxx;
}

std::string render_plot(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("render_plot: no rows");
  auto g = group_rows(rows);
  double nmin = 1e300, nmax = -1e300, ymin = 1e300, ymax = -1e300;
  std::map<std::string, std::vector<std::pair<int, double>>> series;
  std::set<int> ns;
  for (const auto& [scheme, by_n] : g) {
    for (const auto& [n, v] : by_n) {
      double med = median_over_reps(v);
      series[scheme].emplace_back(n, med);
      ns.insert(n);
      nmin = std::min(nmin, static_cast<double>(n));
      nmax = std::max(nmax, static_cast<double>(n));
      ymin = std::min(ymin, med);
      ymax = std::max(ymax, med);
    }
  }
  const double W = 720, H = 480, left = 80, right = 170, top = 40, bottom = 60;
  double lx0 = std::log10(nmin), lx1 = std::log10(nmax);
  if (lx1 - lx0 < 1e-9) { lx0 -= 0.1; lx1 += 0.1; }
  double ly0 = std::floor(std::log10(ymin) * 4.0) / 4.0;
  double ly1 = std::ceil(std::log10(ymax) * 4.0) / 4.0;
  if (ly1 - ly0 < 0.25) ly1 = ly0 + 0.25;
  auto px = [&](double n) { return left + (std::log10(n) - lx0) / (lx1 - lx0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (std::log10(y) - ly0) / (ly1 - ly0) * (H - top - bottom); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<text x=\"" << fixed((W - right + left) / 2, 1) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"14\">Median integrated autocorrelation time (log-log)</text>\n";
  // Axes
  svg << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\""
      << H - bottom << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n";
  for (int n : ns) {
    svg << "<line x1=\"" << fixed(px(n), 2) << "\" y1=\"" << H - bottom << "\" x2=\"" << fixed(px(n), 2)
        << "\" y2=\"" << H - bottom + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(px(n), 2) << "\" y=\"" << H - bottom + 18
        << "\" text-anchor=\"middle\">" << n << "</text>\n";
  }
  for (double ly = ly0; ly <= ly1 + 1e-9; ly += 0.25) {
    double y = std::pow(10.0, ly);
    svg << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(py(y), 2) << "\" x2=\"" << left
        << "\" y2=\"" << fixed(py(y), 2) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << fixed(py(y) + 4, 2) << "\" text-anchor=\"end\">"
        << fixed(y, y < 10 ? 2 : 1) << "</text>\n";
  }
  svg << "<text x=\"" << fixed((W - right + left) / 2, 1) << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">observations per group n (log scale)</text>\n"
      << "<text x=\"20\" y=\"" << fixed((H - bottom + top) / 2, 1)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << fixed((H - bottom + top) / 2, 1)
      << ")\">median of max IAT over replications (log scale)</text>\n";

  std::size_t idx = 0;
  for (const auto& [scheme, pts] : series) {
    const char* color = palette[idx % 6];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      svg << (i ? " " : "") << fixed(px(pts[i].first), 2) << ',' << fixed(py(pts[i].second), 2);
    }
    svg << "\"/>\n";
    for (const auto& [n, med] : pts) {
      svg << "<circle cx=\"" << fixed(px(n), 2) << "\" cy=\"" << fixed(py(med), 2)
          << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
    }
    double ly = top + 20 + 20.0 * static_cast<double>(idx);
    svg << "<line x1=\"" << W - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << W - right + 46 << "\" y=\"" << ly + 4 << "\">" << scheme << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  io::write_text(path, render_plot(rows));
}

}  // namespace mwg::experiment
