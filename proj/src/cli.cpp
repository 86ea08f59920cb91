#include "mwg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mwg/diagnostics.hpp"
#include "mwg/experiment.hpp"
#include "mwg/io.hpp"
#include "mwg/model.hpp"
#include "mwg/quadrature.hpp"
#include "mwg/spectral.hpp"
#include "mwg/verify.hpp"

namespace mwg::cli {
namespace {

namespace fs = std::filesystem;
namespace ex = experiment;

std::vector<double> parse_c_list(const std::string& s) {
  std::vector<double> cs;
  for (const auto& part : io::split(s, ',')) {
    double c = io::parse_double(part);
    if (!(c > 0)) throw std::invalid_argument("--c values must be positive");
    cs.push_back(c);
  }
  return cs;
}

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::string c_list = "0.25,1,4";
  std::size_t grid = 401;
  bool quiet = false;
};

ex::ExperimentConfig load_config(const Common& o) {
  auto cfg = o.config.empty() ? ex::ExperimentConfig::desk_scale() : ex::read_config(o.config);
  if (o.seed) cfg.base_seed = *o.seed;
  return cfg;
}

int run_verify(const Common& o, std::ostream& out) {
  verify::SuiteOptions opts;
  opts.cs = parse_c_list(o.c_list);
  opts.grid = o.grid;
  auto rows = verify::run_theory_suite(opts);
  io::write_text(fs::path(o.out) / "verify_report.csv", verify::format_report(rows));
  auto failed = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.pass; });
  if (!o.quiet) {
    for (const auto& r : rows) {
      if (!r.pass) {
        out << "FAIL " << r.check << ' ' << r.potential << " c=" << r.c << " value=" << r.value
            << " bound=" << r.bound << '\n';
      }
    }
    out << rows.size() - failed << '/' << rows.size() << " checks passed\n";
  }
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

int run_sample(const Common& o, std::ostream& out) {
  auto cfg = load_config(o);
  const int n = cfg.n_values.front();
  const auto scheme = cfg.schemes.front();
  const auto seed = ex::replication_seed(cfg.base_seed, n, 0);
  auto y = sample_dataset(cfg.J, n, cfg.mu_star, seed);
  auto trace = ex::run_scheme_trace(scheme, n, y, cfg, seed);
  fs::path dir(o.out);
  write_dataset_csv(dir / "dataset.csv", n, y);
  write_trace_csv(dir / "trace.csv", trace);
  write_acceptance_csv(dir / "acceptance.csv", trace);
  if (!o.quiet) {
    auto rep = max_iat(trace);
    out << ex::scheme_name(scheme) << " n=" << n << " J=" << cfg.J << ": max IAT " << rep.max_iat
        << " (coordinate " << rep.argmax << ")\n";
  }
  return kExitOk;
}

int run_experiment_cmd(const Common& o, bool timing, std::ostream& out, std::ostream& err) {
  auto cfg = load_config(o);
  fs::path dir(o.out);
  ex::RunEnvironment env;
  env.artifact_dir = dir;
  env.record_timing = timing;
  env.log = [&err](const std::string& msg) { err << msg << '\n'; };
  auto rows = ex::run_experiment(cfg, env);
  io::write_text(dir / "config.txt", ex::format_config(cfg));
  ex::write_results_csv(dir / "results.csv", rows);
  ex::write_summary_csv(dir / "summary.csv", ex::summarize(rows));
  if (!rows.empty()) ex::emit_plot(rows, dir / "iat_loglog.svg");
  if (!o.quiet) {
    for (const auto& s : ex::summarize(rows)) {
      out << s.scheme << " n=" << s.n << " median max IAT " << s.median_max_iat << '\n';
    }
    if (cfg.n_values.size() >= 2) {
      for (auto scheme : cfg.schemes) {
        auto name = ex::scheme_name(scheme);
        out << name << " log-log slope " << ex::fit_loglog_slope(rows, name) << '\n';
      }
    }
  }
  return kExitOk;
}

int run_plot(const Common& o, const std::string& input, std::ostream& out) {
  auto rows = ex::read_results_csv(input);
  fs::path target = fs::path(o.out) / "iat_loglog.svg";
  ex::emit_plot(rows, target);
  if (!o.quiet) out << "wrote " << target.string() << '\n';
  return kExitOk;
}

int run_spectral(const Common& o, const std::string& name, std::ostream& out) {
  namespace sp = spectral;
  auto pot = potentials::by_name(name);
  const double var = var_1d(pot);
  const auto grid = sp::default_grid(pot, o.grid);
  std::ostringstream csv;
  csv << "potential,c,sigma,variance,spectral_gap,conductance,conductance_exact,gap_bound,"
         "k_bound,min_acceptance,b_bound\n";
  for (double c : parse_c_list(o.c_list)) {
    const double sigma = std::sqrt(c * var);
    auto k = sp::discretize_rwm(pot, sigma, grid);
    auto cond = sp::conductance(k);
    csv << name << ',' << io::format_double(c) << ',' << io::format_double(sigma) << ','
        << io::format_double(var) << ',' << io::format_double(sp::spectral_gap(k)) << ','
        << io::format_double(cond.value) << ',' << (cond.exact ? "true" : "false") << ','
        << io::format_double(sp::gap_bound(c)) << ',' << io::format_double(sp::k_of_c(c)) << ','
        << io::format_double(sp::min_acceptance(pot, c, grid)) << ','
        << io::format_double(sp::b_of_c(c)) << '\n';
  }
  fs::path target = fs::path(o.out) / ("spectral_" + name + ".csv");
  io::write_text(target, csv.str());
  if (!o.quiet) out << csv.str();
  return kExitOk;
}

void add_common(CLI::App* sub, Common& o, bool config, bool cs, bool grid) {
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  sub->add_option("--seed", o.seed, "Override the base seed");
  if (config) sub->add_option("--config", o.config, "key=value configuration file");
  if (cs) sub->add_option("--c", o.c_list, "Comma-separated proposal scale factors c")->capture_default_str();
  if (grid) {
    sub->add_option("--grid", o.grid, "Grid points for one-dimensional kernels")
        ->check(CLI::Range(std::size_t{3}, std::size_t{20001}))
        ->capture_default_str();
  }
  sub->add_flag("--quiet", o.quiet, "Suppress console output");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-scan Gibbs / Metropolis-within-Gibbs sampler and spectral checks", "mwg"};
  app.require_subcommand(1);
  Common o;
  bool timing = false;
  std::string input, potential;

  auto* verify = app.add_subcommand("verify", "Numerical checks of the RWM conductance and gap bounds");
  add_common(verify, o, false, true, true);
  auto* sample = app.add_subcommand("sample", "Run one chain and export its trace");
  add_common(sample, o, true, false, false);
  auto* exper = app.add_subcommand("experiment", "Hierarchical logistic IAT study");
  add_common(exper, o, true, false, false);
  exper->add_flag("--timing", timing, "Record wall-clock milliseconds in results.csv");
  auto* plot = app.add_subcommand("plot", "Render results.csv as an SVG log-log plot");
  add_common(plot, o, false, false, false);
  plot->add_option("results", input, "results.csv")->required();
  auto* spectral_cmd = app.add_subcommand("spectral", "Gap and conductance of a discretized RWM kernel");
  add_common(spectral_cmd, o, false, true, true);
  spectral_cmd->add_option("potential", potential, "Built-in potential name")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*verify) return run_verify(o, out);
    if (*sample) return run_sample(o, out);
    if (*exper) return run_experiment_cmd(o, timing, out, err);
    if (*plot) return run_plot(o, input, out);
    if (*spectral_cmd) return run_spectral(o, potential, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace mwg::cli
