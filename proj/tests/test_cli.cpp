#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mwg/cli.hpp"
#include "mwg/io.hpp"

using namespace mwg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mwg");
  std::ostringstream out, err;
  int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kTinyConfig =
    "n_values=16,32\n"
    "replications=2\n"
    "J=3\n"
    "burnin=50\n"
    "sweeps=150\n"
    "schemes=GS20,MWG_PILOT,MWG_RM\n";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  auto none = run({});
  CHECK(none.code == cli::kExitUsage);
  CHECK(none.err.find("verify") != std::string::npos);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"verify", "--bogus"}).code == cli::kExitUsage);
  CHECK(run({"verify", "--c", "1,-2", "--out", "/tmp/mwg_never"}).code == cli::kExitUsage);
  CHECK(run({"plot"}).code == cli::kExitUsage);
  CHECK(run({"spectral", "no_such_potential", "--out", "/tmp/mwg_never"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("verify writes a passing report") {
  auto dir = fs::temp_directory_path() / "mwg_cli_verify";
  fs::remove_all(dir);
  auto r = run({"verify", "--c", "1,4", "--out", dir.string(), "--quiet"});
  CHECK(r.code == cli::kExitOk);
  auto rows = io::read_csv(dir / "verify_report.csv", "check,potential,c,value,bound,pass");
  CHECK(rows.size() > 50);
  for (const auto& f : rows) {
    INFO(f[0] << ' ' << f[1] << ' ' << f[2]);
    CHECK(f[5] == "true");
    CHECK((f[2].empty() || f[2] == "1" || f[2] == "4"));
  }
  fs::remove_all(dir);
}

TEST_CASE("sample, experiment, plot and spectral are repeatable") {
  auto dir = fs::temp_directory_path() / "mwg_cli_repeat";
  fs::remove_all(dir);
  io::write_text(dir / "cfg.txt", kTinyConfig);
  const auto cfg = (dir / "cfg.txt").string();

  auto files = [](const fs::path& d) {
    std::vector<std::pair<std::string, std::string>> v;
    for (const auto& e : fs::recursive_directory_iterator(d))
      if (e.is_regular_file()) v.emplace_back(fs::relative(e.path(), d).string(), io::read_text(e.path()));
    std::sort(v.begin(), v.end());
    return v;
  };

  for (const std::string cmd : {"sample", "experiment"}) {
    auto a = run({cmd, "--config", cfg, "--seed", "7", "--out", (dir / (cmd + "_a")).string()});
    auto b = run({cmd, "--config", cfg, "--seed", "7", "--out", (dir / (cmd + "_b")).string()});
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(files(dir / (cmd + "_a")) == files(dir / (cmd + "_b")));
  }
  CHECK(fs::exists(dir / "sample_a" / "trace.csv"));
  CHECK(fs::exists(dir / "sample_a" / "acceptance.csv"));
  CHECK(fs::exists(dir / "sample_a" / "dataset.csv"));
  for (const char* f : {"results.csv", "summary.csv", "iat_loglog.svg", "config.txt"})
    CHECK(fs::exists(dir / "experiment_a" / f));

  auto other = run({"experiment", "--config", cfg, "--seed", "8", "--out", (dir / "x8").string()});
  CHECK(other.code == 0);
  CHECK(io::read_text(dir / "x8" / "results.csv") !=
        io::read_text(dir / "experiment_a" / "results.csv"));

  auto results = (dir / "experiment_a" / "results.csv").string();
  CHECK(run({"plot", results, "--out", (dir / "p1").string()}).code == 0);
  CHECK(run({"plot", results, "--out", (dir / "p2").string()}).code == 0);
  CHECK(io::read_text(dir / "p1" / "iat_loglog.svg") == io::read_text(dir / "p2" / "iat_loglog.svg"));
  CHECK(io::read_text(dir / "p1" / "iat_loglog.svg") ==
        io::read_text(dir / "experiment_a" / "iat_loglog.svg"));

  for (const char* d : {"s1", "s2"})
    CHECK(run({"spectral", "quartic", "--grid", "101", "--out", (dir / d).string(), "--quiet"}).code == 0);
  CHECK(io::read_text(dir / "s1" / "spectral_quartic.csv") ==
        io::read_text(dir / "s2" / "spectral_quartic.csv"));

  CHECK(run({"experiment", "--config", (dir / "missing.txt").string(), "--out", dir.string()}).code ==
        cli::kExitCheckFailed);
  fs::remove_all(dir);
}
