#include "mwg/verify.hpp"

#include <cmath>
#include <sstream>

#include "mwg/io.hpp"
#include "mwg/model.hpp"
#include "mwg/potential.hpp"
#include "mwg/quadrature.hpp"
#include "mwg/spectral.hpp"

namespace mwg::verify {

std::vector<CheckRow> run_theory_suite(const SuiteOptions& opts) {
  namespace sp = spectral;
  std::vector<CheckRow> rows;
  auto add = [&](std::string check, std::string pot, std::string c, double value, double bound,
                 bool pass) {
    rows.push_back({std::move(check), std::move(pot), std::move(c), value, bound, pass});
  };

  for (const auto& pot : potentials::builtin_family()) {
    auto u1 = sp::u1_check(pot);
    add("u_at_one_sd", pot.name, "", u1.value, 2.6, u1.value <= 2.6);

    const double var = var_1d(pot);
    const auto grid = sp::default_grid(pot, opts.grid);
    const auto small = sp::default_grid(pot, opts.cheeger_grid);
    for (double c : opts.cs) {
      const std::string cs = io::format_double(c);
      const double sigma = std::sqrt(c * var);

      double amin = sp::min_acceptance(pot, c, grid);
      add("min_acceptance", pot.name, cs, amin, sp::b_of_c(c), amin >= sp::b_of_c(c));

      auto kernel = sp::discretize_rwm(pot, sigma, grid);
      double phi = sp::threshold_conductance(kernel);
      add("threshold_conductance", pot.name, cs, phi, sp::k_of_c(c), phi > sp::k_of_c(c));

      auto toy = sp::discretize_rwm(pot, sigma, small);
      auto cond = sp::conductance(toy, opts.cheeger_grid);
      double gap = sp::spectral_gap(toy);
      add("cheeger_lower", pot.name, cs, gap, 0.5 * cond.value * cond.value,
          gap >= 0.5 * cond.value * cond.value);
      add("cheeger_upper", pot.name, cs, gap, 2.0 * cond.value, gap <= 2.0 * cond.value);
    }
  }

  Eigen::Matrix2d identity = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d correlated;
  correlated << 1.0, 0.5, 0.5, 1.0;
  for (const auto& [name, a] : {std::pair{"gaussian2d_identity", identity},
                                std::pair{"gaussian2d_offdiag0.5", correlated}}) {
    const double kappa = kappa_star_gaussian(a);
    const double expected = 1.0 / (kappa * 2.0);
    auto gs = sp::build_coordinate_kernel_2d(a, opts.grid_2d, sp::ConditionalUpdate::Exact);
    const double gap_gs = gs.spectral_gap();
    add("gs_gap_gaussian", name, "", gap_gs, expected,
        std::abs(gap_gs - expected) <= opts.gaussian_gap_rel_tol * expected);
    for (double c : opts.cs) {
      const std::string cs = io::format_double(c);
      auto mwg = sp::build_coordinate_kernel_2d(a, opts.grid_2d, sp::ConditionalUpdate::Rwm, c);
      const double gap_mwg = mwg.spectral_gap();
      double inf_gap = 1.0;
      for (int axis = 0; axis < 2; ++axis) {
        for (const auto& k : mwg.slices(axis)) inf_gap = std::min(inf_gap, sp::spectral_gap(k));
      }
      const double lower = inf_gap * gap_gs - opts.decomposition_tol;
      const double upper = gap_gs + opts.decomposition_tol;
      add("decomposition_lower", name, cs, gap_mwg, lower, gap_mwg >= lower);
      add("decomposition_upper", name, cs, gap_mwg, upper, gap_mwg <= upper);
    }
  }
  return rows;
}

std::string format_report(const std::vector<CheckRow>& rows) {
  std::ostringstream out;
  out << "check,potential,c,value,bound,pass\n";
  for (const auto& r : rows) {
    out << r.check << ',' << r.potential << ',' << r.c << ',' << io::format_double(r.value) << ','
        << io::format_double(r.bound) << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace mwg::verify
