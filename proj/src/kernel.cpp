#include "mwg/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mwg/adapt.hpp"
#include "mwg/errors.hpp"
#include "mwg/io.hpp"

namespace mwg {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp_variance(double v) {
  return std::clamp(v, kMinProposalVariance, kMaxProposalVariance);
}

void require_positive(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw std::domain_error(std::string(what) + ": empty");
  for (double x : v) {
    if (!(x > 0) || !std::isfinite(x)) {
      throw std::domain_error(std::string(what) + ": entries must be positive and finite");
    }
  }
}

}  // namespace

ProposalPolicy::ProposalPolicy(Rule rule) : rule_(std::move(rule)) {
  std::visit(Overloaded{
                 [](const FixedSigma& r) { require_positive(r.sigma, "FixedSigma"); },
                 [](const PilotVariance& r) {
                   if (!(r.c > 0)) throw std::domain_error("PilotVariance: c must be positive");
                   require_positive(r.variances, "PilotVariance");
                 },
                 [](RobbinsMonro& r) {
                   if (r.log_variance.empty()) throw std::domain_error("RobbinsMonro: empty");
                   for (double& lv : r.log_variance) {
                     if (!std::isfinite(lv)) throw std::domain_error("RobbinsMonro: bad state");
                     lv = std::clamp(lv, std::log(kMinProposalVariance),
                                     std::log(kMaxProposalVariance));
                   }
                   r.updates.resize(r.log_variance.size(), 0);
                   if (!(r.step_exponent > 0.5 && r.step_exponent <= 1.0)) {
                     throw std::domain_error("RobbinsMonro: step exponent must lie in (1/2, 1]");
                   }
                 },
                 [](const SmoothnessScaled& r) {
                   if (!(r.numerator > 0)) {
                     throw std::domain_error("SmoothnessScaled: numerator must be positive");
                   }
                   require_positive(r.smoothness, "SmoothnessScaled");
                 }},
             rule_);
}

ProposalPolicy ProposalPolicy::fixed(std::vector<double> sigma) {
  return ProposalPolicy(FixedSigma{std::move(sigma)});
}

ProposalPolicy ProposalPolicy::pilot(std::vector<double> variances, double c) {
  return ProposalPolicy(PilotVariance{c, std::move(variances)});
}

ProposalPolicy ProposalPolicy::robbins_monro(std::vector<double> initial_variances,
                                             double target_rate, double step_exponent) {
  require_positive(initial_variances, "RobbinsMonro");
  RobbinsMonro r;
  for (double v : initial_variances) r.log_variance.push_back(std::log(v));
  r.target_rate = target_rate;
  r.step_exponent = step_exponent;
  return ProposalPolicy(std::move(r));
}

ProposalPolicy ProposalPolicy::smoothness_scaled(std::vector<double> smoothness,
                                                 double numerator) {
  return ProposalPolicy(SmoothnessScaled{numerator, std::move(smoothness)});
}

ProposalPolicy ProposalPolicy::smoothness_scaled(const TargetModel& model, double numerator) {
  std::vector<double> l(model.dim());
  for (std::size_t m = 0; m < l.size(); ++m) l[m] = model.coordinate_smoothness(m);
  return smoothness_scaled(std::move(l), numerator);
}

std::size_t ProposalPolicy::dim() const {
  return std::visit(Overloaded{[](const FixedSigma& r) { return r.sigma.size(); },
                               [](const PilotVariance& r) { return r.variances.size(); },
                               [](const RobbinsMonro& r) { return r.log_variance.size(); },
                               [](const SmoothnessScaled& r) { return r.smoothness.size(); }},
                    rule_);
}

double ProposalPolicy::variance(std::size_t m) const {
  double v = std::visit(
      Overloaded{[m](const FixedSigma& r) { return r.sigma.at(m) * r.sigma.at(m); },
                 [m](const PilotVariance& r) { return r.c * r.variances.at(m); },
                 [m](const RobbinsMonro& r) { return std::exp(r.log_variance.at(m)); },
                 [m](const SmoothnessScaled& r) { return r.numerator / r.smoothness.at(m); }},
      rule_);
  return clamp_variance(v);
}

double ProposalPolicy::sigma(std::size_t m) const { return std::sqrt(variance(m)); }

void ProposalPolicy::record(std::size_t m, bool accepted) {
  if (auto* rm = std::get_if<RobbinsMonro>(&rule_); rm && !rm->frozen) {
    auto t = ++rm->updates.at(m);
    rm->log_variance[m] = rm_update(rm->log_variance[m], accepted, static_cast<long long>(t),
                                    rm->target_rate, rm->step_exponent);
  }
}

void ProposalPolicy::freeze() {
  if (auto* rm = std::get_if<RobbinsMonro>(&rule_)) rm->frozen = true;
}

bool ProposalPolicy::adapting() const {
  const auto* rm = std::get_if<RobbinsMonro>(&rule_);
  return rm && !rm->frozen;
}

ChainState::ChainState(std::vector<double> x0, std::uint64_t seed)
    : x(std::move(x0)), rng(seed), accepts(x.size(), 0), proposals(x.size(), 0) {}

bool mh_accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio)) throw NumericError("mh_accept: NaN log acceptance ratio");
  if (log_ratio >= 0.0) return true;
  if (log_ratio == -std::numeric_limits<double>::infinity()) return false;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::log(unif(rng)) < log_ratio;
}

RwmResult rwm_transition(double x, double y, const Potential1D& pot, Rng& rng) {
  if (mh_accept(pot.u(x) - pot.u(y), rng)) return {y, true};
  return {x, false};
}

RwmResult rwm_step(double x, const Potential1D& pot, double sigma, Rng& rng) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw std::domain_error("rwm_step: sigma must be positive and finite");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  double y = x + sigma * normal(rng);
  return rwm_transition(x, y, pot, rng);
}

void update_coordinate(ChainState& state, const TargetModel& model, ProposalPolicy& policy,
                       std::size_t m, int inner_steps) {
  if (inner_steps < 1) throw std::domain_error("update_coordinate: inner_steps must be >= 1");
  if (auto exact = model.exact_cond(m, state.x)) {
    std::normal_distribution<double> normal(0.0, 1.0);
    state.x[m] = exact->mean + std::sqrt(exact->variance) * normal(state.rng);
    return;
  }
  approx_gibbs_update(state, model, m, policy, inner_steps);
}

std::size_t random_scan_step(ChainState& state, const TargetModel& model,
                             ProposalPolicy& policy, int inner_steps) {
  std::uniform_int_distribution<std::size_t> pick(0, model.dim() - 1);
  std::size_t m = pick(state.rng);
  update_coordinate(state, model, policy, m, inner_steps);
  ++state.step_count;
  return m;
}

void approx_gibbs_update(ChainState& state, const TargetModel& model, std::size_t m,
                         ProposalPolicy& policy, int inner_steps) {
  if (inner_steps < 1) throw std::domain_error("approx_gibbs_update: inner_steps must be >= 1");
  const Potential1D pot = model.cond_potential(m, state.x);
  for (int s = 0; s < inner_steps; ++s) {
    auto r = rwm_step(state.x[m], pot, policy.sigma(m), state.rng);
    state.x[m] = r.x;
    ++state.proposals[m];
    if (r.accepted) ++state.accepts[m];
    policy.record(m, r.accepted);
  }
}

double ChainTrace::acceptance_rate(std::size_t m) const {
  return proposal_counts.at(m) == 0
             ? 0.0
             : static_cast<double>(accept_counts[m]) / static_cast<double>(proposal_counts[m]);
}

ChainTrace run_chain(const TargetModel& model, ProposalPolicy policy, const RunOptions& opts) {
  const std::size_t d = model.dim();
  if (opts.burnin < 0) throw std::domain_error("run_chain: burnin must be >= 0");
  if (opts.iters < 1) throw std::domain_error("run_chain: iters must be >= 1");
  if (policy.dim() != d) throw std::domain_error("run_chain: policy dimension mismatch");
  std::vector<double> x0 = opts.initial.value_or(model.initial_state());
  if (x0.size() != d) throw std::domain_error("run_chain: initial state dimension mismatch");

  ChainState state(std::move(x0), opts.seed);
  ChainTrace trace;
  trace.samples.resize(opts.iters, static_cast<Eigen::Index>(d));

  const long total = static_cast<long>(opts.burnin) + opts.iters;
  for (long sweep = 0; sweep < total; ++sweep) {
    if (sweep == opts.burnin) {
      policy.freeze();
      std::fill(state.accepts.begin(), state.accepts.end(), 0);
      std::fill(state.proposals.begin(), state.proposals.end(), 0);
    }
    for (std::size_t pick = 0; pick < d; ++pick) {
      std::size_t m = random_scan_step(state, model, policy, opts.inner_steps);
      if (!std::isfinite(state.x[m])) {
        std::ostringstream msg;
        msg << "run_chain: coordinate " << m << " became non-finite at iteration " << sweep;
        throw std::runtime_error(msg.str());
      }
    }
    if (sweep >= opts.burnin) {
      auto row = sweep - opts.burnin;
      for (std::size_t m = 0; m < d; ++m) trace.samples(row, static_cast<Eigen::Index>(m)) = state.x[m];
    }
  }
  policy.freeze();
  trace.accept_counts = state.accepts;
  trace.proposal_counts = state.proposals;
  trace.policy = std::move(policy);
  return trace;
}

void write_trace_csv(const std::filesystem::path& path, const ChainTrace& trace) {
  std::ostringstream out;
  out << "iter";
  for (Eigen::Index m = 0; m < trace.samples.cols(); ++m) out << ",coord_" << m;
  out << '\n';
  for (Eigen::Index i = 0; i < trace.samples.rows(); ++i) {
    out << i;
    for (Eigen::Index m = 0; m < trace.samples.cols(); ++m) {
      out << ',' << io::format_double(trace.samples(i, m));
    }
    out << '\n';
  }
  io::write_text(path, out.str());
}

void write_acceptance_csv(const std::filesystem::path& path, const ChainTrace& trace) {
  std::ostringstream out;
  out << "coord,accepts,proposals,rate\n";
  for (std::size_t m = 0; m < trace.accept_counts.size(); ++m) {
    out << m << ',' << trace.accept_counts[m] << ',' << trace.proposal_counts[m] << ','
        << io::format_double(trace.acceptance_rate(m)) << '\n';
  }
  io::write_text(path, out.str());
}

}  // namespace mwg
