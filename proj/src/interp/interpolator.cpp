#include "spininterp/interp/interpolator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "spininterp/curves/curves.hpp"
#include "spininterp/errors.hpp"
#include "spininterp/oracle/enumeration.hpp"
#include "spininterp/series/moments.hpp"
#include "spininterp/threshold/threshold.hpp"
#include "spininterp/util/special.hpp"

namespace spininterp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kBetaTol = 1e-9;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

std::string_view to_string(MomentPath path) {
  switch (path) {
    case MomentPath::sweep:
      return "sweep";
    case MomentPath::combinatorial:
      return "combinatorial";
    default:
      return "auto";
  }
}

MomentPath moment_path_from_string(std::string_view text) {
  if (text == "auto") return MomentPath::automatic;
  if (text == "sweep") return MomentPath::sweep;
  if (text == "combinatorial") return MomentPath::combinatorial;
  throw PreconditionError("unknown moment path '" + std::string(text) + "'");
}

std::int64_t truncation_depth_log(double lambda, double log_L, double eta) {
  if (!(log_L >= 0.0)) throw PreconditionError("log_L must be >= 0");
  if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
  if (!(lambda > 0.0)) throw PreconditionError("r_ratio must be < 1");
  const double one_minus_r = -std::expm1(-lambda);
  // log of the bound at depth m: log(2 (pi + L) / (1 - r)) - (m + 1) lambda
  const double head = std::log(2.0 * (kPi + log_L) / one_minus_r);
  auto ok = [&](double m) { return head - (m + 1.0) * lambda <= std::log(eta); };
  double m = std::max(0.0, std::ceil((head - std::log(eta)) / lambda - 1.0));
  if (!(m < 9.0e18)) throw BudgetExceeded("truncation depth does not fit in 64 bits", std::log10(m));
  while (m > 0 && ok(m - 1)) m -= 1;
  while (!ok(m)) m += 1;
  return static_cast<std::int64_t>(m);
}

std::int64_t truncation_depth(double r_ratio, double log_L, double eta) {
  if (!(r_ratio > 0.0)) throw PreconditionError("r_ratio must be positive");
  if (!(r_ratio < 1.0)) throw PreconditionError("r_ratio must be < 1");
  return truncation_depth_log(-std::log(r_ratio), log_L, eta);
}

double log10_truncation_depth(double log_r_hat_minus_one, double log_L, double eta) {
  const double lambda = std::log1p(std::exp(log_r_hat_minus_one));
  if (lambda > 1e-8) return std::log10(std::max(1.0, static_cast<double>(truncation_depth_log(lambda, log_L, eta))));
  // lambda ~ r_hat - 1 and 1 - r ~ lambda
  const double numerator = std::log(2.0 * (kPi + log_L) / eta) - log_r_hat_minus_one;
  return (std::log(numerator) - log_r_hat_minus_one) / std::numbers::ln10;
}

double log_L_bound(const MixtureSpec& spec, const DisorderTensor& g, double beta_max) {
  if (!(beta_max >= 0.0)) throw PreconditionError("beta_max must be >= 0");
  const int n = g.n();
  double total = 0.0;
  for (int p : spec.active_orders()) {
    double l1 = 0.0;
    for (double v : g.couplings(p)) l1 += std::fabs(v);
    double factor = spec.gamma(p) / std::pow(static_cast<double>(n), 0.5 * (p - 1));
    if (spec.domain() == Domain::sphere) factor *= std::pow(static_cast<double>(n), 0.5 * p);
    total += factor * l1;
  }
  return beta_max * total;
}

NKappa select_N_kappa(const MixtureSpec& spec, int n, double epsilon, double delta, double b2) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in (0, 1)");
  NKappa out{};
  out.zero_bound = zero_count_bound(spec, n, (1.0 - epsilon) * b2, (1.0 - epsilon / 2.0) * b2, b2);
  out.N = std::max(1, static_cast<int>(std::ceil(2.0 / delta * out.zero_bound - 1e-12)));
  auto g = [&](double K) { return 0.5 * curie_weiss_log_Z(spec, n, K * b2 * K * b2) / std::log(3.0); };
  double lo = 0.0, hi = 1.0;
  if (g(hi) <= delta / 2.0) {
    lo = hi;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) <= delta / 2.0 ? lo : hi) = mid;
    }
  }
  out.K = std::min(lo, 1.0 - 1e-12);
  out.kappa = out.K / 3.0;
  return out;
}

NKappa select_N_kappa(const MixtureSpec& spec, int n, double epsilon, double delta) {
  return select_N_kappa(spec, n, epsilon, delta, beta_2nd(spec, kBetaTol));
}

ComplexSeries partition_series(const MixtureSpec& spec, const DisorderTensor& g, int m,
                               const EstimateOptions& options, std::string* path_used) {
  MomentPath path = options.moments;
  const bool sweep_possible = spec.domain() == Domain::hypercube && g.n() <= kDefaultEnumerationCap;
  if (path == MomentPath::sweep && !sweep_possible)
    throw PreconditionError("the exact sweep needs the hypercube and n <= " + std::to_string(kDefaultEnumerationCap));
  if (path == MomentPath::automatic) {
    const double sweep_cost = g.n() * std::log10(2.0) + std::log10(m + 1.0);
    const double comb_cost = log10_moment_work(spec, g.n(), m, MomentMethod::grouped);
    path = sweep_possible && sweep_cost <= comb_cost ? MomentPath::sweep : MomentPath::combinatorial;
  }
  if (path_used) *path_used = std::string(to_string(path));
  std::vector<cplx> c(static_cast<std::size_t>(m) + 1);
  if (path == MomentPath::sweep) {
    const auto coeffs = EnergyTable::build(spec, g, options.exec).taylor_coefficients(m, options.exec);
    for (int j = 0; j <= m; ++j) c[j] = coeffs[j];
  } else {
    MomentOptions mo;
    mo.log10_work_budget = options.log10_work_budget;
    mo.exec = options.exec;
    const auto moments = moments_combinatorial(spec, g, m, mo);
    for (int j = 0; j <= m; ++j) c[j] = moments[j] * std::exp(-log_gamma(j + 1.0));
  }
  return ComplexSeries(std::move(c));
}

DensestBall densest_ball(std::span<const cplx> estimates, std::span<const int> ks, double radius) {
  if (estimates.empty() || estimates.size() != ks.size()) throw PreconditionError("densest_ball: bad input sizes");
  DensestBall best{0, -1};
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    int count = 0;
    for (std::size_t j = 0; j < estimates.size(); ++j)
      if (std::abs(estimates[j] - estimates[i]) <= radius) ++count;
    const int ki = ks[i], kb = ks[best.index];
    const bool better = count > best.count ||
                        (count == best.count && (std::abs(ki) < std::abs(kb) || (std::abs(ki) == std::abs(kb) && ki < kb)));
    if (better) best = {i, count};
  }
  return best;
}

EstimateReport estimate_straightline(const MixtureSpec& spec, const DisorderTensor& g, cplx beta_star,
                                     double epsilon, double eta, const EstimateOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (spec.gamma(2) != 0.0)
    throw PreconditionError("straight-line estimation needs gamma_2 = 0; use the multicurve estimator");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw PreconditionError("epsilon must lie in (0, 1)");
  if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
  EstimateReport r;
  r.mode = "straight";
  r.beta_star = beta_star;
  r.beta_used = beta_star;
  r.eta = eta;
  r.epsilon = epsilon;
  r.beta2nd = beta_2nd(spec, kBetaTol);
  if (!(std::abs(beta_star) <= (1.0 - epsilon) * r.beta2nd))
    throw PreconditionError("|beta*| must be at most (1 - eps) beta_2nd");
  r.log_L = log_L_bound(spec, g, (1.0 - epsilon / 2.0) * r.beta2nd);
  r.m = truncation_depth((1.0 - epsilon) / (1.0 - epsilon / 2.0), r.log_L, eta);
  if (r.m > options.max_degree)
    throw BudgetExceeded("truncation depth " + std::to_string(r.m) + " exceeds the degree budget",
                         std::log10(static_cast<double>(r.m)));
  const auto z = partition_series(spec, g, static_cast<int>(r.m), options, &r.moment_path);
  const auto logz = series_log(z);
  r.ks = {0};
  r.estimates = {logz.evaluate(beta_star)};
  r.k_star = 0;
  r.ball_count = 1;
  r.estimate_logZ = r.estimates[0];
  r.estimate = std::exp(r.estimate_logZ);
  r.wall_time = seconds_since(t0);
  return r;
}

namespace {

// Per-curve estimates for a built family and Z-series.
void run_curves(const ComplexSeries& z, const CurveFamily& family, EstimateReport& r, Exec exec) {
  const int count = 2 * family.N + 1;
  r.ks.resize(static_cast<std::size_t>(count));
  r.estimates.assign(static_cast<std::size_t>(count), cplx{});
  auto one = [&](int i) {
    r.ks[static_cast<std::size_t>(i)] = i - family.N;
    const auto composed = series_compose(z, family.curves[static_cast<std::size_t>(i)]);
    r.estimates[static_cast<std::size_t>(i)] = series_log(composed).sum();
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) one(i);
  } else {
    for (int i = 0; i < count; ++i) one(i);
  }
  const auto best = densest_ball(r.estimates, r.ks, 2.0 * r.eta / 3.0);
  r.k_star = r.ks[best.index];
  r.ball_count = best.count;
  r.estimate_logZ = r.estimates[best.index];
  r.estimate = std::exp(r.estimate_logZ);
}

void check_budget(const EstimateReport& r, const EstimateOptions& options) {
  const double log10_m = std::log10(std::max<double>(1.0, static_cast<double>(r.m)));
  const double log10_cost = std::log10(2.0 * r.N + 1.0) + 3.0 * log10_m - std::log10(6.0);
  if (r.m > options.max_degree || log10_cost > options.log10_work_budget)
    throw BudgetExceeded("truncation depth " + std::to_string(r.m) + " over " + std::to_string(2 * r.N + 1) +
                             " curves exceeds the work budget",
                         log10_cost);
}

EstimateReport trivial_report(double beta_star, double epsilon, double delta, double eta) {
  EstimateReport r;
  r.mode = "multicurve";
  r.beta_star = beta_star;
  r.beta_used = beta_star;
  r.epsilon = epsilon;
  r.delta = delta;
  r.eta = eta;
  r.ks = {0};
  r.estimates = {0.0};
  r.ball_count = 1;
  r.estimate_logZ = 0.0;
  r.estimate = 1.0;
  r.moment_path = "none";
  return r;
}

}  // namespace

EstimateReport estimate_multicurve(const MixtureSpec& spec, const DisorderTensor& g, double beta_star,
                                   double epsilon, double delta, double eta, const EstimateOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw PreconditionError("epsilon must lie in (0, 1/2)");
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("delta must lie in (0, 1)");
  if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
  const double b2 = beta_2nd(spec, kBetaTol);
  if (!(beta_star >= 0.0 && beta_star < (1.0 - 2.0 * epsilon) * b2))
    throw PreconditionError("beta* must lie in [0, (1 - 2 eps) beta_2nd)");
  if (beta_star == 0.0) {
    auto r = trivial_report(beta_star, epsilon, delta, eta);
    r.beta2nd = b2;
    r.wall_time = seconds_since(t0);
    return r;
  }
  EstimateReport r;
  r.mode = "multicurve";
  r.beta_star = beta_star;
  r.beta_used = beta_star;
  r.eta = eta;
  r.epsilon = epsilon;
  r.delta = delta;
  r.beta2nd = b2;
  const auto nk = select_N_kappa(spec, g.n(), epsilon, delta, b2);
  r.N = nk.N;
  r.kappa = nk.kappa;
  const double eps_hat = epsilon_hat(epsilon, nk.kappa, nk.N, b2);
  r.gamma = eps_hat * eps_hat / 64.0;
  const BarvinokMap s(r.gamma);
  r.r_hat = s.r_hat();
  r.log_r_hat_minus_one = s.log_r_hat_minus_one();
  r.log_L = log_L_bound(spec, g, (1.0 - epsilon) * b2);
  const double lambda = s.log_r_hat();
  if (!(lambda > 0.0) || lambda < 1e-15) {
    const double log10_m = log10_truncation_depth(r.log_r_hat_minus_one, r.log_L, eta / 3.0);
    throw BudgetExceeded("curve family needs truncation depth ~1e" + std::to_string(static_cast<long long>(log10_m)) +
                             " (N = " + std::to_string(r.N) + ", gamma = " + std::to_string(r.gamma) +
                             ", log(r_hat - 1) = " + std::to_string(r.log_r_hat_minus_one) + ")",
                         log10_m);
  }
  r.m = truncation_depth_log(lambda, r.log_L, eta / 3.0);
  check_budget(r, options);

  const auto z = partition_series(spec, g, static_cast<int>(r.m), options, &r.moment_path);
  CurveParams cp{beta_star, epsilon, delta, nk.kappa, nk.N, static_cast<int>(r.m), b2};
  run_curves(z, build_curve_family(cp, options.exec), r, options.exec);

  if (options.jitter > 0.0 && r.ball_count < r.N + 1) {
    static constexpr double offsets[] = {0.5, -0.5, 1.0, -1.0, 0.25};
    const double upper = (1.0 - 2.0 * epsilon) * b2;
    EstimateReport best = r;
    for (double off : offsets) {
      const double beta = beta_star + options.jitter * off;
      if (!(beta > 0.0 && beta < upper)) continue;
      EstimateReport trial = r;
      trial.beta_used = beta;
      cp.beta_star = beta;
      run_curves(z, build_curve_family(cp, options.exec), trial, options.exec);
      trial.jitter_attempts = best.jitter_attempts + 1;
      best.jitter_attempts = trial.jitter_attempts;
      if (trial.ball_count > best.ball_count) best = trial;
      if (best.ball_count >= r.N + 1) break;
    }
    r = best;
  }
  r.wall_time = seconds_since(t0);
  return r;
}

EstimateReport estimate_multicurve_with(const MixtureSpec& spec, const DisorderTensor& g, double beta_star,
                                        double eta, const MulticurveSetup& setup, const EstimateOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(eta > 0.0)) throw PreconditionError("eta must be positive");
  if (!(beta_star >= 0.0)) throw PreconditionError("beta* must be >= 0");
  if (beta_star == 0.0) {
    auto r = trivial_report(beta_star, 0.0, 0.0, eta);
    r.wall_time = seconds_since(t0);
    return r;
  }
  EstimateReport r;
  r.mode = "multicurve";
  r.beta_star = beta_star;
  r.beta_used = beta_star;
  r.eta = eta;
  r.N = setup.N;
  r.gamma = setup.gamma;
  const BarvinokMap s(setup.gamma);
  r.r_hat = s.r_hat();
  r.log_r_hat_minus_one = s.log_r_hat_minus_one();
  r.log_L = log_L_bound(spec, g, setup.log_L_radius);
  r.m = setup.m > 0 ? setup.m : truncation_depth_log(s.log_r_hat(), r.log_L, eta / 3.0);
  check_budget(r, options);
  const auto z = partition_series(spec, g, static_cast<int>(r.m), options, &r.moment_path);
  run_curves(z, build_curve_family_with_gamma(beta_star, setup.N, setup.gamma, static_cast<int>(r.m), 0.0, 0.0,
                                              options.exec),
             r, options.exec);
  r.wall_time = seconds_since(t0);
  return r;
}

}  // namespace spininterp
