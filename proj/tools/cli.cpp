#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "spininterp/curves/curves.hpp"
#include "spininterp/errors.hpp"
#include "spininterp/interp/interpolator.hpp"
#include "spininterp/model/disorder.hpp"
#include "spininterp/model/mixture.hpp"
#include "spininterp/oracle/enumeration.hpp"
#include "spininterp/oracle/second_moment.hpp"
#include "spininterp/oracle/sphere_series.hpp"
#include "spininterp/oracle/zeros.hpp"
#include "spininterp/series/moments.hpp"
#include "spininterp/series/series.hpp"
#include "spininterp/threshold/threshold.hpp"
#include "spininterp/util/parallel.hpp"
#include "spininterp/util/special.hpp"

namespace spininterp::cli {

using nlohmann::json;

namespace {

json to_json_complex(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void parse_beta(const std::string& text, RunConfig& cfg) {
  const auto comma = text.find(',');
  std::size_t used = 0;
  try {
    cfg.beta_re = std::stod(text.substr(0, comma), &used);
    if (used != comma && comma != std::string::npos) throw std::invalid_argument(text);
    cfg.beta_im = comma == std::string::npos ? 0.0 : std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--beta", "expected RE or RE,IM, got '" + text + "'");
  }
}

MixtureSpec load_spec(const RunConfig& cfg) {
  if (cfg.spec_path.empty()) return MixtureSpec::sherrington_kirkpatrick();
  return load_mixture(cfg.spec_path);
}

DisorderTensor load_or_build_disorder(const RunConfig& cfg, const MixtureSpec& spec) {
  if (cfg.disorder_path.empty()) return build_disorder(spec, cfg.n, cfg.seed);
  std::ifstream in(cfg.disorder_path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open disorder file '" + cfg.disorder_path + "'");
  DisorderTensor g = load_disorder(in);
  if (g.orders() != spec.active_orders())
    throw PreconditionError("disorder file orders do not match the mixture's active orders");
  return g;
}

json provenance(const RunConfig& cfg, const MixtureSpec& spec, int n, std::uint64_t seed) {
  return {{"tool", "spininterp"},
          {"version", kToolVersion},
          {"compiler", __VERSION__},
          {"spec_hash", hex64(spec.hash())},
          {"spec", {{"gammas", spec.gammas()}, {"domain", to_string(spec.domain())}}},
          {"n", n},
          {"seed", seed},
          {"budget", cfg.budget},
          {"config", cfg}};
}

std::string csv_preamble(const json& prov) {
  return "# spininterp " + prov["version"].get<std::string>() + " spec_hash=" +
         prov["spec_hash"].get<std::string>() + " seed=" + std::to_string(prov["seed"].get<std::uint64_t>()) +
         " n=" + std::to_string(prov["n"].get<int>()) + "\n";
}

/// Writes to --out when given, else to `out`.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out_path, std::ios::binary | std::ios::trunc);
  if (!file) throw PreconditionError("cannot open --out path '" + cfg.out_path + "'");
  file << text;
  if (!file) throw std::runtime_error("write to '" + cfg.out_path + "' failed");
}

void require_format(const RunConfig& cfg, bool csv_allowed) {
  if (cfg.format == "csv" && !csv_allowed)
    throw PreconditionError(cfg.subcommand + " has no CSV output; use --format json");
}

json report_json(const EstimateReport& r) {
  json estimates = json::array();
  for (std::size_t i = 0; i < r.estimates.size(); ++i)
    estimates.push_back({{"k", r.ks[i]}, {"log_Z", to_json_complex(r.estimates[i])}});
  return {{"mode", r.mode},
          {"beta_star", to_json_complex(r.beta_star)},
          {"beta_used", to_json_complex(r.beta_used)},
          {"eta", r.eta},
          {"epsilon", r.epsilon},
          {"delta", r.delta},
          {"m", r.m},
          {"log_L", r.log_L},
          {"N", r.N},
          {"kappa", r.kappa},
          {"beta2nd", r.beta2nd},
          {"gamma", r.gamma},
          {"r_hat", r.r_hat},
          {"log_r_hat_minus_one", r.log_r_hat_minus_one},
          {"estimates", estimates},
          {"k_star", r.k_star},
          {"ball_count", r.ball_count},
          {"estimate_log_Z", to_json_complex(r.estimate_logZ)},
          {"estimate", to_json_complex(r.estimate)},
          {"moment_path", r.moment_path},
          {"jitter_attempts", r.jitter_attempts},
          {"wall_time", r.wall_time}};
}

std::string run_estimate(const RunConfig& cfg) {
  require_format(cfg, true);
  const MixtureSpec spec = load_spec(cfg);
  const DisorderTensor g = load_or_build_disorder(cfg, spec);
  EstimateOptions opt;
  opt.moments = moment_path_from_string(cfg.force_moments);
  opt.log10_work_budget = cfg.budget;
  opt.max_degree = cfg.max_degree;
  opt.jitter = cfg.jitter;
  const cplx beta(cfg.beta_re, cfg.beta_im);

  std::string mode = cfg.mode;
  if (mode == "auto") mode = spec.gamma(2) == 0.0 ? "straight" : "multicurve";
  EstimateReport rep;
  if (mode == "straight") {
    rep = estimate_straightline(spec, g, beta, cfg.eps, cfg.eta, opt);
  } else {
    if (cfg.beta_im != 0.0) throw PreconditionError("multicurve accepts real beta only");
    if (cfg.curves_N > 0 || cfg.gamma > 0.0) {
      MulticurveSetup setup;
      if (cfg.curves_N > 0) setup.N = cfg.curves_N;
      if (cfg.gamma > 0.0) setup.gamma = cfg.gamma;
      setup.m = cfg.degree;
      rep = estimate_multicurve_with(spec, g, cfg.beta_re, cfg.eta, setup, opt);
    } else {
      rep = estimate_multicurve(spec, g, cfg.beta_re, cfg.eps, cfg.delta, cfg.eta, opt);
    }
  }
  const json prov = provenance(cfg, spec, g.n(), g.seed());
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << csv_preamble(prov) << "k,re,im\n";
    char buf[96];
    for (std::size_t i = 0; i < rep.estimates.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", rep.ks[i], rep.estimates[i].real(), rep.estimates[i].imag());
      os << buf;
    }
    return os.str();
  }
  json j = report_json(rep);
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

std::string run_exact(const RunConfig& cfg) {
  require_format(cfg, true);
  const MixtureSpec spec = load_spec(cfg);
  const DisorderTensor g = load_or_build_disorder(cfg, spec);
  const json prov = provenance(cfg, spec, g.n(), g.seed());
  const cplx beta(cfg.beta_re, cfg.beta_im);
  const bool cube = spec.domain() == Domain::hypercube;

  std::optional<EnergyTable> table;
  std::vector<double> taylor;  // sphere: E[H^k]/k!
  if (cube) {
    table = EnergyTable::build(spec, g);
  } else {
    MomentOptions mopt;
    mopt.log10_work_budget = cfg.budget;
    double bmax = std::abs(beta);
    if (cfg.format == "csv")
      bmax = std::max(std::abs(cplx(cfg.re_min, cfg.im_min)),
                      std::max(std::abs(cplx(cfg.re_min, cfg.im_max)),
                               std::max(std::abs(cplx(cfg.re_max, cfg.im_min)), std::abs(cplx(cfg.re_max, cfg.im_max)))));
    const int cap = 255 / spec.p_max();
    int k_max = cfg.k_max;
    if (k_max == 0) {
      // double the length until the geometric tail estimate is negligible
      for (k_max = std::min(24, cap);; k_max = std::min(2 * k_max, cap)) {
        const SphereSeriesValue v = sphere_Z_series(spec, g, bmax, k_max, mopt);
        if (v.conclusive && v.tail_estimate <= 1e-13 * std::max(1.0, std::abs(v.value))) break;
        if (k_max == cap) throw BudgetExceeded("sphere series not converged at the largest supported length", 0.0);
      }
    } else if (!sphere_Z_series(spec, g, bmax, k_max, mopt).conclusive) {
      throw BudgetExceeded("sphere series not converged at --k-max", std::log10(k_max));
    }
    taylor = moments_combinatorial(spec, g, k_max, mopt);
    for (std::size_t k = 0; k < taylor.size(); ++k) taylor[k] *= std::exp(-log_gamma(static_cast<double>(k) + 1.0));
  }
  auto evaluate = [&](cplx b) -> ValueAndDerivative {
    if (cube) return table->partition(b);
    cplx value = 0.0, derivative = 0.0;
    for (std::size_t k = taylor.size(); k-- > 0;) {
      derivative = derivative * b + value;
      value = value * b + taylor[k];
    }
    return {value, derivative};
  };

  if (cfg.format == "csv") {
    if (cfg.raster < 0) throw PreconditionError("--raster must be positive");
    std::ostringstream os;
    os << csv_preamble(prov);
    write_raster_csv(evaluate, cfg.re_min, cfg.re_max, cfg.im_min, cfg.im_max, cfg.raster > 0 ? cfg.raster : 64, os);
    return os.str();
  }

  json j;
  const ValueAndDerivative z = evaluate(beta);
  j["beta"] = to_json_complex(beta);
  j["Z"] = to_json_complex(z.value);
  if (cube) j["Z_prime"] = to_json_complex(z.derivative);
  if (beta.imag() == 0.0 && cube)
    j["log_Z"] = table->log_partition(beta.real());
  else
    j["log_Z"] = to_json_complex(std::log(z.value));
  if (cube) j["max_abs_energy"] = table->max_abs_energy();
  if (cfg.moments > 0) {
    std::vector<double> mom;
    if (cube) {
      mom = table->moments(cfg.moments);
    } else {
      MomentOptions mopt;
      mopt.log10_work_budget = cfg.budget;
      mom = moments_combinatorial(spec, g, cfg.moments, mopt);
    }
    j["moments"] = mom;
  }
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

AnalyticFunction zero_search_function(const EnergyTable& table, double radius) {
  auto taylor = std::make_shared<TaylorPartition>(table, 1.5 * radius);
  return [taylor](cplx b) { return (*taylor)(b); };
}

std::string run_zeros(const RunConfig& cfg) {
  require_format(cfg, true);
  const MixtureSpec spec = load_spec(cfg);
  if (spec.domain() != Domain::hypercube) throw PreconditionError("zero location needs the hypercube enumerator");
  if (!(cfg.radius > 0.0)) throw PreconditionError("--radius must be positive");
  const DisorderTensor g = load_or_build_disorder(cfg, spec);
  const json prov = provenance(cfg, spec, g.n(), g.seed());
  const EnergyTable table = EnergyTable::build(spec, g);
  const AnalyticFunction f = zero_search_function(table, cfg.radius);
  ZeroSearchOptions zopt;
  zopt.tol = cfg.tol;
  const ZeroList zl = locate_zeros(f, 0.0, cfg.radius, zopt);

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << csv_preamble(prov);
    write_zeros_csv(zl, os);
    return os.str();
  }
  const AnalyticFunction exact = [&](cplx b) { return table.partition(b); };
  const int winding = winding_number_circle(exact, 0.0, cfg.radius);
  const JensenResult jr = jensen_check(exact, cfg.radius, cfg.quad_points, zl.zeros);
  json zeros = json::array();
  for (const auto& z : zl.zeros)
    zeros.push_back({{"re", z.location.real()}, {"im", z.location.imag()}, {"multiplicity", z.multiplicity}});
  json j = {{"beta2nd", beta_2nd(spec)},
            {"disk", {{"center", to_json_complex(zl.disk_center)}, {"radius", zl.disk_radius}}},
            {"zeros", zeros},
            {"count", zl.total_multiplicity()},
            {"winding_number", winding},
            {"residual", zl.residual},
            {"boundary_max", zl.boundary_max},
            {"jensen", {{"lhs", jr.lhs}, {"rhs", jr.rhs}, {"quad_points", cfg.quad_points}}},
            {"provenance", prov}};
  return j.dump(2) + "\n";
}

std::string run_threshold(const RunConfig& cfg) {
  require_format(cfg, true);
  const MixtureSpec spec = load_spec(cfg);
  if (cfg.points < 2) throw PreconditionError("--points must be at least 2");
  const json prov = provenance(cfg, spec, cfg.n, cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const double b2 = beta_2nd(spec, std::min(cfg.tol, 1e-3));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double phi_beta = cfg.beta_re > 0.0 ? cfg.beta_re : b2;

  const PhiProfile phi(spec, phi_beta);
  json phi_rows = json::array();
  for (int i = 0; i < cfg.points; ++i) {
    const double m = -1.0 + 2.0 * i / (cfg.points - 1);
    phi_rows.push_back({m, phi(m)});
  }
  // RS bound finite only below 1/(gamma_2 sqrt 2)
  double top = 0.99 * b2;
  if (spec.gamma(2) > 0.0) top = std::min(top, 0.99 / (spec.gamma(2) * std::sqrt(2.0)));
  json cw_rows = json::array();
  for (int i = 0; i < cfg.points; ++i) {
    const double b = top * i / (cfg.points - 1);
    cw_rows.push_back({b, curie_weiss_log_Z(spec, cfg.n, b * b), rs_bound(spec, b)});
  }

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << csv_preamble(prov);
    char buf[128];
    if (cfg.table == "phi") {
      os << "m,phi\n";
      for (const auto& r : phi_rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r[0].get<double>(), r[1].get<double>());
        os << buf;
      }
    } else {
      os << "beta,log_Z_CW,rs_bound\n";
      for (const auto& r : cw_rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r[0].get<double>(), r[1].get<double>(),
                      r[2].get<double>());
        os << buf;
      }
    }
    return os.str();
  }
  json j = {{"beta2nd", b2},
            {"seconds", seconds},
            {"phi_beta", phi_beta},
            {"phi", phi_rows},
            {"curie_weiss", {{"n", cfg.n}, {"rows", cw_rows}}},
            {"slack_constant", kCurieWeissSlackConstant},
            {"provenance", prov}};
  return j.dump(2) + "\n";
}

json tube_check_json(const TubeCheck& c) {
  json j = {{"ok", c.ok}, {"worst", c.worst}, {"detail", c.detail}};
  if (c.witness) j["witness"] = to_json_complex(*c.witness);
  return j;
}

std::string run_curves(const RunConfig& cfg) {
  require_format(cfg, true);
  const MixtureSpec spec = load_spec(cfg);
  if (!(cfg.beta_re > 0.0) || cfg.beta_im != 0.0) throw PreconditionError("curves need a real beta* > 0");
  if (cfg.samples < 8 || cfg.samples % 4 != 0) throw PreconditionError("--samples must be a multiple of 4, >= 8");
  const json prov = provenance(cfg, spec, cfg.n, cfg.seed);
  const double b2 = beta_2nd(spec);
  const int m = cfg.degree > 0 ? static_cast<int>(cfg.degree) : 16;
  CurveFamily family;
  if (cfg.gamma > 0.0) {
    family = build_curve_family_with_gamma(cfg.beta_re, cfg.curves_N > 0 ? cfg.curves_N : 1, cfg.gamma, m, cfg.eps, b2);
  } else {
    int N = cfg.curves_N;
    double kappa = cfg.kappa;
    if (N <= 0 || kappa <= 0.0) {
      const NKappa nk = select_N_kappa(spec, cfg.n, cfg.eps, cfg.delta, b2);
      if (N <= 0) N = nk.N;
      if (kappa <= 0.0) kappa = nk.kappa;
    }
    family = build_curve_family({cfg.beta_re, cfg.eps, cfg.delta, kappa, N, m, b2});
  }

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << csv_preamble(prov);
    write_curves_csv(family, cfg.samples, os);
    return os.str();
  }
  const TubeReport rep = certify_tubes(family, cfg.samples);
  json j = {{"beta_star", family.beta_star.real()},
            {"N", family.N},
            {"epsilon", family.epsilon},
            {"kappa", family.kappa},
            {"beta2nd", family.beta2nd},
            {"eps_hat", family.eps_hat},
            {"gamma", family.gamma},
            {"a", family.a},
            {"r_hat", family.r_hat},
            {"log_r_hat_minus_one", family.log_r_hat_minus_one},
            {"m", family.m},
            {"certification",
             {{"all_ok", rep.all_ok()},
              {"samples", rep.samples},
              {"min_separation", std::isfinite(rep.min_separation) ? json(rep.min_separation) : json(nullptr)},
              {"barvinok_in_ua", tube_check_json(rep.barvinok_in_ua)},
              {"curves_disjoint", tube_check_json(rep.curves_disjoint)},
              {"tubes_disjoint", tube_check_json(rep.tubes_disjoint)},
              {"contained", tube_check_json(rep.contained)},
              {"bounded", tube_check_json(rep.bounded)},
              {"inversion", tube_check_json(rep.inversion)},
              {"envelope", tube_check_json(rep.envelope)}}},
            {"provenance", prov}};
  return j.dump(2) + "\n";
}

// verify suites

struct SuiteResult {
  std::string name;
  json cases = json::array();
  int passed = 0;
  int total = 0;
  void add(json c, bool ok) {
    c["pass"] = ok;
    cases.push_back(std::move(c));
    passed += ok ? 1 : 0;
    ++total;
  }
  json to_json() const { return {{"suite", name}, {"passed", passed}, {"total", total}, {"cases", cases}}; }
};

void require_cube(const MixtureSpec& spec, const std::string& suite) {
  if (spec.domain() != Domain::hypercube) throw PreconditionError(suite + " suite needs a hypercube mixture");
}

SuiteResult suite_jensen(const RunConfig& cfg, const MixtureSpec& spec) {
  require_cube(spec, "jensen");
  SuiteResult s{"jensen"};
  for (std::uint64_t seed = cfg.first_seed; seed < cfg.first_seed + cfg.seeds; ++seed) {
    const DisorderTensor g = build_disorder(spec, cfg.n, seed);
    const EnergyTable table = EnergyTable::build(spec, g);
    const AnalyticFunction exact = [&](cplx b) { return table.partition(b); };
    bool ok = true;
    json radii = json::array();
    for (double R : {0.5, 0.9}) {
      const ZeroList zl = locate_zeros(zero_search_function(table, R), 0.0, R);
      const int winding = winding_number_circle(exact, 0.0, R);
      const JensenResult jr = jensen_check(exact, R, cfg.quad_points, zl.zeros);
      const bool pass = std::abs(jr.lhs - jr.rhs) <= 1e-4 && winding == zl.total_multiplicity();
      ok = ok && pass;
      radii.push_back({{"R", R}, {"lhs", jr.lhs}, {"rhs", jr.rhs}, {"zeros", zl.total_multiplicity()},
                       {"winding_number", winding}});
    }
    s.add({{"seed", seed}, {"radii", radii}}, ok);
  }
  return s;
}

SuiteResult suite_zero_count(const RunConfig& cfg, const MixtureSpec& spec) {
  require_cube(spec, "zero-count");
  SuiteResult s{"zero-count"};
  const std::vector<double> radii = {0.7, 0.9};
  std::vector<double> sums(radii.size(), 0.0);
  for (std::uint64_t seed = cfg.first_seed; seed < cfg.first_seed + cfg.seeds; ++seed) {
    const DisorderTensor g = build_disorder(spec, cfg.n, seed);
    const EnergyTable table = EnergyTable::build(spec, g);
    const ZeroList zl = locate_zeros(zero_search_function(table, radii.back()), 0.0, radii.back());
    for (std::size_t r = 0; r < radii.size(); ++r)
      for (const auto& z : zl.zeros)
        if (std::abs(z.location) < radii[r]) sums[r] += z.multiplicity * std::log(radii[r] / std::abs(z.location));
  }
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const double mean = sums[r] / static_cast<double>(cfg.seeds);
    const double bound = 0.5 * curie_weiss_log_Z(spec, cfg.n, radii[r] * radii[r]);
    s.add({{"R", radii[r]}, {"mean_log_sum", mean}, {"bound", bound}, {"instances", cfg.seeds}}, mean <= bound);
  }
  return s;
}

SuiteResult suite_second_moment(const RunConfig& cfg, const MixtureSpec& spec) {
  SuiteResult s{"second-moment"};
  for (double beta : {0.3, 0.6, 0.9}) {
    const SecondMomentEstimate e = second_moment_identity_check(spec, cfg.n, beta, cfg.seeds, cfg.first_seed);
    const double z = std::abs(e.mc_ratio - e.cw_value) / e.standard_error;
    s.add({{"beta", beta},
           {"mc_ratio", e.mc_ratio},
           {"cw_value", e.cw_value},
           {"standard_error", e.standard_error},
           {"z_score", z},
           {"samples", e.samples}},
          z <= 5.0);
  }
  return s;
}

SuiteResult suite_cw_bound(const RunConfig& cfg, const MixtureSpec& spec) {
  SuiteResult s{"cw-bound"};
  const double b2 = beta_2nd(spec);
  std::vector<double> grid;
  for (int i = 0; i <= 90; ++i) grid.push_back(b2 * 0.01 * i);
  std::vector<int> ns;
  for (int i = 0; i < 12; ++i) ns.push_back(static_cast<int>(std::lround(50.0 * std::pow(40.0, i / 11.0))));
  for (int n : ns) {
    const CwBoundReport rep = verify_cw_bound(spec, {n}, grid);
    double worst = -INFINITY;
    for (const auto& e : rep.entries) worst = std::max(worst, e.slack * std::sqrt(static_cast<double>(n)));
    s.add({{"n", n}, {"max_slack_sqrt_n", worst}, {"violations", rep.violations}, {"monotone", rep.monotone},
           {"slack_constant", kCurieWeissSlackConstant}},
          rep.violations == 0 && rep.monotone);
  }
  (void)cfg;
  return s;
}

SuiteResult suite_moments(const RunConfig& cfg, const MixtureSpec& spec) {
  require_cube(spec, "moments");
  SuiteResult s{"moments"};
  const int k_max = 10;
  for (std::uint64_t seed = cfg.first_seed; seed < cfg.first_seed + cfg.seeds; ++seed) {
    const DisorderTensor g = build_disorder(spec, cfg.n, seed);
    const std::vector<double> sweep = EnergyTable::build(spec, g).moments(k_max);
    MomentOptions mopt;
    mopt.log10_work_budget = cfg.budget;
    const std::vector<double> comb = moments_combinatorial(spec, g, k_max, mopt);
    // odd moments can vanish, so errors are relative to E[H^2]^(k/2)
    double worst = 0.0;
    for (int k = 0; k <= k_max; ++k) {
      const double scale = std::max(std::abs(sweep[k]), std::pow(sweep[2], 0.5 * k));
      worst = std::max(worst, std::abs(sweep[k] - comb[k]) / scale);
    }
    s.add({{"seed", seed}, {"max_relative_error", worst}}, worst <= 1e-9);
  }
  return s;
}

SuiteResult suite_straight(const RunConfig& cfg, const MixtureSpec& spec) {
  require_cube(spec, "straight-line");
  SuiteResult s{"straight-line"};
  const double b2 = beta_2nd(spec);
  const double beta = cfg.beta_re > 0.0 ? cfg.beta_re : 0.5 * b2;
  for (std::uint64_t seed = cfg.first_seed; seed < cfg.first_seed + cfg.seeds; ++seed) {
    const DisorderTensor g = build_disorder(spec, cfg.n, seed);
    const EstimateReport r = estimate_straightline(spec, g, beta, cfg.eps, cfg.eta);
    const double exact = EnergyTable::build(spec, g).log_partition(beta);
    const double err = std::abs(r.estimate_logZ - cplx(exact, 0.0));
    s.add({{"seed", seed}, {"beta", beta}, {"m", r.m}, {"error", err}}, err <= cfg.eta);
  }
  return s;
}

std::string run_verify(const RunConfig& cfg) {
  require_format(cfg, false);
  const MixtureSpec spec = load_spec(cfg);
  if (cfg.seeds == 0) throw PreconditionError("--seeds must be positive");
  std::vector<SuiteResult> results;
  auto want = [&](const char* name) { return cfg.suite == name || cfg.suite == "all"; };
  if (want("jensen")) results.push_back(suite_jensen(cfg, spec));
  if (want("zero-count")) results.push_back(suite_zero_count(cfg, spec));
  if (want("second-moment")) results.push_back(suite_second_moment(cfg, spec));
  if (want("cw-bound")) results.push_back(suite_cw_bound(cfg, spec));
  if (want("moments")) results.push_back(suite_moments(cfg, spec));
  if (want("straight-line") && spec.gamma(2) == 0.0) results.push_back(suite_straight(cfg, spec));
  if (results.empty()) throw PreconditionError("suite '" + cfg.suite + "' does not apply to this mixture");
  json suites = json::array();
  int passed = 0, total = 0;
  for (const auto& r : results) {
    suites.push_back(r.to_json());
    passed += r.passed;
    total += r.total;
  }
  json j = {{"passed", passed},
            {"total", total},
            {"summary", std::to_string(passed) + "/" + std::to_string(total) + " pass"},
            {"suites", suites},
            {"provenance", provenance(cfg, spec, cfg.n, cfg.first_seed)}};
  return j.dump(2) + "\n";
}

std::string run_bench(const RunConfig& cfg) {
  require_format(cfg, false);
  if (cfg.repeat < 1) throw PreconditionError("--repeat must be positive");
  json rows = json::array();
  for (const auto& e : run_benchmarks(cfg.repeat))
    rows.push_back({{"kernel", e.kernel},
                    {"serial_seconds", e.serial_seconds},
                    {"parallel_seconds", e.parallel_seconds},
                    {"speedup", e.serial_seconds / e.parallel_seconds},
                    {"identical", e.identical}});
  const MixtureSpec spec = MixtureSpec::sherrington_kirkpatrick();
  json j = {{"threads", thread_cap()}, {"kernels", rows}, {"provenance", provenance(cfg, spec, cfg.n, cfg.seed)}};
  return j.dump(2) + "\n";
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--spec", cfg.spec_path, "mixture config file (default: SK on the hypercube)");
  sub->add_option("--n", cfg.n, "number of spins")->check(CLI::Range(1, 1 << 20));
  sub->add_option("--seed", cfg.seed, "disorder seed");
  sub->add_option("--disorder", cfg.disorder_path, "load the disorder tensor from this file instead of the seed");
  sub->add_option("--threads", cfg.threads, "worker cap (fallback: SPININTERP_THREADS)")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", cfg.out_path, "output file (default: standard output)");
  sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--budget", cfg.budget, "log10 work budget");
}

void add_beta(CLI::App* sub, RunConfig& cfg) {
  sub->add_option_function<std::string>(
      "--beta", [&cfg](const std::string& text) { parse_beta(text, cfg); }, "inverse temperature RE[,IM]");
}

std::unique_ptr<CLI::App> make_app(RunConfig& cfg) {
  auto owner = std::make_unique<CLI::App>("Partition function interpolation for mixed p-spin glasses", "spininterp");
  CLI::App& app = *owner;
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto* est = app.add_subcommand("estimate", "interpolated estimate of log Z at beta*");
  add_common(est, cfg);
  add_beta(est, cfg);
  est->add_option("--eps", cfg.eps, "density deficit epsilon")->check(CLI::Range(0.0, 1.0));
  est->add_option("--delta", cfg.delta, "failure probability delta")->check(CLI::Range(0.0, 1.0));
  est->add_option("--eta", cfg.eta, "additive accuracy on log Z")->check(CLI::PositiveNumber);
  est->add_option("--mode", cfg.mode, "estimator")->check(CLI::IsMember({"auto", "straight", "multicurve"}));
  est->add_option("--force-moments", cfg.force_moments, "moment path")
      ->check(CLI::IsMember({"auto", "sweep", "combinatorial"}));
  est->add_option("--jitter", cfg.jitter, "multicurve retry offset size (heuristic)")->check(CLI::NonNegativeNumber);
  est->add_option("--max-degree", cfg.max_degree, "largest truncation depth to attempt");
  est->add_option("--N", cfg.curves_N, "explicit multicurve N (with --gamma)")->check(CLI::NonNegativeNumber);
  est->add_option("--gamma", cfg.gamma, "explicit Barvinok-map gamma")->check(CLI::Range(0.0, 1.0));
  est->add_option("--degree", cfg.degree, "explicit truncation depth for the explicit multicurve variant");

  auto* ex = app.add_subcommand("exact", "exact Z by enumeration (hypercube) or entire series (sphere)");
  add_common(ex, cfg);
  add_beta(ex, cfg);
  ex->add_option("--moments", cfg.moments, "also report E[H^k] for k <= this")->check(CLI::NonNegativeNumber);
  ex->add_option("--k-max", cfg.k_max, "sphere series length (0: largest supported)")->check(CLI::NonNegativeNumber);
  ex->add_option("--raster", cfg.raster, "CSV raster resolution (--format csv)")->check(CLI::NonNegativeNumber);
  ex->add_option("--re-min", cfg.re_min);
  ex->add_option("--re-max", cfg.re_max);
  ex->add_option("--im-min", cfg.im_min);
  ex->add_option("--im-max", cfg.im_max);

  auto* zs = app.add_subcommand("zeros", "Fisher zeros of Z in D(0, radius)");
  add_common(zs, cfg);
  zs->add_option("--radius", cfg.radius, "disk radius")->check(CLI::PositiveNumber);
  zs->add_option("--tol", cfg.tol, "square size at which subdivision stops")->check(CLI::PositiveNumber);
  zs->add_option("--quad-points", cfg.quad_points, "Jensen quadrature angles")->check(CLI::PositiveNumber);

  auto* th = app.add_subcommand("threshold", "second-moment threshold, phi profile and Curie-Weiss curve");
  add_common(th, cfg);
  add_beta(th, cfg);
  th->add_option("--points", cfg.points, "rows per table")->check(CLI::Range(2, 1000000));
  th->add_option("--table", cfg.table, "CSV table")->check(CLI::IsMember({"phi", "cw"}));
  th->add_option("--tol", cfg.tol, "bisection tolerance")->check(CLI::PositiveNumber);

  auto* cv = app.add_subcommand("curves", "interpolating curves and tube certification");
  add_common(cv, cfg);
  add_beta(cv, cfg);
  cv->add_option("--eps", cfg.eps)->check(CLI::Range(0.0, 1.0));
  cv->add_option("--delta", cfg.delta)->check(CLI::Range(0.0, 1.0));
  cv->add_option("--kappa", cfg.kappa, "tube width fraction (0: schedule)")->check(CLI::NonNegativeNumber);
  cv->add_option("--N", cfg.curves_N, "2N+1 curves (0: schedule)")->check(CLI::NonNegativeNumber);
  cv->add_option("--gamma", cfg.gamma, "explicit Barvinok-map gamma")->check(CLI::Range(0.0, 1.0));
  cv->add_option("--degree", cfg.degree, "coefficients per curve");
  cv->add_option("--samples", cfg.samples, "boundary samples");

  auto* vf = app.add_subcommand("verify", "identity and bound suites against the exact oracles");
  add_common(vf, cfg);
  add_beta(vf, cfg);
  vf->add_option("--suite", cfg.suite)
      ->check(CLI::IsMember({"jensen", "zero-count", "second-moment", "cw-bound", "moments", "straight-line", "all"}));
  vf->add_option("--seeds", cfg.seeds, "number of disorder seeds");
  vf->add_option("--first-seed", cfg.first_seed);
  vf->add_option("--eps", cfg.eps)->check(CLI::Range(0.0, 1.0));
  vf->add_option("--eta", cfg.eta)->check(CLI::PositiveNumber);
  vf->add_option("--quad-points", cfg.quad_points)->check(CLI::PositiveNumber);

  auto* bn = app.add_subcommand("bench", "serial versus parallel kernel timings");
  add_common(bn, cfg);
  bn->add_option("--repeat", cfg.repeat)->check(CLI::PositiveNumber);

  return owner;
}

void parse_into(CLI::App& app, const std::vector<std::string>& args, RunConfig& cfg) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  app.parse(reversed);
  cfg.subcommand = app.get_subcommands().front()->get_name();
}

}  // namespace

RunConfig parse_arguments(const std::vector<std::string>& args) {
  RunConfig cfg;
  parse_into(*make_app(cfg), args, cfg);
  return cfg;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto fail = [&err](const std::string& kind, const std::string& message, int code, const json& extra = {}) {
    json j = {{"error", {{"kind", kind}, {"message", message}}}};
    if (!extra.is_null()) j["error"].update(extra);
    err << j.dump() << "\n";
    return code;
  };
  RunConfig cfg;
  const auto app = make_app(cfg);
  try {
    parse_into(*app, args, cfg);
    set_thread_cap(cfg.threads > 0 ? cfg.threads : threads_from_environment());
    std::string text;
    if (cfg.subcommand == "estimate") text = run_estimate(cfg);
    else if (cfg.subcommand == "exact") text = run_exact(cfg);
    else if (cfg.subcommand == "zeros") text = run_zeros(cfg);
    else if (cfg.subcommand == "threshold") text = run_threshold(cfg);
    else if (cfg.subcommand == "curves") text = run_curves(cfg);
    else if (cfg.subcommand == "verify") text = run_verify(cfg);
    else text = run_bench(cfg);
    emit(cfg, out, text);
    return 0;
  } catch (const CLI::Success& e) {
    return app->exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  } catch (const BudgetExceeded& e) {
    return fail("budget", e.what(), 2, {{"log10_cost", e.log10_cost()}});
  } catch (const CapacityError& e) {
    return fail("capacity", e.what(), 2);
  } catch (const PreconditionError& e) {
    return fail("precondition", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}

}  // namespace spininterp::cli
