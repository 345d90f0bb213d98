#include "spininterp/threshold/threshold.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spininterp/errors.hpp"
#include "spininterp/util/special.hpp"

namespace spininterp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (1+m) log(1+m) with the 0 log 0 = 0 convention
double xlog1px(double m) { return m == -1.0 ? 0.0 : (1.0 + m) * std::log1p(m); }

}  // namespace

double EntropyProfile::h(double m) const {
  if (std::fabs(m) > 1.0) throw PreconditionError("magnetization outside [-1, 1]");
  if (domain_ == Domain::hypercube) return -0.5 * (xlog1px(-m) + xlog1px(m));
  if (std::fabs(m) == 1.0) return -kInf;
  return 0.5 * std::log1p(-m * m);
}

double EntropyProfile::h_prime(double m) const {
  if (std::fabs(m) > 1.0) throw PreconditionError("magnetization outside [-1, 1]");
  if (domain_ == Domain::hypercube) return -std::atanh(m);
  if (std::fabs(m) == 1.0) return m > 0 ? -kInf : kInf;
  return -m / (1.0 - m * m);
}

double EntropyProfile::h_second(double m) const {
  if (std::fabs(m) > 1.0) throw PreconditionError("magnetization outside [-1, 1]");
  if (std::fabs(m) == 1.0) return -kInf;
  const double q = 1.0 - m * m;
  if (domain_ == Domain::hypercube) return -1.0 / q;
  return -(1.0 + m * m) / (q * q);
}

namespace {

// beta-independent grid data for the certification
struct CertificationGrid {
  std::vector<double> m, xi, xi_p, h, h_p;
};

CertificationGrid make_grid(const MixtureSpec& spec) {
  const EntropyProfile ent(spec.domain());
  CertificationGrid g;
  const int cells = kCertificationCells;
  for (int i = 0; i <= cells; ++i) {
    const double m = -1.0 + 2.0 * i / cells;  // exact dyadic points
    g.m.push_back(m);
    g.xi.push_back(spec.xi(m));
    g.xi_p.push_back(spec.xi_prime(m));
    g.h.push_back(ent.h(m));
    g.h_p.push_back(ent.h_prime(m));
  }
  return g;
}

// Largest r with beta^2 xi''_abs(r) < 1; on [-r, r] phi'' <= beta^2 xi''_abs(r) - 1 < 0.
double concave_radius(const MixtureSpec& spec, double beta) {
  const double b2 = beta * beta;
  if (b2 * spec.xi_second_abs(1.0) < 1.0) return 1.0;
  if (b2 * spec.xi_second_abs(0.0) >= 1.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (b2 * spec.xi_second_abs(mid) < 1.0 ? lo : hi) = mid;
  }
  return lo;
}

// Upper bound of phi over the cell [m_i, m_{i+1}]; +inf when no bound holds.
double cell_bound(const MixtureSpec& spec, const EntropyProfile& ent, const CertificationGrid& g, int i, double b2) {
  const double a = g.m[i], b = g.m[i + 1], w = b - a;
  const double fa = b2 * g.xi[i] + g.h[i];
  const double fb = b2 * g.xi[i + 1] + g.h[i + 1];
  const double da = b2 * g.xi_p[i] + g.h_p[i];
  const double db = b2 * g.xi_p[i + 1] + g.h_p[i + 1];
  const double abs_max = std::max(std::fabs(a), std::fabs(b));
  const double abs_min = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::fabs(a), std::fabs(b));
  const double curvature = b2 * spec.xi_second_abs(abs_max) + ent.h_second(abs_min);
  if (curvature <= 0.0) {
    // concave: tangent lines from either end dominate phi on the cell
    double bound = kInf;
    if (std::isfinite(fa)) {
      const double t = fa + std::max(0.0, da) * w;
      if (!std::isnan(t)) bound = std::min(bound, t);
    }
    if (std::isfinite(fb)) {
      const double t = fb + std::max(0.0, -db) * w;
      if (!std::isnan(t)) bound = std::min(bound, t);
    }
    if (!std::isfinite(fa) && !std::isfinite(fb)) return -kInf;
    return bound;
  }
  if (!std::isfinite(fa) || !std::isfinite(fb)) return kInf;
  return std::max(fa, fb) + curvature * w * w / 8.0;
}

bool certified_on(const MixtureSpec& spec, const CertificationGrid& g, double beta, Exec exec) {
  const PhiProfile phi(spec, beta);
  if (!(phi.second_at_zero() < 0.0)) return false;
  const EntropyProfile ent(spec.domain());
  const double b2 = beta * beta;
  const double r0 = concave_radius(spec, beta);
  const int cells = kCertificationCells;
  int bad = 0;
  auto check = [&](int i) {
    const double a = g.m[i], b = g.m[i + 1];
    if (a >= -r0 && b <= r0) return 0;  // strictly concave around the maximum at 0
    return cell_bound(spec, ent, g, i, b2) < 0.0 ? 0 : 1;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for reduction(+ : bad) schedule(static)
    for (int i = 0; i < cells; ++i) bad += check(i);
  } else {
    for (int i = 0; i < cells; ++i) bad += check(i);
  }
  return bad == 0;
}

}  // namespace

bool second_moment_certified(const MixtureSpec& spec, double beta, Exec exec) {
  return certified_on(spec, make_grid(spec), beta, exec);
}

double beta_2nd(const MixtureSpec& spec, double tol, Exec exec) {
  if (!(tol > 0.0 && tol <= 1e-3)) throw PreconditionError("tol must lie in (0, 1e-3]");
  const auto grid = make_grid(spec);
  double lo = 0.0;
  double hi;
  const double g2 = spec.gamma(2);
  if (g2 > 0.0) {
    hi = 1.0 / (g2 * std::sqrt(2.0));
  } else {
    hi = 1.0;
    while (certified_on(spec, grid, hi, exec)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) throw std::logic_error("beta_2nd: certification never fails");
    }
  }
  while (hi - lo > 0.5 * tol) {
    const double mid = 0.5 * (lo + hi);
    (certified_on(spec, grid, mid, exec) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double slice_log_measure(Domain domain, int n, double m) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  if (domain == Domain::hypercube) {
    const double k_real = (1.0 + m) * n / 2.0;
    const double k = std::round(k_real);
    if (std::fabs(k_real - k) > 1e-9 || k < 0 || k > n)
      throw PreconditionError("magnetization " + std::to_string(m) + " is not in the hypercube support");
    return log_binomial(n, static_cast<int>(k)) - n * std::numbers::ln2;
  }
  if (n < 2) throw PreconditionError("sphere slice density needs n >= 2");
  if (!(std::fabs(m) < 1.0)) throw PreconditionError("sphere magnetization must lie in (-1, 1)");
  return log_gamma(n / 2.0) - log_gamma((n - 1) / 2.0) - 0.5 * std::log(std::numbers::pi) +
         0.5 * (n - 3) * std::log1p(-m * m);
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

// log of the integral of exp(g) over [a, b] on one Gauss-Legendre panel
double log_panel(const auto& g, double a, double b) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  std::vector<double> vals;
  std::vector<double> logw;
  const auto& x = Gauss::abscissa();
  const auto& w = Gauss::weights();
  // boost stores the non-negative half of the nodes
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      vals.push_back(g(c));
      logw.push_back(std::log(w[i] * r));
    } else {
      vals.push_back(g(c + r * x[i]));
      logw.push_back(std::log(w[i] * r));
      vals.push_back(g(c - r * x[i]));
      logw.push_back(std::log(w[i] * r));
    }
  }
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] += logw[i];
  return log_sum_exp(vals);
}

double log_adaptive(const auto& g, double a, double b, double whole, int depth, std::vector<double>& pieces) {
  const double mid = 0.5 * (a + b);
  const double left = log_panel(g, a, mid), right = log_panel(g, mid, b);
  const double both[2] = {left, right};
  const double split = log_sum_exp(both);
  const bool converged = (!std::isfinite(whole) && !std::isfinite(split)) || std::fabs(std::expm1(split - whole)) < 1e-13;
  if (converged || depth >= 30) {
    pieces.push_back(split);
    return split;
  }
  log_adaptive(g, a, mid, left, depth + 1, pieces);
  log_adaptive(g, mid, b, right, depth + 1, pieces);
  return split;
}

}  // namespace

double curie_weiss_log_Z(const MixtureSpec& spec, int n, double b) {
  if (!(b >= 0.0)) throw PreconditionError("Curie-Weiss argument must be >= 0");
  if (n < 1) throw PreconditionError("n must be >= 1");
  if (b == 0.0) return 0.0;
  if (spec.domain() == Domain::hypercube) {
    std::vector<double> terms(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
      const double m = (2.0 * k - n) / n;
      terms[k] = log_binomial(n, k) - n * std::numbers::ln2 + b * n * spec.xi(m);
    }
    return log_sum_exp(terms);
  }
  if (n < 2) throw PreconditionError("sphere Curie-Weiss needs n >= 2");
  // m = cos(theta): density of theta on [0, pi] is sin^(n-2)(theta) / B((n-1)/2, 1/2)
  const double log_norm = log_gamma(n / 2.0) - log_gamma((n - 1) / 2.0) - 0.5 * std::log(std::numbers::pi);
  auto g = [&](double theta) {
    const double s = std::sin(theta);
    const double ls = n == 2 ? 0.0 : (s > 0.0 ? (n - 2) * std::log(s) : -kInf);
    return log_norm + ls + b * n * spec.xi(std::cos(theta));
  };
  constexpr int panels = 64;
  std::vector<double> pieces;
  for (int i = 0; i < panels; ++i) {
    const double a0 = std::numbers::pi * i / panels, a1 = std::numbers::pi * (i + 1) / panels;
    log_adaptive(g, a0, a1, log_panel(g, a0, a1), 0, pieces);
  }
  return log_sum_exp(pieces);
}

double rs_bound(const MixtureSpec& spec, double beta) {
  const double q = 2.0 * beta * beta * spec.gamma(2) * spec.gamma(2);
  if (!(q < 1.0)) throw PreconditionError("RS bound needs 2 beta^2 gamma_2^2 < 1");
  return -0.5 * std::log1p(-q);
}

CwBoundReport verify_cw_bound(const MixtureSpec& spec, const std::vector<int>& n_list,
                              const std::vector<double>& beta_grid, double c0) {
  const double b2nd = beta_2nd(spec);
  for (double beta : beta_grid)
    if (!(beta >= 0.0 && beta < b2nd)) throw PreconditionError("beta grid must lie in [0, beta_2nd)");
  CwBoundReport report;
  for (int n : n_list) {
    double previous = -kInf;
    std::vector<double> sorted = beta_grid;
    std::sort(sorted.begin(), sorted.end());
    for (double beta : sorted) {
      CwBoundEntry e;
      e.n = n;
      e.beta = beta;
      e.log_z = curie_weiss_log_Z(spec, n, beta * beta);
      e.bound = rs_bound(spec, beta);
      e.slack = e.log_z - e.bound;
      e.cap = c0 / std::sqrt(static_cast<double>(n));
      e.ok = e.slack <= e.cap;
      if (!e.ok) ++report.violations;
      if (e.log_z < previous - 1e-14 * std::max(1.0, std::fabs(previous))) report.monotone = false;
      previous = e.log_z;
      report.entries.push_back(e);
    }
  }
  return report;
}

double zero_count_bound(const MixtureSpec& spec, int n, double r, double R, double beta2nd) {
  if (!(r > 0.0)) throw PreconditionError("zero_count_bound needs r > 0");
  if (!(r < R)) throw PreconditionError("zero_count_bound needs r < R");
  if (!(R < beta2nd)) throw PreconditionError("zero_count_bound needs R < beta_2nd");
  return 0.5 * curie_weiss_log_Z(spec, n, R * R) / std::log(R / r);
}

double zero_count_bound(const MixtureSpec& spec, int n, double r, double R) {
  return zero_count_bound(spec, n, r, R, beta_2nd(spec));
}

}  // namespace spininterp
