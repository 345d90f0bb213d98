#include "spininterp/curves/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "spininterp/errors.hpp"
#include "spininterp/util/special.hpp"

namespace spininterp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

BarvinokMap::BarvinokMap(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("Barvinok map needs gamma in (0, 1)");
  alpha_ = -std::expm1(-1.0 / gamma);
  r_hat_ = std::expm1(-1.0 - 1.0 / gamma) / std::expm1(-1.0 / gamma);
  // r_hat - 1 = exp(-1/gamma) (1 - 1/e) / alpha
  log_rhat_m1_ = -1.0 / gamma + std::log(-std::expm1(-1.0)) - std::log(alpha_);
  log_rhat_ = std::log1p(std::exp(log_rhat_m1_));
}

cplx BarvinokMap::operator()(cplx z) const {
  if (z == 0.0) return 0.0;
  // 1 - alpha z = (1 - z) + z exp(-1/gamma)
  const cplx log_b = std::log(z) - 1.0 / gamma_;
  const cplx one_minus = 1.0 - z;
  const cplx l = one_minus == 0.0 ? log_b : log_add_exp(std::log(one_minus), log_b);
  return -gamma_ * l;
}

cplx BarvinokMap::on_boundary(double theta) const {
  if (theta < 0.0 || theta > kPi) throw PreconditionError("boundary angle must lie in [0, pi]");
  // 1 - alpha r_hat e^{it} = (1 - e^{it}) + e^{it} exp(-1 - 1/gamma)
  const cplx log_b(-1.0 - 1.0 / gamma_, theta);
  if (theta == 0.0) return -gamma_ * log_b;
  const cplx log_a(std::log(2.0 * std::sin(0.5 * theta)), 0.5 * theta - 0.5 * kPi);
  return -gamma_ * log_add_exp(log_a, log_b);
}

cplx BarvinokMap::on_boundary_log(double log_theta) const {
  if (log_theta > -8.0) return on_boundary(std::exp(log_theta));
  const double theta = std::exp(log_theta);
  const cplx log_b(-1.0 - 1.0 / gamma_, theta);
  // 2 sin(theta/2) = theta (1 - theta^2/24 + ...)
  const cplx log_a(log_theta, 0.5 * theta - 0.5 * kPi);
  return -gamma_ * log_add_exp(log_a, log_b);
}

std::vector<cplx> BarvinokMap::boundary_polygon(int samples) const {
  if (samples < 8 || samples % 4 != 0) throw PreconditionError("boundary samples must be a positive multiple of 4");
  const int quarter = samples / 4;
  const double theta_c = 0.05;
  const double log_min = -1.0 - 1.0 / gamma_ - 8.0;
  const double log_c = std::log(theta_c);
  std::vector<cplx> upper;
  upper.reserve(static_cast<std::size_t>(2 * quarter));
  for (int i = 0; i < quarter; ++i) upper.push_back(on_boundary_log(log_min + (log_c - log_min) * i / quarter));
  for (int i = 0; i < quarter; ++i) upper.push_back(on_boundary(theta_c + (kPi - theta_c) * i / (quarter - 1)));
  std::vector<cplx> poly = upper;
  for (auto it = upper.rbegin(); it != upper.rend(); ++it) poly.push_back(std::conj(*it));
  return poly;
}

ComplexSeries barvinok_map_coeffs(double gamma, int m) {
  const BarvinokMap s(gamma);
  ComplexSeries c(m);
  double pw = 1.0;
  for (int k = 1; k <= m; ++k) {
    pw *= s.alpha();
    c[k] = gamma * pw / k;
  }
  return c;
}

MobiusArc::MobiusArc(cplx beta_star, int N, int k) : beta_star_(beta_star) {
  if (N < 0) throw PreconditionError("N must be >= 0");
  if (std::abs(k) > N + 1) throw PreconditionError("Mobius arc index must satisfy |k| <= N + 1");
  w_ = std::polar(1.0, kPi * k / (2.0 * (N + 1)));
}

ComplexSeries MobiusArc::coeffs(int m) const {
  ComplexSeries num(m), den(m);
  if (m >= 1) num[1] = beta_star_ * w_;
  den[0] = 1.0;
  if (m >= 1) den[1] = w_ - 1.0;
  return series_divide(num, den);
}

TubeRegion::TubeRegion(double a) : a_(a) {
  if (!(a > 0.0 && a < 1.0)) throw PreconditionError("tube parameter a must lie in (0, 1)");
  const double q = 1.0 - a * a;
  left_ = -a * a / q;
  right_ = 1.0 / q;
  radius_ = a / q;
}

double TubeRegion::distance(cplx u) const {
  // the stadium is the radius-neighbourhood of the segment [left, right]
  const double x = std::clamp(u.real(), left_, right_);
  return std::max(0.0, std::abs(u - cplx(x, 0.0)) - radius_);
}

bool TubeRegion::contains(cplx u, double slack) const { return distance(u) <= slack; }

std::vector<cplx> TubeRegion::boundary(int samples) const {
  if (samples < 8 || samples % 4 != 0) throw PreconditionError("boundary samples must be a positive multiple of 4");
  const int quarter = samples / 4;
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(samples));
  // bottom edge, right half circle, top edge, left half circle
  for (int i = 0; i < quarter; ++i) out.emplace_back(left_ + (right_ - left_) * i / quarter, -radius_);
  for (int i = 0; i < quarter; ++i)
    out.push_back(cplx(right_, 0.0) + std::polar(radius_, -0.5 * kPi + kPi * i / quarter));
  for (int i = 0; i < quarter; ++i) out.emplace_back(right_ - (right_ - left_) * i / quarter, radius_);
  for (int i = 0; i < quarter; ++i)
    out.push_back(cplx(left_, 0.0) + std::polar(radius_, 0.5 * kPi + kPi * i / quarter));
  return out;
}

cplx CurveFamily::exact(int k, cplx z) const {
  return MobiusArc(beta_star, N, k)(BarvinokMap(gamma)(z));
}

double epsilon_hat(double epsilon, double kappa, int N, double beta2nd) {
  if (N < 1) throw PreconditionError("N must be >= 1");
  double e = std::min(epsilon * beta2nd / (4.0 * N), kappa * beta2nd);
  e = std::min(e, 2.0 * kPi / (3.0 * (N + 1)) - 1e-12);
  return e;
}

namespace {

CurveFamily assemble(CurveFamily f, Exec exec) {
  const BarvinokMap s(f.gamma);
  f.r_hat = s.r_hat();
  f.log_r_hat_minus_one = s.log_r_hat_minus_one();
  const auto sc = barvinok_map_coeffs(f.gamma, f.m);
  f.curves.assign(static_cast<std::size_t>(2 * f.N + 1), ComplexSeries(f.m));
  const int count = 2 * f.N + 1;
  auto build = [&](int i) {
    const MobiusArc mu(f.beta_star, f.N, i - f.N);
    f.curves[static_cast<std::size_t>(i)] = series_compose(mu.coeffs(f.m), sc);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) build(i);
  } else {
    for (int i = 0; i < count; ++i) build(i);
  }
  return f;
}

}  // namespace

CurveFamily build_curve_family(const CurveParams& p, Exec exec) {
  if (!(p.beta2nd > 0.0)) throw PreconditionError("beta_2nd must be positive");
  if (!(p.epsilon > 0.0 && p.epsilon < 0.5)) throw PreconditionError("epsilon must lie in (0, 1/2)");
  if (!(p.beta_star >= 0.0 && p.beta_star < (1.0 - 2.0 * p.epsilon) * p.beta2nd))
    throw PreconditionError("beta* must lie in [0, (1 - 2 eps) beta_2nd)");
  if (!(p.kappa > 0.0 && p.kappa < 1.0)) throw PreconditionError("kappa must lie in (0, 1)");
  if (p.m < 0) throw PreconditionError("degree must be >= 0");
  CurveFamily f;
  f.beta_star = p.beta_star;
  f.N = p.N;
  f.epsilon = p.epsilon;
  f.delta = p.delta;
  f.kappa = p.kappa;
  f.beta2nd = p.beta2nd;
  f.eps_hat = epsilon_hat(p.epsilon, p.kappa, p.N, p.beta2nd);
  f.gamma = f.eps_hat * f.eps_hat / 64.0;
  f.a = f.eps_hat * f.eps_hat / 16.0;
  f.m = p.m;
  return assemble(std::move(f), exec);
}

CurveFamily build_curve_family_with_gamma(double beta_star, int N, double gamma, int m, double epsilon,
                                          double beta2nd, Exec exec) {
  if (N < 1) throw PreconditionError("N must be >= 1");
  if (m < 0) throw PreconditionError("degree must be >= 0");
  if (!(beta_star >= 0.0)) throw PreconditionError("beta* must be >= 0");
  CurveFamily f;
  f.beta_star = beta_star;
  f.N = N;
  f.epsilon = epsilon;
  f.beta2nd = beta2nd;
  f.gamma = gamma;
  f.a = 4.0 * gamma;
  f.eps_hat = 8.0 * std::sqrt(gamma);
  f.m = m;
  return assemble(std::move(f), exec);
}

namespace {

// Crossing-number point-in-polygon with edges bucketed by y.
class PolygonIndex {
 public:
  explicit PolygonIndex(std::vector<cplx> verts) : v_(std::move(verts)) {
    ymin_ = kInf;
    ymax_ = -kInf;
    for (auto z : v_) {
      ymin_ = std::min(ymin_, z.imag());
      ymax_ = std::max(ymax_, z.imag());
      xmin_ = std::min(xmin_, z.real());
      xmax_ = std::max(xmax_, z.real());
    }
    const double span = std::max(ymax_ - ymin_, 1e-300);
    scale_ = kBuckets / span;
    buckets_.resize(kBuckets);
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const cplx a = v_[i], b = v_[(i + 1) % v_.size()];
      const int b0 = bucket(std::min(a.imag(), b.imag()));
      const int b1 = bucket(std::max(a.imag(), b.imag()));
      for (int q = b0; q <= b1; ++q) buckets_[static_cast<std::size_t>(q)].push_back(static_cast<int>(i));
    }
  }

  bool inside(cplx p) const {
    if (p.imag() < ymin_ || p.imag() > ymax_ || p.real() < xmin_ || p.real() > xmax_) return false;
    bool in = false;
    for (int i : buckets_[static_cast<std::size_t>(bucket(p.imag()))]) {
      const cplx a = v_[static_cast<std::size_t>(i)], b = v_[(static_cast<std::size_t>(i) + 1) % v_.size()];
      if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
        const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
        if (p.real() < x) in = !in;
      }
    }
    return in;
  }

 private:
  static constexpr int kBuckets = 512;
  int bucket(double y) const {
    return std::clamp(static_cast<int>((y - ymin_) * scale_), 0, kBuckets - 1);
  }
  std::vector<cplx> v_;
  std::vector<std::vector<int>> buckets_;
  double ymin_, ymax_, xmin_ = kInf, xmax_ = -kInf, scale_;
};

void note(TubeCheck& c, double value, double limit, cplx where, const std::string& what) {
  c.worst = std::max(c.worst, value);
  if (value > limit && c.ok) {
    c.ok = false;
    c.witness = where;
    c.detail = what;
  }
}

void check_pairs(const std::vector<std::vector<cplx>>& polys, cplx beta_star, double r_ex, TubeCheck& check,
                 Exec exec) {
  const std::size_t count = polys.size();
  std::vector<PolygonIndex> index;
  index.reserve(count);
  for (const auto& p : polys) index.emplace_back(p);
  auto excluded = [&](cplx z) { return std::abs(z) < r_ex || std::abs(z - beta_star) < r_ex; };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t k = 0; k < count; ++k)
      if (j != k) pairs.emplace_back(j, k);
  std::vector<std::optional<cplx>> hit(pairs.size());
  auto run = [&](std::size_t q) {
    const auto [j, k] = pairs[q];
    for (auto z : polys[j])
      if (!excluded(z) && index[k].inside(z)) {
        hit[q] = z;
        return;
      }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t q = 0; q < static_cast<std::int64_t>(pairs.size()); ++q) run(static_cast<std::size_t>(q));
  } else {
    for (std::size_t q = 0; q < pairs.size(); ++q) run(q);
  }
  for (std::size_t q = 0; q < pairs.size(); ++q)
    if (hit[q] && check.ok) {
      check.ok = false;
      check.witness = *hit[q];
      check.detail = "curve " + std::to_string(pairs[q].first) + " enters curve " + std::to_string(pairs[q].second) +
                     " outside the excluded disks";
    }
}

double screen_separation(const std::vector<std::vector<cplx>>& polys, cplx beta_star, double r_ex) {
  constexpr double cell = 1e-3;
  struct Key {
    long long x, y;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    std::size_t operator()(const Key& k) const { return std::hash<long long>()(k.x * 1000003LL ^ k.y); }
  };
  std::unordered_map<Key, std::vector<std::pair<std::size_t, cplx>>, Hash> grid;
  for (std::size_t c = 0; c < polys.size(); ++c)
    for (auto z : polys[c]) {
      if (std::abs(z) < r_ex || std::abs(z - beta_star) < r_ex) continue;
      grid[{static_cast<long long>(std::floor(z.real() / cell)), static_cast<long long>(std::floor(z.imag() / cell))}]
          .push_back({c, z});
    }
  double best = kInf;
  for (const auto& [key, pts] : grid)
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({key.x + dx, key.y + dy});
        if (it == grid.end()) continue;
        for (const auto& [c1, z1] : pts)
          for (const auto& [c2, z2] : it->second)
            if (c1 != c2) {
              const double d = std::abs(z1 - z2);
              if (d < cell) best = std::min(best, d);
            }
      }
  return best;
}

}  // namespace

TubeReport certify_tubes(const CurveFamily& f, int samples, Exec exec) {
  if (!(f.a > 0.0 && f.a <= 0.5)) throw PreconditionError("tube parameter a outside (0, 1/2]");
  if (f.N + 1 > 2.0 * kPi / (6.0 * std::sqrt(f.a)))
    throw PreconditionError("N + 1 exceeds 2 pi / (6 sqrt a): outside the disjointness hypothesis");
  TubeReport rep;
  rep.samples = samples;
  const BarvinokMap s(f.gamma);
  const TubeRegion ua(f.a);
  const auto s_poly = s.boundary_polygon(samples);
  const auto ua_poly = ua.boundary(samples);
  const double tol = 1e-12;

  for (auto u : s_poly) note(rep.barvinok_in_ua, ua.distance(u), tol, u, "S_gamma boundary sample outside U_a");

  const int count = 2 * f.N + 1;
  std::vector<std::vector<cplx>> curve_polys(static_cast<std::size_t>(count)), tube_polys(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const MobiusArc mu(f.beta_star, f.N, i - f.N);
    for (auto u : s_poly) curve_polys[static_cast<std::size_t>(i)].push_back(mu(u));
    for (auto u : ua_poly) tube_polys[static_cast<std::size_t>(i)].push_back(mu(u));
  }
  const double r_ex = 4.0 * std::sqrt(f.a);
  check_pairs(curve_polys, f.beta_star, r_ex, rep.curves_disjoint, exec);
  check_pairs(tube_polys, f.beta_star, r_ex, rep.tubes_disjoint, exec);
  rep.min_separation = screen_separation(curve_polys, f.beta_star, r_ex);

  const double outer = (1.0 - f.epsilon) * f.beta2nd;
  const double bound = std::abs(f.beta_star) + r_ex;
  double max_abs = 0.0;
  for (const auto& poly : curve_polys)
    for (auto z : poly) {
      max_abs = std::max(max_abs, std::abs(z));
      if (f.beta2nd > 0.0) note(rep.contained, std::abs(z) - outer, -1e-300, z, "curve sample outside D(0, (1-eps) beta_2nd)");
      note(rep.bounded, std::abs(z) - bound, 0.0, z, "curve sample outside D(0, |beta*| + 4 sqrt a)");
    }
  rep.contained.worst = max_abs;
  rep.bounded.worst = max_abs;
  if (f.beta2nd <= 0.0) rep.contained.detail = "skipped: no beta_2nd";

  for (auto u : ua_poly) {
    const cplx z = u / (1.0 - u);
    const cplx zi = 1.0 / std::conj(z);
    const cplx back = zi / (1.0 + zi);
    note(rep.inversion, ua.distance(back), 1e-9, u, "inversion image leaves phi(U_a)");
  }

  // Cauchy estimate on |z| = r_hat: |c_j| <= max|l_k| r_hat^-j
  const double log_rhat = s.log_r_hat();
  for (int i = 0; i < count; ++i) {
    const auto& c = f.curves.empty() ? ComplexSeries(0) : f.curves[static_cast<std::size_t>(i)];
    double kmax = 0.0;
    for (auto z : curve_polys[static_cast<std::size_t>(i)]) kmax = std::max(kmax, std::abs(z));
    for (int j = 1; j <= c.degree(); ++j) {
      const double env = kmax * std::exp(-j * log_rhat);
      note(rep.envelope, std::abs(c[j]) / env, 1.0 + 1e-6, c[j], "coefficient above the Cauchy envelope");
    }
  }
  return rep;
}

void write_curves_csv(const CurveFamily& f, int samples, std::ostream& out) {
  out << "kind,k,index,re,im\n";
  char buf[128];
  const BarvinokMap s(f.gamma);
  const TubeRegion ua(f.a);
  const auto ua_poly = ua.boundary(samples);
  const auto s_poly = s.boundary_polygon(samples);
  for (int k = -f.N; k <= f.N; ++k) {
    const MobiusArc mu(f.beta_star, f.N, k);
    for (int i = 0; i <= samples; ++i) {
      const cplx z = mu(static_cast<double>(i) / samples);
      std::snprintf(buf, sizeof buf, "curve,%d,%d,%.17g,%.17g\n", k, i, z.real(), z.imag());
      out << buf;
    }
    for (std::size_t i = 0; i < ua_poly.size(); ++i) {
      const cplx z = mu(ua_poly[i]);
      std::snprintf(buf, sizeof buf, "tube,%d,%zu,%.17g,%.17g\n", k, i, z.real(), z.imag());
      out << buf;
    }
    for (std::size_t i = 0; i < s_poly.size(); ++i) {
      const cplx z = mu(s_poly[i]);
      std::snprintf(buf, sizeof buf, "image,%d,%zu,%.17g,%.17g\n", k, i, z.real(), z.imag());
      out << buf;
    }
  }
}

}  // namespace spininterp
