#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "spininterp/series/series.hpp"
#include "spininterp/util/parallel.hpp"

namespace spininterp {

/// S_gamma(z) = -gamma log(1 - alpha z), alpha = 1 - exp(-1/gamma).
/// Maps D(0, r_hat) into a thin neighbourhood of [0, 1] with S(0) = 0, S(1) = 1.
class BarvinokMap {
 public:
  explicit BarvinokMap(double gamma);

  double gamma() const { return gamma_; }
  double alpha() const { return alpha_; }
  /// (1 - exp(-1-1/gamma)) / (1 - exp(-1/gamma)); rounds to 1 for small gamma.
  double r_hat() const { return r_hat_; }
  /// log(r_hat - 1), finite even when r_hat - 1 underflows.
  double log_r_hat_minus_one() const { return log_rhat_m1_; }
  /// log(r_hat), accurate for r_hat close to 1 (may underflow to 0).
  double log_r_hat() const { return log_rhat_; }

  cplx operator()(cplx z) const;
  /// S(r_hat e^{i theta}) for theta in [0, pi], without forming r_hat.
  cplx on_boundary(double theta) const;
  /// Same for theta = exp(log_theta) in the upper half.
  cplx on_boundary_log(double log_theta) const;
  /// Closed boundary polygon of S(D(0, r_hat)) with `samples` vertices:
  /// a log-spaced arm near theta = 0, a uniform arm up to pi, then the
  /// conjugate half in reverse.
  std::vector<cplx> boundary_polygon(int samples) const;

 private:
  double gamma_, alpha_, r_hat_, log_rhat_m1_, log_rhat_;
};

/// Taylor coefficients gamma alpha^k / k of S_gamma, constant term 0.
ComplexSeries barvinok_map_coeffs(double gamma, int m);

/// mu_k(z) = beta* w z / (1 - z + w z), w = exp(i pi k / (2(N+1))).
class MobiusArc {
 public:
  MobiusArc(cplx beta_star, int N, int k);

  cplx w() const { return w_; }
  cplx operator()(cplx z) const { return beta_star_ * w_ * z / (1.0 - z + w_ * z); }
  cplx derivative(cplx z) const {
    const cplx d = 1.0 - z + w_ * z;
    return beta_star_ * w_ / (d * d);
  }
  /// Taylor coefficients by truncated series division.
  ComplexSeries coeffs(int m) const;

 private:
  cplx beta_star_;
  cplx w_;
};

/// The stadium U_a = D1 u T u D2 with
///   D1 = D(-a^2/(1-a^2), a/(1-a^2)), D2 = D(1/(1-a^2), a/(1-a^2)),
///   T  = [-a^2/(1-a^2), 1/(1-a^2)] x [-a/(1-a^2), a/(1-a^2)].
class TubeRegion {
 public:
  explicit TubeRegion(double a);
  double a() const { return a_; }
  bool contains(cplx u, double slack = 0.0) const;
  /// Euclidean distance to the set (0 inside).
  double distance(cplx u) const;
  /// `samples` points along the boundary, counter-clockwise.
  std::vector<cplx> boundary(int samples) const;

 private:
  double a_, left_, right_, radius_;
};

struct CurveFamily {
  cplx beta_star;
  int N = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double kappa = 0.0;
  double beta2nd = 0.0;
  double eps_hat = 0.0;
  double gamma = 0.0;
  double a = 0.0;
  double r_hat = 1.0;
  double log_r_hat_minus_one = 0.0;
  int m = 0;
  /// l_k = mu_k o S_gamma to degree m, k = -N..N
  std::vector<ComplexSeries> curves;

  const ComplexSeries& curve(int k) const { return curves.at(static_cast<std::size_t>(k + N)); }
  /// Closed-form mu_k(S_gamma(z)).
  cplx exact(int k, cplx z) const;
};

struct CurveParams {
  double beta_star;
  double epsilon;
  double delta;
  double kappa;
  int N;
  int m;
  double beta2nd;
};

/// min(eps beta2nd / (4N), kappa beta2nd), shrunk below 2 pi / (3(N+1)).
double epsilon_hat(double epsilon, double kappa, int N, double beta2nd);

/// Family on the standard schedule gamma = eps_hat^2/64, a = eps_hat^2/16.
CurveFamily build_curve_family(const CurveParams& params, Exec exec = Exec::parallel);

/// Family with an explicit gamma (a = 4 gamma, eps_hat = 8 sqrt(gamma)).
CurveFamily build_curve_family_with_gamma(double beta_star, int N, double gamma, int m, double epsilon,
                                          double beta2nd, Exec exec = Exec::parallel);

struct TubeCheck {
  bool ok = true;
  double worst = 0.0;
  std::optional<cplx> witness;
  std::string detail;
};

struct TubeReport {
  TubeCheck barvinok_in_ua;   // S_gamma boundary inside U_a
  TubeCheck curves_disjoint;  // l_j, l_k images meet only near 0 and beta*
  TubeCheck tubes_disjoint;   // mu_j(U_a), mu_k(U_a) likewise
  TubeCheck contained;        // images inside D(0, (1-eps) beta2nd)
  TubeCheck bounded;          // images inside D(0, |beta*| + 4 sqrt a)
  TubeCheck inversion;        // phi(U_a) invariant under z -> 1/conj(z)
  TubeCheck envelope;         // |c_j| <= max|l_k| r_hat^-j
  /// smallest distance between samples of different curves outside the
  /// excluded disks, when below the 1e-3 screening resolution; +inf otherwise
  double min_separation = 0.0;
  int samples = 0;

  bool all_ok() const {
    return barvinok_in_ua.ok && curves_disjoint.ok && tubes_disjoint.ok && contained.ok && bounded.ok &&
           inversion.ok && envelope.ok;
  }
};

/// Sampling-based check of the tube geometry. Throws PreconditionError when
/// the family lies outside the disjointness hypothesis N+1 <= 2 pi/(6 sqrt a).
TubeReport certify_tubes(const CurveFamily& family, int samples = 4096, Exec exec = Exec::parallel);

/// Sampled curve paths l_k(t), t in [0,1] real, and tube outlines mu_k(boundary U_a),
/// as CSV rows kind,k,index,re,im.
void write_curves_csv(const CurveFamily& family, int samples, std::ostream& out);

}  // namespace spininterp
