#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spininterp/model/disorder.hpp"
#include "spininterp/model/mixture.hpp"
#include "spininterp/series/series.hpp"
#include "spininterp/util/parallel.hpp"

namespace spininterp {

enum class MomentPath { automatic, sweep, combinatorial };

std::string_view to_string(MomentPath path);
MomentPath moment_path_from_string(std::string_view text);

struct EstimateOptions {
  MomentPath moments = MomentPath::automatic;
  /// refuse when log10 of the estimated work exceeds this
  double log10_work_budget = 10.0;
  /// refuse truncation depths above this
  std::int64_t max_degree = 4096;
  /// multicurve only: when > 0 and the densest ball holds fewer than N+1
  /// estimates, retry at up to five deterministic offsets of this size
  double jitter = 0.0;
  Exec exec = Exec::parallel;
};

struct EstimateReport {
  std::string mode;
  cplx beta_star;
  cplx beta_used;
  double eta = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t m = 0;
  double log_L = 0.0;
  int N = 0;
  double kappa = 0.0;
  double beta2nd = 0.0;
  double gamma = 0.0;
  double r_hat = 1.0;
  double log_r_hat_minus_one = 0.0;
  std::vector<int> ks;
  std::vector<cplx> estimates;
  int k_star = 0;
  int ball_count = 0;
  cplx estimate_logZ;
  cplx estimate;
  std::string moment_path;
  int jitter_attempts = 0;
  double wall_time = 0.0;
};

/// Smallest m >= 0 with 2 (pi + log_L) r^(m+1) / (1 - r) <= eta.
std::int64_t truncation_depth(double r_ratio, double log_L, double eta);
/// Same with r = exp(-lambda), for ratios too close to 1 to represent.
std::int64_t truncation_depth_log(double lambda, double log_L, double eta);
/// log10 of the depth for r = 1/r_hat given log(r_hat - 1); finite even when
/// r_hat - 1 underflows.
double log10_truncation_depth(double log_r_hat_minus_one, double log_L, double eta);

/// beta_max sum_p gamma_p / n^((p-1)/2) sum_alpha |G_alpha|, with an extra
/// factor n^(p/2) on the sphere where |sigma_i| <= sqrt(n). Bounds
/// log|Z(beta)/Z(0)| for |beta| <= beta_max.
double log_L_bound(const MixtureSpec& spec, const DisorderTensor& g, double beta_max);

struct NKappa {
  int N;
  double kappa;
  double zero_bound;  // the expected-zero-count bound behind N
  double K;
};

NKappa select_N_kappa(const MixtureSpec& spec, int n, double epsilon, double delta);
NKappa select_N_kappa(const MixtureSpec& spec, int n, double epsilon, double delta, double beta2nd);

/// Taylor coefficients E[H^j]/j!, j <= m, from the cheaper (or forced) path.
ComplexSeries partition_series(const MixtureSpec& spec, const DisorderTensor& g, int m,
                               const EstimateOptions& options, std::string* path_used = nullptr);

struct DensestBall {
  std::size_t index;
  int count;
};

/// Index whose closed ball of the given radius holds the most estimates;
/// ties go to the smallest |k|, then the smallest k.
DensestBall densest_ball(std::span<const cplx> estimates, std::span<const int> ks, double radius);

/// Taylor polynomial of log Z along the straight line; needs gamma_2 = 0.
EstimateReport estimate_straightline(const MixtureSpec& spec, const DisorderTensor& g, cplx beta_star,
                                     double epsilon, double eta, const EstimateOptions& options = {});

/// Densest-ball estimate over the 2N+1 curves on the standard parameter schedule.
EstimateReport estimate_multicurve(const MixtureSpec& spec, const DisorderTensor& g, double beta_star,
                                   double epsilon, double delta, double eta, const EstimateOptions& options = {});

/// Curve parameters supplied by the caller instead of the schedule.
struct MulticurveSetup {
  int N = 1;
  double gamma = 0.35;
  /// truncation depth; <= 0 picks it from the Taylor tail bound
  std::int64_t m = 0;
  /// log_L is taken over D(0, log_L_radius)
  double log_L_radius = 1.0;
};

EstimateReport estimate_multicurve_with(const MixtureSpec& spec, const DisorderTensor& g, double beta_star,
                                        double eta, const MulticurveSetup& setup,
                                        const EstimateOptions& options = {});

}  // namespace spininterp
