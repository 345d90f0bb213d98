#pragma once

#include <span>
#include <vector>

#include "spininterp/model/disorder.hpp"
#include "spininterp/model/mixture.hpp"
#include "spininterp/util/parallel.hpp"

namespace spininterp {

enum class MomentMethod {
  /// Ordered tuples grouped by their exponent signature (parity vector on the
  /// hypercube, exponent vector on the sphere); a k-step convolution over
  /// signatures. Same sum as the literal enumeration, regrouped.
  grouped,
  /// Every map phi:[k] -> orders and every tuple sequence, one by one.
  literal,
};

struct MomentOptions {
  MomentMethod method = MomentMethod::grouped;
  /// Refuse when log10 of the estimated work exceeds this.
  double log10_work_budget = 10.0;
  Exec exec = Exec::parallel;
};

/// log10 of the estimated operation count for moments up to k_max.
double log10_moment_work(const MixtureSpec& spec, int n, int k_max, MomentMethod method);

/// E_sigma[H^k] for k = 0..k_max, exact up to rounding.
std::vector<double> moments_combinatorial(const MixtureSpec& spec, const DisorderTensor& g, int k_max,
                                          const MomentOptions& options = {});

/// E[prod_i sigma_i^{a_i}] under the uniform law on the sphere |sigma|^2 = n.
/// All exponents must be even.
double sphere_monomial_expectation(int n, std::span<const int> exponents);

}  // namespace spininterp
