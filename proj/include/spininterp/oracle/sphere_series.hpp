#pragma once

#include <complex>

#include "spininterp/model/disorder.hpp"
#include "spininterp/model/mixture.hpp"
#include "spininterp/series/moments.hpp"

namespace spininterp {

struct SphereSeriesValue {
  std::complex<double> value;
  /// geometric extrapolation of the remaining terms from the last three nonzero ones
  double tail_estimate;
  /// false when the terms are not decaying at k_max
  bool conclusive;
};

/// sum_{k <= k_max} beta^k E[H^k]/k! on the sphere, moments from the
/// combinatorial Gamma-formula path.
SphereSeriesValue sphere_Z_series(const MixtureSpec& spec, const DisorderTensor& g, std::complex<double> beta,
                                  int k_max, const MomentOptions& options = {});

}  // namespace spininterp
