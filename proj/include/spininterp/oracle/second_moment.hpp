#pragma once

#include <cstdint>

#include "spininterp/model/mixture.hpp"
#include "spininterp/util/parallel.hpp"

namespace spininterp {

struct SecondMomentEstimate {
  double mc_ratio;  // sample mean of Z^2 / E[Z]^2
  double cw_value;  // Z_CW(beta^2)
  double standard_error;
  std::uint64_t samples;
};

/// Monte Carlo estimate of E_G[Z^2]/E_G[Z]^2 over disorder seeds
/// first_seed .. first_seed + num_seeds - 1, with E_G[Z] = exp(n xi(1) beta^2 / 2).
SecondMomentEstimate second_moment_identity_check(const MixtureSpec& spec, int n, double beta,
                                                  std::uint64_t num_seeds, std::uint64_t first_seed = 1,
                                                  Exec exec = Exec::parallel);

}  // namespace spininterp
