#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spininterp/model/disorder.hpp"
#include "spininterp/model/mixture.hpp"

namespace spininterp {

struct Configuration {
  std::vector<double> coords;
  int n() const { return static_cast<int>(coords.size()); }
};

/// Throws PreconditionError unless sigma lies in the domain with dimension n.
void validate_configuration(const Configuration& sigma, Domain domain, int n);

/// sum over all ordered p-tuples of G_alpha prod_j sigma_{alpha_j}, contracted
/// from the last index inward (row-major). `scratch` is resized as needed.
double order_sum(std::span<const double> couplings, int n, int p, std::span<const double> sigma,
                 std::vector<double>& scratch);

/// gamma_p / n^((p-1)/2) times order_sum for one order.
double order_term(const MixtureSpec& spec, const DisorderTensor& g, int p, std::span<const double> sigma);

/// H_G(sigma) without the domain check (internal test hook).
double hamiltonian_unchecked(const MixtureSpec& spec, const DisorderTensor& g, std::span<const double> sigma);

double hamiltonian(const MixtureSpec& spec, const DisorderTensor& g, const Configuration& sigma);

struct CovarianceEstimate {
  double sample_cov;
  double predicted;
  double standard_error;
  std::size_t samples;
};

/// Mean of H(tau) H(sigma) over the seeds (H is centered), its standard error,
/// and n xi(<tau,sigma>/n).
CovarianceEstimate empirical_covariance_check(const MixtureSpec& spec, int n, std::span<const std::uint64_t> seeds,
                                              const Configuration& tau, const Configuration& sigma,
                                              Exec exec = Exec::parallel);

}  // namespace spininterp
