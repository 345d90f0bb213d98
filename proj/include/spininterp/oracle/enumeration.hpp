#pragma once

#include <complex>
#include <span>
#include <vector>

#include "spininterp/model/disorder.hpp"
#include "spininterp/model/mixture.hpp"
#include "spininterp/util/parallel.hpp"

namespace spininterp {

using cplx = std::complex<double>;

inline constexpr int kDefaultEnumerationCap = 22;

struct ValueAndDerivative {
  cplx value;
  cplx derivative;
};

/// H(sigma) for all 2^n hypercube configurations, stored in Gray-code order.
///
/// The p = 2 part is updated incrementally through local fields (O(n) per
/// flip); higher orders are recomputed per configuration. Every block of 256
/// consecutive Gray indices starts from an exact recomputation, so serial and
/// parallel sweeps produce bitwise identical tables.
class EnergyTable {
 public:
  static EnergyTable build(const MixtureSpec& spec, const DisorderTensor& g, Exec exec = Exec::parallel,
                           int cap = kDefaultEnumerationCap);

  int n() const { return n_; }
  std::span<const double> energies() const { return energies_; }
  double max_abs_energy() const { return max_abs_; }

  /// Z(beta) = 2^-n sum exp(beta H) and Z'(beta) = 2^-n sum H exp(beta H),
  /// Kahan-summed over fixed chunks.
  ValueAndDerivative partition(cplx beta, Exec exec = Exec::parallel) const;
  /// log Z for real beta, shifted to avoid overflow.
  double log_partition(double beta) const;
  /// E[H^k], k = 0..k_max.
  std::vector<double> moments(int k_max, Exec exec = Exec::parallel) const;
  /// E[H^k]/k!, k = 0..m: Taylor coefficients of Z at 0.
  std::vector<double> taylor_coefficients(int m, Exec exec = Exec::parallel) const;

 private:
  int n_ = 0;
  double max_abs_ = 0.0;
  std::vector<double> energies_;
};

/// The Gray-code configuration at step i: sigma_j = -1 iff bit j of i ^ (i >> 1).
std::vector<double> gray_configuration(int n, std::uint64_t i);

ValueAndDerivative exact_Z_hypercube(const MixtureSpec& spec, const DisorderTensor& g, cplx beta,
                                     Exec exec = Exec::parallel, int cap = kDefaultEnumerationCap);

std::vector<double> exact_moments_hypercube(const MixtureSpec& spec, const DisorderTensor& g, int k_max,
                                            Exec exec = Exec::parallel, int cap = kDefaultEnumerationCap);

/// Z as its Taylor polynomial, with the degree chosen so the remainder is
/// below `tail` for |beta| <= radius (from max |H| of the table).
class TaylorPartition {
 public:
  TaylorPartition(const EnergyTable& table, double radius, double tail = 1e-17);

  ValueAndDerivative operator()(cplx beta) const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double radius() const { return radius_; }

 private:
  std::vector<double> coeffs_;
  double radius_;
};

}  // namespace spininterp
