#pragma once

#include <complex>
#include <span>

namespace spininterp {

/// log Gamma(x) for x > 0 (Boost.Math Lanczos approximation, thread-safe).
double log_gamma(double x);

/// log C(n, k).
double log_binomial(int n, int k);

/// log(sum exp(v)) with max shifting; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// Principal log of exp(a) + exp(b) for complex a, b.
std::complex<double> log_add_exp(std::complex<double> a, std::complex<double> b);

}  // namespace spininterp
