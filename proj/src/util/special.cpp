#include "spininterp/util/special.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "spininterp/errors.hpp"

namespace spininterp {

double log_gamma(double x) {
  if (!(x > 0.0)) throw PreconditionError("log_gamma needs a positive argument");
  return boost::math::lgamma(x);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

std::complex<double> log_add_exp(std::complex<double> a, std::complex<double> b) {
  if (a.real() < b.real()) std::swap(a, b);
  if (a.real() == -std::numeric_limits<double>::infinity()) return a;
  const std::complex<double> w = std::exp(b - a);
  // log(1 + w), accurate for small |w|
  const std::complex<double> one_plus = 1.0 + w;
  std::complex<double> l = std::log(one_plus);
  if (std::abs(w) < 1e-4) l = w - w * w / 2.0 + w * w * w / 3.0 - w * w * w * w / 4.0;
  return a + l;
}

}  // namespace spininterp
