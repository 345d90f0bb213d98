#include "spininterp/oracle/sphere_series.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spininterp/errors.hpp"
#include "spininterp/util/special.hpp"

namespace spininterp {

SphereSeriesValue sphere_Z_series(const MixtureSpec& spec, const DisorderTensor& g, std::complex<double> beta,
                                  int k_max, const MomentOptions& options) {
  if (spec.domain() != Domain::sphere) throw PreconditionError("sphere_Z_series needs the sphere domain");
  if (k_max < 0) throw PreconditionError("k_max must be >= 0");
  if (beta == 0.0) return {1.0, 0.0, true};
  const auto moments = moments_combinatorial(spec, g, k_max, options);
  std::vector<std::complex<double>> terms(moments.size());
  for (std::size_t k = 0; k < moments.size(); ++k) {
    const double logfact = log_gamma(static_cast<double>(k) + 1.0);
    terms[k] = moments[k] * std::exp(-logfact) * std::pow(beta, static_cast<double>(k));
  }
  std::complex<double> value{};
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) value += *it;

  std::vector<std::size_t> nonzero;
  for (std::size_t k = terms.size(); k-- > 0 && nonzero.size() < 3;)
    if (std::abs(terms[k]) > 0.0) nonzero.push_back(k);
  if (nonzero.size() < 3) return {value, 0.0, true};
  const auto c = nonzero[0], b = nonzero[1], a = nonzero[2];
  const double rate1 = std::pow(std::abs(terms[c]) / std::abs(terms[b]), 1.0 / static_cast<double>(c - b));
  const double rate2 = std::pow(std::abs(terms[b]) / std::abs(terms[a]), 1.0 / static_cast<double>(b - a));
  const double rate = std::max(rate1, rate2);
  if (!(rate < 1.0)) return {value, INFINITY, false};
  return {value, std::abs(terms[c]) * rate / (1.0 - rate), true};
}

}  // namespace spininterp
