#include "spininterp/model/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spininterp/errors.hpp"
#include "spininterp/util/summation.hpp"

namespace spininterp {

void validate_configuration(const Configuration& sigma, Domain domain, int n) {
  if (sigma.n() != n)
    throw PreconditionError("configuration has length " + std::to_string(sigma.n()) + ", expected " +
                            std::to_string(n));
  if (domain == Domain::hypercube) {
    for (double s : sigma.coords)
      if (s != 1.0 && s != -1.0) throw PreconditionError("hypercube coordinates must be +-1");
  } else {
    const double norm2 = std::inner_product(sigma.coords.begin(), sigma.coords.end(), sigma.coords.begin(), 0.0);
    if (!(std::fabs(norm2 - n) <= 1e-10 * n)) throw PreconditionError("sphere configuration must have |sigma|^2 = n");
  }
}

double order_sum(std::span<const double> couplings, int n, int p, std::span<const double> sigma,
                 std::vector<double>& scratch) {
  if (p == 1) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += couplings[i] * sigma[i];
    return acc;
  }
  std::size_t rows = couplings.size() / static_cast<std::size_t>(n);
  scratch.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = couplings.data() + r * n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += row[i] * sigma[i];
    scratch[r] = acc;
  }
  for (int level = 1; level < p; ++level) {
    const std::size_t next = rows / static_cast<std::size_t>(n);
    for (std::size_t r = 0; r < next; ++r) {
      const double* row = scratch.data() + r * n;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += row[i] * sigma[i];
      scratch[r] = acc;
    }
    rows = next;
  }
  return scratch[0];
}

namespace {

double order_term_impl(const MixtureSpec& spec, const DisorderTensor& g, int p, std::span<const double> sigma,
                       std::vector<double>& scratch) {
  const auto c = g.couplings(p);
  if (c.empty()) throw PreconditionError("disorder has no couplings for order " + std::to_string(p));
  const int n = g.n();
  return spec.gamma(p) / std::pow(static_cast<double>(n), 0.5 * (p - 1)) * order_sum(c, n, p, sigma, scratch);
}

}  // namespace

double order_term(const MixtureSpec& spec, const DisorderTensor& g, int p, std::span<const double> sigma) {
  if (static_cast<int>(sigma.size()) != g.n()) throw PreconditionError("configuration length does not match n");
  std::vector<double> scratch;
  return order_term_impl(spec, g, p, sigma, scratch);
}

double hamiltonian_unchecked(const MixtureSpec& spec, const DisorderTensor& g, std::span<const double> sigma) {
  if (static_cast<int>(sigma.size()) != g.n()) throw PreconditionError("configuration length does not match n");
  std::vector<double> scratch;
  double h = 0.0;
  for (int p : spec.active_orders()) h += order_term_impl(spec, g, p, sigma, scratch);
  return h;
}

double hamiltonian(const MixtureSpec& spec, const DisorderTensor& g, const Configuration& sigma) {
  validate_configuration(sigma, spec.domain(), g.n());
  return hamiltonian_unchecked(spec, g, sigma.coords);
}

CovarianceEstimate empirical_covariance_check(const MixtureSpec& spec, int n, std::span<const std::uint64_t> seeds,
                                              const Configuration& tau, const Configuration& sigma, Exec exec) {
  validate_configuration(tau, spec.domain(), n);
  validate_configuration(sigma, spec.domain(), n);
  if (seeds.size() < 1000) throw PreconditionError("covariance check needs at least 1000 seeds");
  constexpr std::int64_t chunks = 64;
  std::vector<CompensatedSum> sum(chunks), sum_sq(chunks);
  const auto total = static_cast<std::uint64_t>(seeds.size());
  auto run_chunk = [&](std::int64_t c) {
    const auto range = chunk_range(total, chunks, static_cast<std::uint64_t>(c));
    for (auto i = range.begin; i < range.end; ++i) {
      const auto g = build_disorder(spec, n, seeds[i], Exec::serial);
      const double prod = hamiltonian_unchecked(spec, g, tau.coords) * hamiltonian_unchecked(spec, g, sigma.coords);
      sum[c].add(prod);
      sum_sq[c].add(prod * prod);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  }
  CompensatedSum s, s2;
  for (std::int64_t c = 0; c < chunks; ++c) {
    s.add(sum[c]);
    s2.add(sum_sq[c]);
  }
  const double count = static_cast<double>(total);
  const double mean = s.value() / count;
  const double var = std::max(0.0, (s2.value() / count - mean * mean) * count / (count - 1.0));
  const double overlap =
      std::inner_product(tau.coords.begin(), tau.coords.end(), sigma.coords.begin(), 0.0) / static_cast<double>(n);
  return {mean, n * spec.xi(overlap), std::sqrt(var / count), seeds.size()};
}

}  // namespace spininterp
