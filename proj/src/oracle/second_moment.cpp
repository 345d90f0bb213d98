#include "spininterp/oracle/second_moment.hpp"

#include <cmath>
#include <vector>

#include "spininterp/errors.hpp"
#include "spininterp/model/disorder.hpp"
#include "spininterp/oracle/enumeration.hpp"
#include "spininterp/threshold/threshold.hpp"
#include "spininterp/util/summation.hpp"

namespace spininterp {

SecondMomentEstimate second_moment_identity_check(const MixtureSpec& spec, int n, double beta,
                                                  std::uint64_t num_seeds, std::uint64_t first_seed, Exec exec) {
  if (spec.domain() != Domain::hypercube) throw PreconditionError("second-moment check needs the hypercube");
  if (num_seeds < 1000) throw PreconditionError("second-moment check needs at least 1000 seeds");
  if (n > kDefaultEnumerationCap) throw CapacityError("second-moment check needs n within the enumeration cap");
  const double cw = std::exp(curie_weiss_log_Z(spec, n, beta * beta));
  if (beta == 0.0) return {1.0, cw, 0.0, num_seeds};
  const double log_mean_z = 0.5 * n * spec.xi_one() * beta * beta;
  constexpr std::int64_t chunks = 128;
  std::vector<CompensatedSum> sum(chunks), sum_sq(chunks);
  auto run = [&](std::int64_t c) {
    const auto r = chunk_range(num_seeds, chunks, static_cast<std::uint64_t>(c));
    for (auto i = r.begin; i < r.end; ++i) {
      const auto g = build_disorder(spec, n, first_seed + i, Exec::serial);
      const auto table = EnergyTable::build(spec, g, Exec::serial);
      const double ratio = std::exp(2.0 * (table.log_partition(beta) - log_mean_z));
      sum[c].add(ratio);
      sum_sq[c].add(ratio * ratio);
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < chunks; ++c) run(c);
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) run(c);
  }
  CompensatedSum s, s2;
  for (std::int64_t c = 0; c < chunks; ++c) {
    s.add(sum[c]);
    s2.add(sum_sq[c]);
  }
  const double count = static_cast<double>(num_seeds);
  const double mean = s.value() / count;
  const double var = std::max(0.0, (s2.value() / count - mean * mean) * count / (count - 1.0));
  return {mean, cw, std::sqrt(var / count), num_seeds};
}

}  // namespace spininterp
