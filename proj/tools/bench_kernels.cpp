#include <chrono>
#include <functional>

#include "cli.hpp"
#include "spininterp/model/disorder.hpp"
#include "spininterp/oracle/enumeration.hpp"
#include "spininterp/oracle/second_moment.hpp"
#include "spininterp/series/moments.hpp"
#include "spininterp/threshold/threshold.hpp"

namespace spininterp::cli {

namespace {

template <class Result>
BenchEntry time_pair(const std::string& name, int repeat, const std::function<Result(Exec)>& kernel) {
  auto best = [&](Exec exec, Result& out) {
    double fastest = 1e300;
    for (int r = 0; r < repeat; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      out = kernel(exec);
      fastest = std::min(fastest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return fastest;
  };
  Result serial{}, parallel{};
  const double ts = best(Exec::serial, serial);
  const double tp = best(Exec::parallel, parallel);
  return {name, ts, tp, serial == parallel};
}

}  // namespace

std::vector<BenchEntry> run_benchmarks(int repeat) {
  const MixtureSpec sk = MixtureSpec::sherrington_kirkpatrick();
  const MixtureSpec p3 = MixtureSpec::pure(3);
  const DisorderTensor g_sk = build_disorder(sk, 20, 1);
  const DisorderTensor g_p3 = build_disorder(p3, 10, 1);
  std::vector<BenchEntry> rows;

  rows.push_back(time_pair<std::vector<double>>("energy_sweep_sk_n20", repeat, [&](Exec e) {
    const auto t = EnergyTable::build(sk, g_sk, e);
    return std::vector<double>(t.energies().begin(), t.energies().end());
  }));
  const EnergyTable table = EnergyTable::build(sk, g_sk);
  rows.push_back(time_pair<cplx>("partition_sk_n20", repeat,
                                 [&](Exec e) { return table.partition(cplx(0.5, 0.3), e).value; }));
  rows.push_back(time_pair<std::vector<double>>("moments_dp_pure3_n10_k10", repeat, [&](Exec e) {
    MomentOptions opt;
    opt.exec = e;
    return moments_combinatorial(p3, g_p3, 10, opt);
  }));
  rows.push_back(time_pair<double>("beta2nd_grid_pure3", repeat, [&](Exec e) { return beta_2nd(p3, 1e-9, e); }));
  rows.push_back(time_pair<double>("second_moment_mc_sk_n10", repeat, [&](Exec e) {
    return second_moment_identity_check(sk, 10, 0.6, 2000, 1, e).mc_ratio;
  }));
  return rows;
}

}  // namespace spininterp::cli
