#include <doctest.h>

#include <cmath>
#include <vector>

#include "spininterp/errors.hpp"
#include "spininterp/interp/interpolator.hpp"
#include "spininterp/oracle/enumeration.hpp"
#include "spininterp/threshold/threshold.hpp"

using namespace spininterp;

namespace {

// |estimate / Z - 1|: insensitive to the branch of the logarithm
double relative_error(const EstimateReport& r, const MixtureSpec& spec, const DisorderTensor& g) {
  const cplx exact = exact_Z_hypercube(spec, g, r.beta_star).value;
  return std::abs(r.estimate / exact - 1.0);
}

}  // namespace

TEST_CASE("truncation depth") {
  SUBCASE("brute force") {
    for (double r : {0.3, 0.8, 0.95}) {
      for (double L : {0.0, 2.0, 40.0}) {
        for (double eta : {1e-1, 1e-6}) {
          std::int64_t m = 0;
          while (2.0 * (std::numbers::pi + L) * std::pow(r, m + 1.0) / (1.0 - r) > eta) ++m;
          CHECK(truncation_depth(r, L, eta) == m);
        }
      }
    }
  }

  SUBCASE("examples") {
    // 4 pi 0.5^(m+1) <= 0.01 needs m + 1 >= 10.3
    CHECK(truncation_depth(0.5, 0.0, 0.01) == 10);
    CHECK(truncation_depth(0.01, 0.0, 1e3) == 0);
  }

  SUBCASE("log form for ratios near 1") {
    const double lambda = 1e-9;
    const double log10_m = log10_truncation_depth(std::log(lambda), 1.0, 1e-2);
    CHECK(log10_m == doctest::Approx(std::log10(std::log(2.0 * (std::numbers::pi + 1.0) / 1e-2 / lambda) / lambda))
                         .epsilon(1e-6));
    CHECK(log10_truncation_depth(-1e6, 1.0, 1e-2) > 4e5);
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(truncation_depth(1.0, 1.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(truncation_depth(0.5, -1.0, 0.1), PreconditionError);
    CHECK_THROWS_AS(truncation_depth(0.5, 1.0, 0.0), PreconditionError);
  }
}

TEST_CASE("log L bound") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();
  const auto g = build_disorder(sk, 10, 3);
  const auto zero = DisorderTensor::from_arrays(10, 0, {{2, std::vector<double>(100, 0.0)}});
  CHECK(log_L_bound(sk, zero, 0.9) == 0.0);
  CHECK(log_L_bound(sk, g, 0.0) == 0.0);
  CHECK(log_L_bound(sk, g, 0.8) == doctest::Approx(2.0 * log_L_bound(sk, g, 0.4)));
  const auto table = EnergyTable::build(sk, g);
  CHECK(log_L_bound(sk, g, 1.0) >= table.max_abs_energy());
  for (const cplx beta : {cplx(0.9, 0.0), cplx(0.0, 0.9), cplx(-0.6, 0.6)})
    CHECK(std::log(std::abs(table.partition(beta).value)) <= log_L_bound(sk, g, std::abs(beta)));
}

TEST_CASE("curve count and kappa") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();

  SUBCASE("n = 10 example") {
    const auto nk = select_N_kappa(sk, 10, 0.25, 0.3, 1.0);
    CHECK(nk.N == 13);
    CHECK(nk.kappa == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(nk.zero_bound == doctest::Approx(zero_count_bound(sk, 10, 0.75, 0.875, 1.0)));
    CHECK(nk.N == static_cast<int>(std::ceil(2.0 / 0.3 * nk.zero_bound)));
    // K solves log Z_CW((K beta_2nd)^2) / (2 log 3) = delta / 2
    CHECK(0.5 * curie_weiss_log_Z(sk, 10, nk.K * nk.K) / std::log(3.0) == doctest::Approx(0.15).epsilon(1e-9));
    CHECK(nk.kappa == doctest::Approx(nk.K / 3.0));
  }

  SUBCASE("n = 1000 against the large-n limit") {
    // zero bound -> -log(1 - 2 R^2 gamma_2^2) / (4 log(R/r)) with R = 0.9, r = 0.8
    const auto nk = select_N_kappa(sk, 1000, 0.2, 0.1, 1.0);
    const double limit = -std::log(1.0 - 0.81) / (4.0 * std::log(0.9 / 0.8));
    CHECK(nk.zero_bound == doctest::Approx(limit).epsilon(0.05));
    CHECK(nk.N == 71);
  }

  SUBCASE("more tolerance, fewer curves") {
    int previous = 1 << 30;
    for (double delta : {0.05, 0.1, 0.3, 0.6, 0.9}) {
      const auto nk = select_N_kappa(sk, 50, 0.25, delta, 1.0);
      CHECK(nk.N <= previous);
      CHECK(nk.N >= 1);
      previous = nk.N;
    }
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(select_N_kappa(sk, 10, 0.0, 0.3, 1.0), PreconditionError);
    CHECK_THROWS_AS(select_N_kappa(sk, 10, 0.2, 1.0, 1.0), PreconditionError);
  }
}

TEST_CASE("partition series paths agree") {
  const auto pure3 = MixtureSpec::pure(3);
  const auto g = build_disorder(pure3, 7, 2);
  EstimateOptions sweep, comb;
  sweep.moments = MomentPath::sweep;
  comb.moments = MomentPath::combinatorial;
  std::string used;
  const auto a = partition_series(pure3, g, 8, sweep, &used);
  CHECK(used == "sweep");
  const auto b = partition_series(pure3, g, 8, comb, &used);
  CHECK(used == "combinatorial");
  for (int j = 0; j <= 8; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-9 * std::max(1.0, std::abs(a[j])));
  CHECK(moment_path_from_string("auto") == MomentPath::automatic);
  CHECK_THROWS_AS(moment_path_from_string("fast"), PreconditionError);
}

TEST_CASE("densest ball") {
  const std::vector<cplx> est{0.0, 1.0, 1.05, 5.0, 1.1};
  const std::vector<int> ks{-2, -1, 0, 1, 2};
  const auto best = densest_ball(est, ks, 0.1);
  CHECK(best.count == 3);
  CHECK(ks[best.index] == 0);
  // all singletons: the tie goes to k = 0, then to the negative index
  const std::vector<cplx> spread{0.0, 10.0, 20.0};
  const std::vector<int> three{-1, 0, 1};
  CHECK(three[densest_ball(spread, three, 0.5).index] == 0);
  const std::vector<int> no_zero{1, -1, 2};
  CHECK(no_zero[densest_ball(spread, no_zero, 0.5).index] == -1);
  CHECK_THROWS_AS(densest_ball(std::vector<cplx>{}, std::vector<int>{}, 1.0), PreconditionError);
}

TEST_CASE("straight-line estimator") {
  const auto pure3 = MixtureSpec::pure(3);
  const auto g = build_disorder(pure3, 10, 9);

  SUBCASE("beta = 0") {
    const auto r = estimate_straightline(pure3, g, 0.0, 0.25, 1e-2);
    CHECK(std::abs(r.estimate - 1.0) < 1e-15);
  }

  SUBCASE("accuracy against enumeration") {
    const double b2 = beta_2nd(pure3);
    for (const cplx beta : {cplx(0.5, 0.0), cplx(0.3, 0.3), cplx(0.0, 0.6)}) {
      REQUIRE(std::abs(beta) <= 0.75 * b2);
      const auto r = estimate_straightline(pure3, g, beta, 0.25, 1e-2);
      CHECK(r.mode == "straight");
      CHECK(relative_error(r, pure3, g) < 1e-2);
    }
  }

  SUBCASE("conjugate symmetry") {
    const auto a = estimate_straightline(pure3, g, cplx(0.3, 0.3), 0.25, 1e-3);
    const auto b = estimate_straightline(pure3, g, cplx(0.3, -0.3), 0.25, 1e-3);
    CHECK(std::abs(a.estimate - std::conj(b.estimate)) < 1e-12 * std::abs(a.estimate));
  }

  SUBCASE("refusals") {
    const auto sk = MixtureSpec::sherrington_kirkpatrick();
    CHECK_THROWS_AS(estimate_straightline(sk, build_disorder(sk, 6, 1), 0.3, 0.25, 1e-2), PreconditionError);
    CHECK_THROWS_AS(estimate_straightline(pure3, g, 10.0, 0.25, 1e-2), PreconditionError);
    EstimateOptions tight;
    tight.max_degree = 2;
    CHECK_THROWS_AS(estimate_straightline(pure3, g, 0.3, 0.25, 1e-2, tight), BudgetExceeded);
  }
}

TEST_CASE("multicurve estimator") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();
  const auto g = build_disorder(sk, 10, 1);

  SUBCASE("beta = 0") {
    const auto r = estimate_multicurve(sk, g, 0.0, 0.25, 0.3, 1e-2);
    CHECK(r.estimate == cplx(1.0, 0.0));
  }

  SUBCASE("the standard schedule is refused with its cost") {
    try {
      estimate_multicurve(sk, g, 0.3, 0.25, 0.3, 1e-2);
      FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
      CHECK(e.log10_cost() > 1e6);
    }
  }

  SUBCASE("explicit parameters") {
    MulticurveSetup setup;
    setup.N = 2;
    setup.gamma = 0.35;
    setup.log_L_radius = 0.75;
    const auto r = estimate_multicurve_with(sk, g, 0.3, 1e-2, setup);
    CHECK(r.ks.size() == 5);
    CHECK(r.ball_count == 5);
    CHECK(r.k_star == 0);
    CHECK(relative_error(r, sk, g) < 1e-2);
    const cplx exact_log = std::log(exact_Z_hypercube(sk, g, 0.3).value);
    for (const cplx e : r.estimates) CHECK(std::abs(e - exact_log) < 1e-2 / 3.0);

    const auto again = estimate_multicurve_with(sk, g, 0.3, 1e-2, setup);
    CHECK(again.estimate == r.estimate);
  }

  SUBCASE("agrees with the straight line where both apply") {
    const auto pure3 = MixtureSpec::pure(3);
    const auto g3 = build_disorder(pure3, 8, 4);
    MulticurveSetup setup;
    setup.N = 1;
    setup.gamma = 0.35;
    setup.log_L_radius = 0.75;
    const auto curve = estimate_multicurve_with(pure3, g3, 0.4, 1e-2, setup);
    const auto line = estimate_straightline(pure3, g3, 0.4, 0.25, 1e-2);
    CHECK(std::abs(curve.estimate / line.estimate - 1.0) < 2e-2);
  }
}
