#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "spininterp/errors.hpp"
#include "spininterp/model/disorder.hpp"
#include "spininterp/model/hamiltonian.hpp"
#include "spininterp/oracle/enumeration.hpp"
#include "spininterp/oracle/second_moment.hpp"
#include "spininterp/oracle/sphere_series.hpp"
#include "spininterp/oracle/zeros.hpp"
#include "spininterp/series/moments.hpp"
#include "spininterp/threshold/threshold.hpp"

using namespace spininterp;

namespace {

// Direct sum over all sign vectors in binary order, long double accumulator.
std::complex<long double> naive_Z(const MixtureSpec& spec, const DisorderTensor& g, cplx beta) {
  const int n = g.n();
  std::complex<long double> total = 0;
  Configuration sigma{std::vector<double>(static_cast<std::size_t>(n))};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int j = 0; j < n; ++j) sigma.coords[static_cast<std::size_t>(j)] = (mask >> j) & 1 ? -1.0 : 1.0;
    const double h = hamiltonian(spec, g, sigma);
    total += std::complex<long double>(std::exp(beta * h));
  }
  return total / static_cast<long double>(std::uint64_t{1} << n);
}

AnalyticFunction table_function(const EnergyTable& table) {
  return [&table](cplx z) { return table.partition(z); };
}

}  // namespace

TEST_CASE("hypercube partition function against direct enumeration") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();

  SUBCASE("Z(0) = 1") {
    const auto g = build_disorder(sk, 8, 4);
    const auto z = exact_Z_hypercube(sk, g, 0.0);
    CHECK(z.value.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(z.value.imag() == 0.0);
  }

  SUBCASE("n = 1 closed form") {
    const double g11 = 0.8;
    const auto g = DisorderTensor::from_arrays(1, 0, {{2, {g11}}});
    const cplx beta(0.4, 0.7);
    const auto z = exact_Z_hypercube(sk, g, beta);
    const cplx expected = std::exp(beta * g11 * std::sqrt(0.5));
    CHECK(std::abs(z.value - expected) < 1e-15);
    CHECK(std::abs(z.derivative - g11 * std::sqrt(0.5) * expected) < 1e-15);
  }

  SUBCASE("n = 12 agrees with the naive sum") {
    const auto g = build_disorder(sk, 12, 3);
    for (const cplx beta : {cplx(0.5, 0.0), cplx(0.3, 0.4), cplx(-0.2, 1.1)}) {
      const auto z = exact_Z_hypercube(sk, g, beta);
      const auto ref = naive_Z(sk, g, beta);
      const cplx ref_d(static_cast<double>(ref.real()), static_cast<double>(ref.imag()));
      CHECK(std::abs(z.value - ref_d) <= 1e-10 * std::max(1.0, std::abs(ref_d)));
    }
  }

  SUBCASE("conjugate symmetry") {
    const auto g = build_disorder(MixtureSpec::pure(3), 9, 7);
    const auto table = EnergyTable::build(MixtureSpec::pure(3), g);
    const cplx beta(0.35, 0.8);
    const auto a = table.partition(beta).value;
    const auto b = table.partition(std::conj(beta)).value;
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
  }

  SUBCASE("log partition matches the value") {
    const auto g = build_disorder(sk, 10, 2);
    const auto table = EnergyTable::build(sk, g);
    CHECK(table.log_partition(0.7) == doctest::Approx(std::log(table.partition(0.7).value.real())).epsilon(1e-13));
  }
}

TEST_CASE("energy table moments") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();
  const auto g = build_disorder(sk, 8, 2);
  const auto table = EnergyTable::build(sk, g);
  const auto m = table.moments(10);
  CHECK(m[0] == 1.0);
  const auto comb = moments_combinatorial(sk, g, 10);
  for (int k = 0; k <= 10; ++k) {
    const double scale = std::max(std::abs(m[static_cast<std::size_t>(k)]), std::pow(m[2], k / 2.0));
    CHECK(std::abs(m[static_cast<std::size_t>(k)] - comb[static_cast<std::size_t>(k)]) <= 1e-9 * scale);
  }
}

TEST_CASE("odd orders have vanishing odd moments") {
  const auto pure3 = MixtureSpec::pure(3);
  const auto g = build_disorder(pure3, 7, 4);
  const auto m = EnergyTable::build(pure3, g).moments(9);
  for (int k = 1; k <= 9; k += 2) CHECK(std::abs(m[static_cast<std::size_t>(k)]) < 1e-10 * std::pow(m[2], k / 2.0));
}

TEST_CASE("energy table sweeps are deterministic") {
  const auto spec = MixtureSpec({0.5, 0.5}, Domain::hypercube);
  const auto g = build_disorder(spec, 14, 5);
  const auto serial = EnergyTable::build(spec, g, Exec::serial);
  const auto parallel = EnergyTable::build(spec, g, Exec::parallel);
  REQUIRE(serial.energies().size() == parallel.energies().size());
  CHECK(std::equal(serial.energies().begin(), serial.energies().end(), parallel.energies().begin()));
  const cplx beta(0.6, 0.2);
  CHECK(serial.partition(beta, Exec::serial).value == parallel.partition(beta, Exec::parallel).value);

  // The Gray-code table agrees with direct evaluation at each configuration.
  for (std::uint64_t i : {0ULL, 1ULL, 255ULL, 256ULL, 9999ULL, 16383ULL}) {
    const auto sigma = gray_configuration(14, i);
    CHECK(serial.energies()[i] == doctest::Approx(hamiltonian_unchecked(spec, g, sigma)).epsilon(1e-12));
  }
}

TEST_CASE("enumeration refuses beyond its cap") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();
  const auto g = build_disorder(sk, 23, 1);
  CHECK_THROWS_AS(EnergyTable::build(sk, g), CapacityError);
  const auto small = build_disorder(sk, 6, 1);
  CHECK_THROWS_AS(EnergyTable::build(sk, small, Exec::parallel, 5), CapacityError);
}

TEST_CASE("Taylor surrogate agrees with the table") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();
  const auto g = build_disorder(sk, 10, 11);
  const auto table = EnergyTable::build(sk, g);
  const TaylorPartition taylor(table, 1.4);
  for (const cplx beta : {cplx(0.0, 0.0), cplx(0.9, 0.3), cplx(-0.4, 1.3), cplx(0.0, -1.4)}) {
    const auto exact = table.partition(beta);
    const auto approx = taylor(beta);
    CHECK(std::abs(exact.value - approx.value) < 1e-13);
    CHECK(std::abs(exact.derivative - approx.derivative) < 1e-12);
  }
}

TEST_CASE("sphere series") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick(Domain::sphere);

  SUBCASE("beta = 0") {
    const auto g = build_disorder(sk, 4, 1);
    const auto z = sphere_Z_series(sk, g, 0.0, 20);
    CHECK(z.value == cplx(1.0, 0.0));
  }

  SUBCASE("n = 3 against quadrature on the 2-sphere") {
    const int n = 3;
    const auto g = build_disorder(sk, n, 6);
    const double beta = 0.6;
    // sigma = sqrt(3) (sqrt(1-u^2) cos t, sqrt(1-u^2) sin t, u), area element du dt / (4 pi)
    constexpr int angles = 256;
    auto integrand_u = [&](double u) {
      double acc = 0.0;
      const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (int j = 0; j < angles; ++j) {
        const double t = 2.0 * std::numbers::pi * j / angles;
        const std::vector<double> sigma{std::sqrt(3.0) * s * std::cos(t), std::sqrt(3.0) * s * std::sin(t),
                                        std::sqrt(3.0) * u};
        acc += std::exp(beta * hamiltonian_unchecked(sk, g, sigma));
      }
      return acc / angles;
    };
    double reference = 0.0;
    for (int panel = 0; panel < 8; ++panel) {
      const double a = -1.0 + 0.25 * panel;
      reference += boost::math::quadrature::gauss<double, 20>::integrate(integrand_u, a, a + 0.25);
    }
    reference /= 2.0;
    const auto z = sphere_Z_series(sk, g, beta, 60);
    CHECK(z.conclusive);
    CHECK(std::abs(z.value - reference) < 1e-6);
  }

  SUBCASE("truncation tail shrinks") {
    const auto g = build_disorder(sk, 4, 2);
    const auto short_sum = sphere_Z_series(sk, g, cplx(0.5, 0.3), 40);
    const auto long_sum = sphere_Z_series(sk, g, cplx(0.5, 0.3), 60);
    CHECK(std::abs(short_sum.value - long_sum.value) < 1e-12);
    CHECK(long_sum.tail_estimate <= short_sum.tail_estimate);
  }
}

TEST_CASE("zero location on known functions") {
  SUBCASE("two simple zeros") {
    const cplx a(0.3, 0.0), b(0.0, -0.4);
    const AnalyticFunction f = [&](cplx z) -> ValueAndDerivative {
      return {(z - a) * (z - b), 2.0 * z - a - b};
    };
    const auto zeros = locate_zeros(f, 0.0, 1.0);
    REQUIRE(zeros.zeros.size() == 2);
    CHECK(zeros.total_multiplicity() == 2);
    for (const auto& zero : zeros.zeros) {
      CHECK(zero.multiplicity == 1);
      CHECK(std::min(std::abs(zero.location - a), std::abs(zero.location - b)) < 1e-9);
    }
    CHECK(zeros.residual < 1e-9);
    CHECK(winding_number_circle(f, 0.0, 1.0) == 2);
    CHECK(winding_number_circle(f, 0.0, 0.35) == 1);
  }

  SUBCASE("double zero") {
    const cplx a(-0.2, 0.1);
    const AnalyticFunction f = [&](cplx z) -> ValueAndDerivative { return {(z - a) * (z - a), 2.0 * (z - a)}; };
    const auto zeros = locate_zeros(f, 0.0, 0.8);
    CHECK(zeros.total_multiplicity() == 2);
  }

  SUBCASE("zero-free exponential") {
    const AnalyticFunction f = [](cplx z) -> ValueAndDerivative { return {std::exp(z), std::exp(z)}; };
    const auto zeros = locate_zeros(f, 0.0, 2.0);
    CHECK(zeros.zeros.empty());
    CHECK(winding_number_circle(f, 0.0, 2.0) == 0);
  }

  SUBCASE("csv") {
    ZeroList list;
    list.zeros.push_back({cplx(0.5, -0.25), 1});
    std::ostringstream out;
    write_zeros_csv(list, out);
    CHECK(out.str().rfind("re,im,multiplicity\n", 0) == 0);
    CHECK(out.str().find("0.5") != std::string::npos);
  }
}

TEST_CASE("Jensen's formula") {
  SUBCASE("linear factor inside and outside") {
    for (const cplx a : {cplx(0.3, 0.2), cplx(1.5, -0.5)}) {
      const AnalyticFunction f = [&](cplx z) -> ValueAndDerivative { return {z - a, 1.0}; };
      const double R = 0.9;
      std::vector<Zero> inside;
      if (std::abs(a) < R) inside.push_back({a, 1});
      const auto j = jensen_check(f, R, 2048, inside);
      CHECK(std::abs(j.lhs - j.rhs) < 1e-10);
      if (inside.empty()) CHECK(j.lhs == 0.0);
      else CHECK(j.lhs == doctest::Approx(std::log(R / std::abs(a))));
    }
  }

  SUBCASE("SK partition function") {
    const auto sk = MixtureSpec::sherrington_kirkpatrick();
    const auto g = build_disorder(sk, 10, 11);
    const auto table = EnergyTable::build(sk, g);
    const TaylorPartition taylor(table, 1.0);
    const AnalyticFunction surrogate = [&](cplx z) { return taylor(z); };
    const auto f = table_function(table);
    const double R = 0.9;
    const auto zeros = locate_zeros(surrogate, 0.0, R);
    CHECK(zeros.residual < 1e-8);
    CHECK(zeros.total_multiplicity() == winding_number_circle(f, 0.0, R));
    const auto j = jensen_check(f, R, 2048, zeros.zeros);
    CHECK(std::abs(j.lhs - j.rhs) < 1e-4);
  }
}

TEST_CASE("second-moment identity") {
  const auto sk = MixtureSpec::sherrington_kirkpatrick();

  SUBCASE("beta = 0") {
    const auto est = second_moment_identity_check(sk, 10, 0.0, 1000);
    CHECK(est.mc_ratio == 1.0);
    CHECK(est.cw_value == doctest::Approx(1.0));
  }

  SUBCASE("SK, n = 10, beta = 0.6") {
    const auto est = second_moment_identity_check(sk, 10, 0.6, 20000);
    CHECK(est.cw_value == doctest::Approx(std::exp(curie_weiss_log_Z(sk, 10, 0.36))));
    CHECK(std::abs(est.mc_ratio - est.cw_value) < 4.0 * est.standard_error);
  }

  SUBCASE("pure 3-spin, n = 8, beta = 0.4") {
    const auto est = second_moment_identity_check(MixtureSpec::pure(3), 8, 0.4, 20000);
    CHECK(std::abs(est.mc_ratio - est.cw_value) < 4.0 * est.standard_error);
  }

  SUBCASE("serial and parallel agree") {
    const auto a = second_moment_identity_check(sk, 6, 0.5, 1000, 1, Exec::serial);
    const auto b = second_moment_identity_check(sk, 6, 0.5, 1000, 1, Exec::parallel);
    CHECK(a.mc_ratio == b.mc_ratio);
  }

  SUBCASE("preconditions") {
    CHECK_THROWS_AS(second_moment_identity_check(sk, 10, 0.5, 999), PreconditionError);
    CHECK_THROWS_AS(second_moment_identity_check(MixtureSpec::sherrington_kirkpatrick(Domain::sphere), 5, 0.5, 1000),
                    PreconditionError);
  }
}
