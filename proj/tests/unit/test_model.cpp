#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "spininterp/errors.hpp"
#include "spininterp/model/disorder.hpp"
#include "spininterp/model/hamiltonian.hpp"
#include "spininterp/model/mixture.hpp"
#include "spininterp/model/philox.hpp"

using namespace spininterp;

namespace {

const MixtureSpec kSK = MixtureSpec::sherrington_kirkpatrick();

// Independent H: explicit nested loops over all ordered tuples.
double naive_hamiltonian(const MixtureSpec& spec, const DisorderTensor& g, const std::vector<double>& s) {
  const int n = g.n();
  double total = 0.0;
  for (int p : spec.active_orders()) {
    const auto c = g.couplings(p);
    double sum = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(p), 0);
    for (std::size_t flat = 0; flat < c.size(); ++flat) {
      std::size_t rem = flat;
      double prod = c[flat];
      for (int j = p - 1; j >= 0; --j) {
        prod *= s[rem % static_cast<std::size_t>(n)];
        rem /= static_cast<std::size_t>(n);
      }
      sum += prod;
    }
    total += spec.gamma(p) / std::pow(n, 0.5 * (p - 1)) * sum;
  }
  return total;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("gaussian stream follows the documented layout") {
  const std::uint64_t seed = 0x0123456789abcdefULL, index = 0x00000002fedcba98ULL;
  const auto w = Philox4x32::block({0xfedcba98u, 0x2u, 3u, 0u}, {0x89abcdefu, 0x01234567u});
  const double u1 = (static_cast<double>(((std::uint64_t{w[0]} << 32 | w[1]) >> 11) + 1)) / 9007199254740992.0;
  const double u2 = static_cast<double>((std::uint64_t{w[2]} << 32 | w[3]) >> 11) / 9007199254740992.0;
  CHECK(gaussian_at(seed, 3, index) == std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2));
}

TEST_CASE("build_disorder is deterministic and fills every tuple") {
  const auto a = build_disorder(kSK, 4, 1);
  const auto b = build_disorder(kSK, 4, 1, Exec::serial);
  CHECK(a == b);
  CHECK(a.couplings(2).size() == 16);
  CHECK(a.couplings(2)[5] == gaussian_at(1, 2, 5));
  CHECK_FALSE(a == build_disorder(kSK, 4, 2));
}

TEST_CASE("pure 3-spin disorder has only the order-3 array") {
  const MixtureSpec spec({0.0, 1.0}, Domain::hypercube);
  const auto g = build_disorder(spec, 3, 7);
  CHECK(g.couplings(3).size() == 27);
  CHECK(g.couplings(2).empty());
  CHECK_FALSE(g.has_order(2));
  CHECK(g.orders() == std::vector<int>{3});
}

TEST_CASE("disorder entries look standard normal") {
  const auto g = build_disorder(kSK, 100, 5);
  const auto c = g.couplings(2);
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
  double var = 0.0;
  for (double x : c) var += (x - mean) * (x - mean);
  var /= static_cast<double>(c.size() - 1);
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(1e4));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("disorder capacity and precondition errors") {
  CHECK_THROWS_AS(build_disorder(kSK, 0, 1), PreconditionError);
  CHECK_THROWS_AS(tuple_count(1 << 20, 4), CapacityError);
  CHECK_THROWS_AS(tuple_count(3000000, 3, ~std::uint64_t{0}), CapacityError);
  CHECK_THROWS_AS(build_disorder(kSK, 100, 1, Exec::parallel, 1000), CapacityError);
  CHECK(tuple_count(10, 3) == 1000);
}

TEST_CASE("disorder binary round trip") {
  const MixtureSpec spec({0.5, 0.5}, Domain::hypercube);
  const auto g = build_disorder(spec, 5, 42);
  std::stringstream buf;
  save_disorder(g, buf);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 8) == "SPNGDIS1");
  CHECK(load_disorder(buf) == g);

  std::stringstream bad("NOTMAGIC........");
  CHECK_THROWS_AS(load_disorder(bad), PreconditionError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_disorder(truncated), PreconditionError);
}

TEST_CASE("mixture functions and config parsing") {
  const MixtureSpec mixed({0.5, 0.5}, Domain::hypercube);
  CHECK(mixed.p_max() == 3);
  CHECK(mixed.xi(1.0) == doctest::Approx(0.5));
  CHECK(mixed.xi(0.5) == doctest::Approx(0.25 * 0.25 + 0.25 * 0.125));
  CHECK(mixed.xi_prime(0.5) == doctest::Approx(0.25 * 2 * 0.5 + 0.25 * 3 * 0.25));
  CHECK(mixed.xi_second(0.5) == doctest::Approx(0.25 * 2 + 0.25 * 6 * 0.5));
  CHECK(kSK.xi_one() == doctest::Approx(0.5));
  CHECK(mixed.active_orders() == std::vector<int>{2, 3});

  const auto parsed = parse_mixture("# SK\ngammas = [0.7071067811865476]  # gamma_2\ndomain = \"hypercube\"\n");
  CHECK(parsed == kSK);
  CHECK(parsed.hash() == kSK.hash());
  CHECK(parse_mixture(kSK.to_config()) == kSK);
  CHECK(parse_mixture("gammas = [0, 1]\ndomain = \"sphere\"").domain() == Domain::sphere);
  CHECK(parse_mixture("gammas = [0.5, 0.5]") == mixed);
  CHECK(mixed.hash() != kSK.hash());

  CHECK_THROWS_AS(parse_mixture("gammas = [-1]"), PreconditionError);
  CHECK_THROWS_AS(parse_mixture("gammas = [0, 0]"), PreconditionError);
  CHECK_THROWS_AS(parse_mixture("gammas = 0.5"), PreconditionError);
  CHECK_THROWS_AS(parse_mixture("gammas = [0.5]\nfoo = 1"), PreconditionError);
  CHECK_THROWS_AS(parse_mixture("domain = \"sphere\""), PreconditionError);
  CHECK_THROWS_AS(parse_mixture("gammas = [0.5]\ndomain = \"torus\""), PreconditionError);
  CHECK_THROWS_AS(MixtureSpec({}, Domain::hypercube), PreconditionError);
}

TEST_CASE("hamiltonian small cases") {
  SUBCASE("all-zero configuration gives 0") {
    const auto g = build_disorder(MixtureSpec({0.5, 0.5}, Domain::sphere), 4, 3);
    CHECK(hamiltonian_unchecked(MixtureSpec({0.5, 0.5}, Domain::sphere), g, std::vector<double>(4, 0.0)) == 0.0);
  }
  SUBCASE("n = 1 SK is g / sqrt 2") {
    const auto g = DisorderTensor::from_arrays(1, 0, {{2, {1.7}}});
    CHECK(hamiltonian(kSK, g, {{1.0}}) == doctest::Approx(1.7 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(hamiltonian(kSK, g, {{-1.0}}) == doctest::Approx(1.7 / std::sqrt(2.0)).epsilon(1e-15));
  }
  SUBCASE("n = 2 SK against the explicit four-term sum") {
    const auto g = build_disorder(kSK, 2, 11);
    const auto c = g.couplings(2);
    const double s0 = 1.0, s1 = -1.0;
    const double four = c[0] * s0 * s0 + c[1] * s0 * s1 + c[2] * s1 * s0 + c[3] * s1 * s1;
    CHECK(hamiltonian(kSK, g, {{s0, s1}}) == doctest::Approx(four / std::sqrt(2.0) / std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("row-major contraction matches nested loops") {
    const MixtureSpec spec({0.3, 0.4, 0.5}, Domain::hypercube);
    const auto g = build_disorder(spec, 5, 9);
    const std::vector<double> s = {1, -1, -1, 1, 1};
    CHECK(hamiltonian(spec, g, {s}) == doctest::Approx(naive_hamiltonian(spec, g, s)).epsilon(1e-13));
  }
}

TEST_CASE("hamiltonian sign symmetry") {
  const std::vector<double> s = {1, -1, 1, 1, -1, -1};
  std::vector<double> minus(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) minus[i] = -s[i];
  const auto g_sk = build_disorder(kSK, 6, 4);
  CHECK(hamiltonian(kSK, g_sk, {minus}) == doctest::Approx(hamiltonian(kSK, g_sk, {s})).epsilon(1e-14));

  const MixtureSpec mixed({0.5, 0.5, 0.25}, Domain::hypercube);
  const auto g = build_disorder(mixed, 6, 4);
  double parity = 0.0;
  for (int p : mixed.active_orders()) {
    const double plus = order_term(mixed, g, p, s), flipped = order_term(mixed, g, p, minus);
    CHECK(flipped == doctest::Approx(p % 2 ? -plus : plus).epsilon(1e-13));
    parity += (p % 2 ? -1.0 : 1.0) * plus;
  }
  CHECK(hamiltonian(mixed, g, {minus}) == doctest::Approx(parity).epsilon(1e-13));
}

TEST_CASE("configuration validation") {
  const auto g = build_disorder(kSK, 3, 1);
  CHECK_THROWS_AS(hamiltonian(kSK, g, {{1, 1}}), PreconditionError);
  CHECK_THROWS_AS(hamiltonian(kSK, g, {{1, 0.5, 1}}), PreconditionError);
  const MixtureSpec sphere = MixtureSpec::sherrington_kirkpatrick(Domain::sphere);
  CHECK_NOTHROW(hamiltonian(sphere, g, {{std::sqrt(1.5), std::sqrt(1.5), 0.0}}));
  CHECK_THROWS_AS(hamiltonian(sphere, g, {{1.0, 1.0, 1.1}}), PreconditionError);
}

TEST_CASE("covariance depends only on the overlap") {
  std::vector<std::uint64_t> few(999);
  std::iota(few.begin(), few.end(), 1);
  const Configuration ones{{1, 1, 1, 1}};
  CHECK_THROWS_AS(empirical_covariance_check(kSK, 4, few, ones, ones), PreconditionError);

  std::vector<std::uint64_t> seeds(1000);
  std::iota(seeds.begin(), seeds.end(), 1);
  CHECK(empirical_covariance_check(kSK, 4, seeds, ones, ones).predicted == doctest::Approx(4 * kSK.xi_one()));
  CHECK(empirical_covariance_check(kSK, 4, seeds, ones, {{1, 1, -1, -1}}).predicted == 0.0);

  std::vector<std::uint64_t> many(100000);
  std::iota(many.begin(), many.end(), 1);
  // overlap (6 - 2 * 2) / 6 = 1/3
  const Configuration tau{{1, 1, 1, 1, 1, 1}}, sigma{{1, 1, 1, 1, -1, -1}};
  const auto est = empirical_covariance_check(kSK, 6, many, tau, sigma);
  CHECK(est.predicted == doctest::Approx(6.0 * 0.5 / 9.0));
  CHECK(est.samples == 100000);
  CHECK(std::abs(est.sample_cov - est.predicted) <= 5.0 * est.standard_error);

  const MixtureSpec mixed({0.5, 0.5}, Domain::hypercube);
  const auto est3 = empirical_covariance_check(mixed, 6, many, tau, sigma);
  CHECK(est3.predicted == doctest::Approx(6.0 * mixed.xi(1.0 / 3.0)));
  CHECK(std::abs(est3.sample_cov - est3.predicted) <= 5.0 * est3.standard_error);
}
