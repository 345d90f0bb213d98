#include "spininterp/series/moments.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "spininterp/errors.hpp"
#include "spininterp/util/special.hpp"
#include "spininterp/util/summation.hpp"

namespace spininterp {

namespace {

constexpr int kMaxHypercubeN = 256;
constexpr int kMaxSphereN = 64;
constexpr int kMaxSphereExponent = 255;
constexpr std::uint64_t kStateChunks = 64;

struct ParityKey {
  std::array<std::uint64_t, 4> bits{};
  auto operator<=>(const ParityKey&) const = default;
  bool operator==(const ParityKey&) const = default;
};

struct ExponentKey {
  std::array<std::uint8_t, kMaxSphereN> e{};
  auto operator<=>(const ExponentKey&) const = default;
  bool operator==(const ExponentKey&) const = default;
};

template <class Key>
struct Weighted {
  Key key;
  double w;
};

double tuple_scale(const MixtureSpec& spec, int n, int p) {
  return spec.gamma(p) / std::pow(static_cast<double>(n), 0.5 * (p - 1));
}

// Calls f(index, digits) for every tuple of [n]^p in row-major order.
template <class F>
void for_each_tuple(int n, int p, F&& f) {
  std::vector<int> digits(static_cast<std::size_t>(p), 0);
  const std::uint64_t total = tuple_count(n, p);
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    f(idx, std::span<const int>(digits));
    for (int d = p - 1; d >= 0; --d) {
      if (++digits[static_cast<std::size_t>(d)] < n) break;
      digits[static_cast<std::size_t>(d)] = 0;
    }
  }
}

// Sort by key, then merge equal keys with compensated sums (stable, so the
// merge order only depends on generation order).
template <class Key>
std::vector<Weighted<Key>> reduce_by_key(std::vector<Weighted<Key>> items) {
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  std::vector<Weighted<Key>> out;
  std::size_t i = 0;
  while (i < items.size()) {
    CompensatedSum s;
    std::size_t j = i;
    for (; j < items.size() && items[j].key == items[i].key; ++j) s.add(items[j].w);
    out.push_back({items[i].key, s.value()});
    i = j;
  }
  return out;
}

template <class Key, class Combine, class Feasible, class Evaluate>
std::vector<double> grouped_dp(const std::vector<Weighted<Key>>& transitions, int k_max, Combine combine,
                               Feasible feasible, Evaluate evaluate, Exec exec) {
  std::vector<double> moments(static_cast<std::size_t>(k_max) + 1);
  std::vector<Weighted<Key>> states{{Key{}, 1.0}};
  moments[0] = 1.0;
  for (int j = 1; j <= k_max; ++j) {
    const int remaining = k_max - j;
    std::vector<std::vector<Weighted<Key>>> parts(kStateChunks);
    auto generate = [&](std::int64_t c) {
      const auto r = chunk_range(states.size(), kStateChunks, static_cast<std::uint64_t>(c));
      auto& part = parts[static_cast<std::size_t>(c)];
      for (auto s = r.begin; s < r.end; ++s)
        for (const auto& t : transitions) {
          Key k;
          if (!combine(states[s].key, t.key, k) || !feasible(k, remaining)) continue;
          part.push_back({k, states[s].w * t.w});
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t c = 0; c < static_cast<std::int64_t>(kStateChunks); ++c) generate(c);
    } else {
      for (std::int64_t c = 0; c < static_cast<std::int64_t>(kStateChunks); ++c) generate(c);
    }
    std::vector<Weighted<Key>> next;
    for (auto& part : parts) next.insert(next.end(), part.begin(), part.end());
    states = reduce_by_key(std::move(next));
    moments[static_cast<std::size_t>(j)] = evaluate(states);
  }
  return moments;
}

int popcount(const ParityKey& k) {
  int c = 0;
  for (auto w : k.bits) c += std::popcount(w);
  return c;
}

std::vector<double> hypercube_grouped(const MixtureSpec& spec, const DisorderTensor& g, int k_max, Exec exec) {
  const int n = g.n();
  if (n > kMaxHypercubeN) throw CapacityError("grouped hypercube moments support n <= 256");
  std::vector<Weighted<ParityKey>> raw;
  for (int p : spec.active_orders()) {
    const auto c = g.couplings(p);
    if (c.empty()) throw PreconditionError("disorder has no couplings for order " + std::to_string(p));
    const double s = tuple_scale(spec, n, p);
    for_each_tuple(n, p, [&](std::uint64_t idx, std::span<const int> digits) {
      ParityKey k;
      for (int i : digits) k.bits[static_cast<std::size_t>(i >> 6)] ^= std::uint64_t{1} << (i & 63);
      raw.push_back({k, s * c[idx]});
    });
  }
  const auto transitions = reduce_by_key(std::move(raw));
  const int p_max = spec.p_max();
  auto combine = [](const ParityKey& a, const ParityKey& b, ParityKey& out) {
    for (std::size_t w = 0; w < 4; ++w) out.bits[w] = a.bits[w] ^ b.bits[w];
    return true;
  };
  auto feasible = [p_max](const ParityKey& k, int remaining) { return popcount(k) <= remaining * p_max; };
  auto evaluate = [](const std::vector<Weighted<ParityKey>>& states) {
    for (const auto& s : states)
      if (s.key == ParityKey{}) return s.w;
    return 0.0;
  };
  return grouped_dp(transitions, k_max, combine, feasible, evaluate, exec);
}

double sphere_log_expectation(int n, std::span<const std::uint8_t> exps) {
  int d = 0;
  double acc = 0.0;
  const double lg_half = log_gamma(0.5);
  for (auto a : exps) {
    if (a == 0) continue;
    d += a;
    acc += log_gamma((a + 1) / 2.0) - lg_half;
  }
  return acc + 0.5 * d * std::log(static_cast<double>(n)) + log_gamma(n / 2.0) - log_gamma((n + d) / 2.0);
}

std::vector<double> sphere_grouped(const MixtureSpec& spec, const DisorderTensor& g, int k_max, Exec exec) {
  const int n = g.n();
  if (n > kMaxSphereN) throw CapacityError("sphere moments support n <= 64");
  if (spec.p_max() * k_max > kMaxSphereExponent) throw CapacityError("sphere moments support k_max * p_max <= 255");
  std::vector<Weighted<ExponentKey>> raw;
  for (int p : spec.active_orders()) {
    const auto c = g.couplings(p);
    if (c.empty()) throw PreconditionError("disorder has no couplings for order " + std::to_string(p));
    const double s = tuple_scale(spec, n, p);
    for_each_tuple(n, p, [&](std::uint64_t idx, std::span<const int> digits) {
      ExponentKey k;
      for (int i : digits) ++k.e[static_cast<std::size_t>(i)];
      raw.push_back({k, s * c[idx]});
    });
  }
  const auto transitions = reduce_by_key(std::move(raw));
  const int p_max = spec.p_max();
  auto combine = [n](const ExponentKey& a, const ExponentKey& b, ExponentKey& out) {
    for (int i = 0; i < n; ++i) out.e[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(a.e[i] + b.e[i]);
    return true;
  };
  auto feasible = [n, p_max](const ExponentKey& k, int remaining) {
    int odd = 0;
    for (int i = 0; i < n; ++i) odd += k.e[static_cast<std::size_t>(i)] & 1;
    return odd <= remaining * p_max;
  };
  auto evaluate = [n](const std::vector<Weighted<ExponentKey>>& states) {
    CompensatedSum acc;
    for (const auto& s : states) {
      bool even = true;
      for (int i = 0; i < n && even; ++i) even = (s.key.e[static_cast<std::size_t>(i)] & 1) == 0;
      if (even) acc.add(s.w * std::exp(sphere_log_expectation(n, std::span(s.key.e.data(), static_cast<std::size_t>(n)))));
    }
    return acc.value();
  };
  return grouped_dp(transitions, k_max, combine, feasible, evaluate, exec);
}

struct FlatTuple {
  double weight;
  std::vector<int> digits;
};

std::vector<double> literal_moments(const MixtureSpec& spec, const DisorderTensor& g, int k_max, Exec exec) {
  const int n = g.n();
  std::vector<FlatTuple> tuples;
  for (int p : spec.active_orders()) {
    const auto c = g.couplings(p);
    if (c.empty()) throw PreconditionError("disorder has no couplings for order " + std::to_string(p));
    const double s = tuple_scale(spec, n, p);
    for_each_tuple(n, p, [&](std::uint64_t idx, std::span<const int> digits) {
      tuples.push_back({s * c[idx], std::vector<int>(digits.begin(), digits.end())});
    });
  }
  const bool sphere = spec.domain() == Domain::sphere;
  const auto T = static_cast<std::int64_t>(tuples.size());
  std::vector<double> moments(static_cast<std::size_t>(k_max) + 1);
  moments[0] = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    // the outer index is the first tuple of the sequence
    std::vector<CompensatedSum> partial(static_cast<std::size_t>(T));
    auto run = [&](std::int64_t first) {
      std::vector<std::int64_t> rest(static_cast<std::size_t>(k - 1), 0);
      std::vector<std::uint8_t> counts(static_cast<std::size_t>(n));
      auto& acc = partial[static_cast<std::size_t>(first)];
      while (true) {
        std::fill(counts.begin(), counts.end(), std::uint8_t{0});
        double w = tuples[static_cast<std::size_t>(first)].weight;
        for (int i : tuples[static_cast<std::size_t>(first)].digits) ++counts[static_cast<std::size_t>(i)];
        for (auto t : rest) {
          w *= tuples[static_cast<std::size_t>(t)].weight;
          for (int i : tuples[static_cast<std::size_t>(t)].digits) ++counts[static_cast<std::size_t>(i)];
        }
        bool even = true;
        for (auto c : counts) even = even && (c & 1) == 0;
        if (even) acc.add(sphere ? w * std::exp(sphere_log_expectation(n, counts)) : w);
        std::size_t d = rest.size();
        while (d > 0) {
          if (++rest[d - 1] < T) break;
          rest[d - 1] = 0;
          --d;
        }
        if (d == 0) break;
      }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t f = 0; f < T; ++f) run(f);
    } else {
      for (std::int64_t f = 0; f < T; ++f) run(f);
    }
    CompensatedSum total;
    for (const auto& s : partial) total.add(s);
    moments[static_cast<std::size_t>(k)] = total.value();
  }
  return moments;
}

double log10_choose(double n, double k) {
  if (k < 0 || k > n) return -INFINITY;
  return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) / std::log(10.0);
}

double log10_add(double a, double b) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (!std::isfinite(lo)) return hi;
  return hi + std::log10(1.0 + std::pow(10.0, lo - hi));
}

}  // namespace

double log10_moment_work(const MixtureSpec& spec, int n, int k_max, MomentMethod method) {
  if (k_max <= 0) return 0.0;
  double log10_tuples = -INFINITY;
  for (int p : spec.active_orders()) log10_tuples = log10_add(log10_tuples, p * std::log10(static_cast<double>(n)));
  if (method == MomentMethod::literal) {
    double w = -INFINITY;
    for (int k = 1; k <= k_max; ++k) w = log10_add(w, k * log10_tuples + std::log10(k * spec.p_max()));
    return w;
  }
  const int p_max = spec.p_max();
  double log10_states = -INFINITY;
  double log10_classes = -INFINITY;
  if (spec.domain() == Domain::hypercube) {
    const int width = std::min(n, p_max * (k_max + 1) / 2);
    for (int w = 0; w <= width; ++w) log10_states = log10_add(log10_states, log10_choose(n, w));
    for (int w = 0; w <= std::min(n, p_max); ++w) log10_classes = log10_add(log10_classes, log10_choose(n, w));
  } else {
    log10_states = log10_choose(n - 1 + p_max * k_max, n - 1);
    log10_classes = log10_choose(n - 1 + p_max, n - 1) + std::log10(static_cast<double>(p_max - 1));
  }
  log10_classes = std::min(log10_classes, log10_tuples);
  return log10_tuples + std::log10(static_cast<double>(k_max)) + log10_states + log10_classes - std::log10(4.0);
}

std::vector<double> moments_combinatorial(const MixtureSpec& spec, const DisorderTensor& g, int k_max,
                                          const MomentOptions& options) {
  if (k_max < 0) throw PreconditionError("k_max must be >= 0");
  const double cost = log10_moment_work(spec, g.n(), k_max, options.method);
  if (cost > options.log10_work_budget)
    throw BudgetExceeded("moment computation needs ~1e" + std::to_string(static_cast<int>(std::ceil(cost))) +
                             " operations, above the budget of 1e" +
                             std::to_string(static_cast<int>(options.log10_work_budget)),
                         cost);
  if (options.method == MomentMethod::literal) return literal_moments(spec, g, k_max, options.exec);
  return spec.domain() == Domain::hypercube ? hypercube_grouped(spec, g, k_max, options.exec)
                                            : sphere_grouped(spec, g, k_max, options.exec);
}

double sphere_monomial_expectation(int n, std::span<const int> exponents) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  if (static_cast<int>(exponents.size()) > n) throw PreconditionError("more exponents than coordinates");
  int d = 0;
  double acc = 0.0;
  const double lg_half = log_gamma(0.5);
  for (int a : exponents) {
    if (a < 0 || a % 2 != 0) throw PreconditionError("sphere monomial expectation needs even exponents");
    if (a == 0) continue;
    d += a;
    acc += log_gamma((a + 1) / 2.0) - lg_half;
  }
  return std::exp(acc + 0.5 * d * std::log(static_cast<double>(n)) + log_gamma(n / 2.0) - log_gamma((n + d) / 2.0));
}

}  // namespace spininterp
