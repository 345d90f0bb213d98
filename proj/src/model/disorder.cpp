#include "spininterp/model/disorder.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "spininterp/errors.hpp"
#include "spininterp/model/philox.hpp"

namespace spininterp {

std::vector<int> DisorderTensor::orders() const {
  std::vector<int> out;
  for (const auto& [p, _] : arrays_) out.push_back(p);
  return out;
}

std::span<const double> DisorderTensor::couplings(int p) const {
  const auto it = arrays_.find(p);
  if (it == arrays_.end()) return {};
  return it->second;
}

DisorderTensor DisorderTensor::from_arrays(int n, std::uint64_t seed, std::map<int, std::vector<double>> arrays) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  for (const auto& [p, a] : arrays) {
    if (p < 2) throw PreconditionError("coupling order must be >= 2");
    if (a.size() != tuple_count(n, p)) throw PreconditionError("coupling array has wrong size for its order");
  }
  DisorderTensor g;
  g.n_ = n;
  g.seed_ = seed;
  g.arrays_ = std::move(arrays);
  return g;
}

std::uint64_t tuple_count(int n, int p, std::uint64_t max_entries) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  std::uint64_t count = 1;
  for (int i = 0; i < p; ++i) {
    if (count > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n))
      throw CapacityError("n^p overflows the 64-bit tuple index space");
    count *= static_cast<std::uint64_t>(n);
  }
  if (count > max_entries)
    throw CapacityError("order " + std::to_string(p) + " needs " + std::to_string(count) +
                        " couplings, above the cap of " + std::to_string(max_entries));
  return count;
}

DisorderTensor build_disorder(const MixtureSpec& spec, int n, std::uint64_t seed, Exec exec,
                              std::uint64_t max_entries) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  DisorderTensor g;
  g.n_ = n;
  g.seed_ = seed;
  for (int p : spec.active_orders()) {
    const std::uint64_t count = tuple_count(n, p, max_entries);
    std::vector<double> a(count);
    const auto total = static_cast<std::int64_t>(count);
    const auto order = static_cast<std::uint32_t>(p);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < total; ++i) a[i] = gaussian_at(seed, order, static_cast<std::uint64_t>(i));
    } else {
      for (std::int64_t i = 0; i < total; ++i) a[i] = gaussian_at(seed, order, static_cast<std::uint64_t>(i));
    }
    g.arrays_.emplace(p, std::move(a));
  }
  return g;
}

namespace {

constexpr char kMagic[8] = {'S', 'P', 'N', 'G', 'D', 'I', 'S', '1'};

template <class T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw PreconditionError("truncated disorder file");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_disorder(const DisorderTensor& g, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.n()));
  put<std::uint64_t>(out, g.seed());
  const auto orders = g.orders();
  put<std::uint64_t>(out, orders.size());
  for (int p : orders) put<std::uint64_t>(out, static_cast<std::uint64_t>(p));
  for (int p : orders)
    for (double v : g.couplings(p)) put<double>(out, v);
  if (!out) throw std::runtime_error("failed writing disorder file");
}

DisorderTensor load_disorder(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw PreconditionError("not a disorder file (bad magic)");
  const auto n = get<std::uint64_t>(in);
  const auto seed = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);
  if (n == 0 || n > static_cast<std::uint64_t>(std::numeric_limits<int>::max()) || count > 64)
    throw PreconditionError("corrupt disorder header");
  std::vector<int> orders;
  for (std::uint64_t i = 0; i < count; ++i) orders.push_back(static_cast<int>(get<std::uint64_t>(in)));
  std::map<int, std::vector<double>> arrays;
  for (int p : orders) {
    std::vector<double> a(tuple_count(static_cast<int>(n), p));
    for (auto& v : a) v = get<double>(in);
    arrays.emplace(p, std::move(a));
  }
  return DisorderTensor::from_arrays(static_cast<int>(n), seed, std::move(arrays));
}

}  // namespace spininterp
