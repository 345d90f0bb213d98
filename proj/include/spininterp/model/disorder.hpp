#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "spininterp/model/mixture.hpp"
#include "spininterp/util/parallel.hpp"

namespace spininterp {

inline constexpr std::uint64_t kDefaultMaxCouplings = std::uint64_t{1} << 30;

/// Dense, unsymmetrized Gaussian couplings G_{i1..ip} for each active order p,
/// stored row-major (i1 slowest). Immutable after construction.
class DisorderTensor {
 public:
  DisorderTensor() = default;
  /// Test hook: explicit arrays. Each array for order p must hold n^p entries.
  static DisorderTensor from_arrays(int n, std::uint64_t seed, std::map<int, std::vector<double>> arrays);

  int n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::vector<int> orders() const;
  bool has_order(int p) const { return arrays_.count(p) != 0; }
  /// Empty span when order p is absent.
  std::span<const double> couplings(int p) const;

  friend bool operator==(const DisorderTensor&, const DisorderTensor&) = default;

 private:
  friend DisorderTensor build_disorder(const MixtureSpec&, int, std::uint64_t, Exec, std::uint64_t);
  int n_ = 0;
  std::uint64_t seed_ = 0;
  std::map<int, std::vector<double>> arrays_;
};

/// n^p, or CapacityError if it overflows 64 bits or exceeds `max_entries`.
std::uint64_t tuple_count(int n, int p, std::uint64_t max_entries = kDefaultMaxCouplings);

/// Entry `index` of order p is gaussian_at(seed, p, index).
DisorderTensor build_disorder(const MixtureSpec& spec, int n, std::uint64_t seed, Exec exec = Exec::parallel,
                              std::uint64_t max_entries = kDefaultMaxCouplings);

/// Binary layout (little-endian): magic "SPNGDIS1", u64 n, u64 seed, u64 count,
/// u64 orders[count], then the f64 arrays in the same order.
void save_disorder(const DisorderTensor& g, std::ostream& out);
DisorderTensor load_disorder(std::istream& in);

}  // namespace spininterp
