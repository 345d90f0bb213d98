#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spininterp {

enum class Domain { hypercube, sphere };

std::string_view to_string(Domain domain);
Domain domain_from_string(std::string_view text);

/// Mixture coefficients gamma_2..gamma_pmax together with the spin domain.
/// xi(s) = sum_p gamma_p^2 s^p.
class MixtureSpec {
 public:
  /// `gammas[0]` is gamma_2, `gammas[1]` is gamma_3 and so on.
  MixtureSpec(std::vector<double> gammas, Domain domain);

  static MixtureSpec sherrington_kirkpatrick(Domain domain = Domain::hypercube);
  static MixtureSpec pure(int p, Domain domain = Domain::hypercube);

  int p_max() const { return static_cast<int>(gammas_.size()) + 1; }
  Domain domain() const { return domain_; }
  const std::vector<double>& gammas() const { return gammas_; }
  double gamma(int p) const;
  /// Orders p with gamma_p > 0, ascending.
  std::vector<int> active_orders() const;

  double xi(double s) const;
  double xi_prime(double s) const;
  double xi_second(double s) const;
  /// sum_p gamma_p^2 p(p-1) r^(p-2), an upper bound for |xi''| on [-r, r].
  double xi_second_abs(double r) const;
  double xi_one() const { return xi(1.0); }

  /// FNV-1a over the canonical config text.
  std::uint64_t hash() const;
  std::string to_config() const;

  friend bool operator==(const MixtureSpec&, const MixtureSpec&) = default;

 private:
  std::vector<double> gammas_;
  Domain domain_;
};

/// Parses the key-value config format:
///   # comment
///   gammas = [0.7071067811865476]
///   domain = "hypercube"
MixtureSpec parse_mixture(std::string_view text);
MixtureSpec load_mixture(const std::filesystem::path& path);

}  // namespace spininterp
