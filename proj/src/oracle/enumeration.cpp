#include "spininterp/oracle/enumeration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "spininterp/errors.hpp"
#include "spininterp/model/hamiltonian.hpp"
#include "spininterp/util/summation.hpp"

namespace spininterp {

namespace {

constexpr std::uint64_t kResyncBlock = 256;
constexpr std::uint64_t kSumChunks = 64;

void check_cap(const MixtureSpec& spec, const DisorderTensor& g, int cap) {
  if (spec.domain() != Domain::hypercube) throw PreconditionError("exact enumeration needs the hypercube domain");
  if (g.n() > cap)
    throw CapacityError("exact enumeration over 2^" + std::to_string(g.n()) + " configurations exceeds the cap 2^" +
                        std::to_string(cap));
  for (int p : spec.active_orders())
    if (!g.has_order(p)) throw PreconditionError("disorder has no couplings for order " + std::to_string(p));
}

// Sweeps Gray indices [begin, end), begin a multiple of kResyncBlock.
class GraySweeper {
 public:
  GraySweeper(const MixtureSpec& spec, const DisorderTensor& g) : spec_(spec), g_(g), n_(g.n()) {
    const auto c2 = g.couplings(2);
    if (spec.gamma(2) > 0.0) {
      c2_ = spec.gamma(2) / std::sqrt(static_cast<double>(n_));
      a_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a_[i * n_ + j] = c2[i * n_ + j] + c2[j * n_ + i];
    }
    for (int p : spec.active_orders())
      if (p >= 3) higher_.push_back(p);
    sigma_.resize(static_cast<std::size_t>(n_));
    field_.resize(static_cast<std::size_t>(n_));
  }

  void run(std::uint64_t begin, std::uint64_t end, std::span<double> out) {
    for (std::uint64_t i = begin; i < end; ++i) {
      if (i % kResyncBlock == 0 || i == begin) {
        resync(i);
      } else {
        const int k = std::countr_zero(i);
        if (c2_ != 0.0) {
          const double s_old = sigma_[k];
          h2_ += -2.0 * c2_ * s_old * field_[k];
          for (int j = 0; j < n_; ++j)
            if (j != k) field_[j] -= 2.0 * a_[j * n_ + k] * s_old;
        }
        sigma_[k] = -sigma_[k];
      }
      double h = h2_;
      for (int p : higher_) h += higher_term(p);
      out[i] = h;
    }
  }

 private:
  void resync(std::uint64_t i) {
    const std::uint64_t code = i ^ (i >> 1);
    for (int j = 0; j < n_; ++j) sigma_[j] = (code >> j) & 1 ? -1.0 : 1.0;
    if (c2_ == 0.0) return;
    const auto c2 = g_.couplings(2);
    h2_ = c2_ * order_sum(c2, n_, 2, sigma_, scratch_);
    for (int k = 0; k < n_; ++k) {
      double f = 0.0;
      for (int j = 0; j < n_; ++j)
        if (j != k) f += a_[k * n_ + j] * sigma_[j];
      field_[k] = f;
    }
  }

  double higher_term(int p) {
    return spec_.gamma(p) / std::pow(static_cast<double>(n_), 0.5 * (p - 1)) *
           order_sum(g_.couplings(p), n_, p, sigma_, scratch_);
  }

  const MixtureSpec& spec_;
  const DisorderTensor& g_;
  int n_;
  double c2_ = 0.0;
  double h2_ = 0.0;
  std::vector<double> a_;
  std::vector<int> higher_;
  std::vector<double> sigma_;
  std::vector<double> field_;
  std::vector<double> scratch_;
};

template <class Body>
void for_each_chunk(std::uint64_t total, std::uint64_t chunks, Exec exec, Body body) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c)
      body(chunk_range(total, chunks, static_cast<std::uint64_t>(c)), static_cast<std::size_t>(c));
  } else {
    for (std::uint64_t c = 0; c < chunks; ++c) body(chunk_range(total, chunks, c), static_cast<std::size_t>(c));
  }
}

}  // namespace

std::vector<double> gray_configuration(int n, std::uint64_t i) {
  const std::uint64_t code = i ^ (i >> 1);
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) s[j] = (code >> j) & 1 ? -1.0 : 1.0;
  return s;
}

EnergyTable EnergyTable::build(const MixtureSpec& spec, const DisorderTensor& g, Exec exec, int cap) {
  check_cap(spec, g, cap);
  EnergyTable t;
  t.n_ = g.n();
  const std::uint64_t total = std::uint64_t{1} << t.n_;
  t.energies_.resize(total);
  const std::uint64_t blocks = (total + kResyncBlock - 1) / kResyncBlock;
  auto sweep_blocks = [&](std::uint64_t b0, std::uint64_t b1) {
    GraySweeper sw(spec, g);
    sw.run(b0 * kResyncBlock, std::min(total, b1 * kResyncBlock), t.energies_);
  };
  if (exec == Exec::parallel && blocks > 1) {
    const std::uint64_t chunks = std::min<std::uint64_t>(blocks, 256);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
      const auto r = chunk_range(blocks, chunks, static_cast<std::uint64_t>(c));
      sweep_blocks(r.begin, r.end);
    }
  } else {
    sweep_blocks(0, blocks);
  }
  for (double e : t.energies_) t.max_abs_ = std::max(t.max_abs_, std::fabs(e));
  return t;
}

ValueAndDerivative EnergyTable::partition(cplx beta, Exec exec) const {
  const std::uint64_t total = energies_.size();
  std::vector<CompensatedComplexSum> zs(kSumChunks), ds(kSumChunks);
  for_each_chunk(total, kSumChunks, exec, [&](ChunkRange r, std::size_t c) {
    for (auto i = r.begin; i < r.end; ++i) {
      const double h = energies_[i];
      const cplx e = std::exp(beta * h);
      zs[c].add(e);
      ds[c].add(h * e);
    }
  });
  CompensatedComplexSum z, d;
  for (std::size_t c = 0; c < kSumChunks; ++c) {
    z.add(zs[c]);
    d.add(ds[c]);
  }
  const double inv = 1.0 / static_cast<double>(total);
  return {z.value() * inv, d.value() * inv};
}

double EnergyTable::log_partition(double beta) const {
  double top = -INFINITY;
  for (double h : energies_) top = std::max(top, beta * h);
  CompensatedSum s;
  for (double h : energies_) s.add(std::exp(beta * h - top));
  return top + std::log(s.value() / static_cast<double>(energies_.size()));
}

std::vector<double> EnergyTable::moments(int k_max, Exec exec) const {
  if (k_max < 0) throw PreconditionError("k_max must be >= 0");
  const std::size_t m = static_cast<std::size_t>(k_max) + 1;
  std::vector<std::vector<CompensatedSum>> parts(kSumChunks, std::vector<CompensatedSum>(m));
  for_each_chunk(energies_.size(), kSumChunks, exec, [&](ChunkRange r, std::size_t c) {
    for (auto i = r.begin; i < r.end; ++i) {
      double pw = 1.0;
      for (std::size_t k = 0; k < m; ++k) {
        parts[c][k].add(pw);
        pw *= energies_[i];
      }
    }
  });
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    CompensatedSum s;
    for (std::size_t c = 0; c < kSumChunks; ++c) s.add(parts[c][k]);
    out[k] = s.value() / static_cast<double>(energies_.size());
  }
  out[0] = 1.0;
  return out;
}

std::vector<double> EnergyTable::taylor_coefficients(int m, Exec exec) const {
  if (m < 0) throw PreconditionError("degree must be >= 0");
  const std::size_t len = static_cast<std::size_t>(m) + 1;
  std::vector<std::vector<CompensatedSum>> parts(kSumChunks, std::vector<CompensatedSum>(len));
  for_each_chunk(energies_.size(), kSumChunks, exec, [&](ChunkRange r, std::size_t c) {
    for (auto i = r.begin; i < r.end; ++i) {
      double term = 1.0;
      for (std::size_t k = 0; k < len; ++k) {
        parts[c][k].add(term);
        term *= energies_[i] / static_cast<double>(k + 1);
      }
    }
  });
  std::vector<double> out(len);
  for (std::size_t k = 0; k < len; ++k) {
    CompensatedSum s;
    for (std::size_t c = 0; c < kSumChunks; ++c) s.add(parts[c][k]);
    out[k] = s.value() / static_cast<double>(energies_.size());
  }
  out[0] = 1.0;
  return out;
}

ValueAndDerivative exact_Z_hypercube(const MixtureSpec& spec, const DisorderTensor& g, cplx beta, Exec exec,
                                     int cap) {
  return EnergyTable::build(spec, g, exec, cap).partition(beta, exec);
}

std::vector<double> exact_moments_hypercube(const MixtureSpec& spec, const DisorderTensor& g, int k_max, Exec exec,
                                            int cap) {
  return EnergyTable::build(spec, g, exec, cap).moments(k_max, exec);
}

TaylorPartition::TaylorPartition(const EnergyTable& table, double radius, double tail) : radius_(radius) {
  if (!(radius > 0.0)) throw PreconditionError("radius must be positive");
  // remainder after degree m is at most sum_{j>m} x^j/j! with x = radius max|H|
  const double x = radius * table.max_abs_energy();
  int m = 1;
  double term = x;  // x^m / m!
  while (true) {
    const double next = term * x / (m + 1);
    // geometric bound on the remainder once (m+2) > 2x
    if (m + 2 > 2.0 * x && next * 2.0 <= tail) break;
    term = next;
    ++m;
    if (m > 4000) throw CapacityError("Taylor partition degree above 4000");
  }
  coeffs_ = table.taylor_coefficients(m, Exec::serial);
}

ValueAndDerivative TaylorPartition::operator()(cplx beta) const {
  cplx v{}, d{};
  for (auto k = static_cast<std::ptrdiff_t>(coeffs_.size()) - 1; k >= 0; --k) {
    d = d * beta + v;
    v = v * beta + coeffs_[static_cast<std::size_t>(k)];
  }
  return {v, d};
}

}  // namespace spininterp
