#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

namespace spininterp {

using cplx = std::complex<double>;

/// Degree above which series kernels accumulate in double-double.
inline constexpr int kCompensatedDegree = 32;

/// Truncated power series c_0 + c_1 z + ... + c_m z^m.
class ComplexSeries {
 public:
  explicit ComplexSeries(int degree);
  explicit ComplexSeries(std::vector<cplx> coefficients);

  static ComplexSeries identity(int degree);
  static ComplexSeries constant(int degree, cplx value);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  cplx operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  cplx& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  std::span<const cplx> coefficients() const { return c_; }

  /// Horner evaluation of the truncated polynomial.
  cplx evaluate(cplx z) const;
  /// Sum of coefficients, i.e. the truncation evaluated at z = 1.
  cplx sum() const { return evaluate(1.0); }
  ComplexSeries truncated(int degree) const;

  friend bool operator==(const ComplexSeries&, const ComplexSeries&) = default;

 private:
  std::vector<cplx> c_;
};

ComplexSeries series_multiply(const ComplexSeries& a, const ComplexSeries& b);

/// log a for a_0 = 1, by the Newton-identity recurrence
///   k a_k = sum_{j<k} a_j (k-j) b_{k-j}.
ComplexSeries series_log(const ComplexSeries& a);

/// exp b for b_0 = 0, by the same recurrence solved for a.
ComplexSeries series_exp(const ComplexSeries& b);

/// Truncation of sum_j outer_j inner^j; requires inner_0 = 0.
ComplexSeries series_compose(const ComplexSeries& outer, const ComplexSeries& inner);

/// num / den for den_0 != 0.
ComplexSeries series_divide(const ComplexSeries& num, const ComplexSeries& den);

/// CSV with header k,re,im.
void write_series_csv(const ComplexSeries& s, std::ostream& out);

}  // namespace spininterp
