#include "spininterp/series/series.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "spininterp/errors.hpp"
#include "spininterp/series/double_double.hpp"

namespace spininterp {

namespace {

constexpr double kUnitTolerance = 1e-12;

void require_same_degree(const ComplexSeries& a, const ComplexSeries& b, const char* op) {
  if (a.degree() != b.degree())
    throw PreconditionError(std::string(op) + ": degree mismatch (" + std::to_string(a.degree()) + " vs " +
                            std::to_string(b.degree()) + ")");
}

// Plain and compensated kernels share one template; T is cplx or ComplexDD.
template <class T>
T from(cplx z) {
  return T(z);
}

template <class T>
cplx out(const T& z) {
  if constexpr (std::is_same_v<T, cplx>)
    return z;
  else
    return z.value();
}

template <class T>
T scale(const T& z, double s) {
  if constexpr (std::is_same_v<T, cplx>)
    return z * s;
  else
    return ComplexDD(z.re * DoubleDouble(s), z.im * DoubleDouble(s));
}

template <class T>
std::vector<cplx> multiply_kernel(std::span<const cplx> a, std::span<const cplx> b) {
  const std::size_t m = a.size();
  std::vector<cplx> c(m);
  for (std::size_t k = 0; k < m; ++k) {
    T acc{};
    for (std::size_t j = 0; j <= k; ++j) acc += from<T>(a[j]) * from<T>(b[k - j]);
    c[k] = out(acc);
  }
  return c;
}

template <class T>
std::vector<cplx> log_kernel(std::span<const cplx> a) {
  const std::size_t m = a.size();
  std::vector<T> b(m);
  std::vector<cplx> res(m);
  for (std::size_t k = 1; k < m; ++k) {
    T acc{};
    for (std::size_t j = 1; j < k; ++j) acc += scale(from<T>(a[j]) * b[k - j], static_cast<double>(k - j));
    if constexpr (std::is_same_v<T, cplx>)
      b[k] = a[k] - acc / static_cast<double>(k);
    else
      b[k] = from<T>(a[k]) - ComplexDD(acc.re / DoubleDouble(static_cast<double>(k)),
                                       acc.im / DoubleDouble(static_cast<double>(k)));
    res[k] = out(b[k]);
  }
  return res;
}

template <class T>
std::vector<cplx> exp_kernel(std::span<const cplx> b) {
  const std::size_t m = b.size();
  std::vector<T> a(m);
  std::vector<cplx> res(m);
  a[0] = from<T>(1.0);
  res[0] = 1.0;
  for (std::size_t k = 1; k < m; ++k) {
    T acc{};
    for (std::size_t j = 0; j < k; ++j) acc += scale(a[j] * from<T>(b[k - j]), static_cast<double>(k - j));
    if constexpr (std::is_same_v<T, cplx>)
      a[k] = acc / static_cast<double>(k);
    else
      a[k] = ComplexDD(acc.re / DoubleDouble(static_cast<double>(k)), acc.im / DoubleDouble(static_cast<double>(k)));
    res[k] = out(a[k]);
  }
  return res;
}

template <class T>
std::vector<cplx> compose_kernel(std::span<const cplx> outer, std::span<const cplx> inner) {
  const std::size_t m = outer.size();
  std::vector<T> result(m), power(m), next(m);
  result[0] = from<T>(outer[0]);
  if (m == 1) return {out(result[0])};
  // power = inner^j; its coefficients below degree j vanish.
  for (std::size_t k = 0; k < m; ++k) power[k] = from<T>(inner[k]);
  for (std::size_t j = 1; j < m; ++j) {
    const T zj = from<T>(outer[j]);
    for (std::size_t k = j; k < m; ++k) result[k] += zj * power[k];
    if (j + 1 == m) break;
    for (std::size_t k = j + 1; k < m; ++k) {
      T acc{};
      // power has support >= j, inner has support >= 1
      for (std::size_t i = j; i + 1 <= k; ++i) acc += power[i] * from<T>(inner[k - i]);
      next[k] = acc;
    }
    for (std::size_t k = 0; k <= j; ++k) next[k] = T{};
    std::swap(power, next);
  }
  std::vector<cplx> res(m);
  for (std::size_t k = 0; k < m; ++k) res[k] = out(result[k]);
  return res;
}

template <class T>
std::vector<cplx> divide_kernel(std::span<const cplx> num, std::span<const cplx> den) {
  const std::size_t m = num.size();
  std::vector<T> q(m);
  std::vector<cplx> res(m);
  const T d0 = from<T>(den[0]);
  for (std::size_t k = 0; k < m; ++k) {
    T acc = from<T>(num[k]);
    for (std::size_t j = 1; j <= k; ++j) acc -= from<T>(den[j]) * q[k - j];
    q[k] = acc / d0;
    res[k] = out(q[k]);
  }
  return res;
}

bool compensated(int degree) { return degree > kCompensatedDegree; }

}  // namespace

ComplexSeries::ComplexSeries(int degree) {
  if (degree < 0) throw PreconditionError("series degree must be >= 0");
  c_.assign(static_cast<std::size_t>(degree) + 1, cplx{});
}

ComplexSeries::ComplexSeries(std::vector<cplx> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) throw PreconditionError("series needs at least one coefficient");
}

ComplexSeries ComplexSeries::identity(int degree) {
  ComplexSeries s(degree);
  if (degree >= 1) s[1] = 1.0;
  return s;
}

ComplexSeries ComplexSeries::constant(int degree, cplx value) {
  ComplexSeries s(degree);
  s[0] = value;
  return s;
}

cplx ComplexSeries::evaluate(cplx z) const {
  if (compensated(degree())) {
    ComplexDD acc;
    const ComplexDD zz(z);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * zz + ComplexDD(*it);
    return acc.value();
  }
  cplx acc{};
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

ComplexSeries ComplexSeries::truncated(int degree) const {
  if (degree < 0) throw PreconditionError("series degree must be >= 0");
  std::vector<cplx> c(static_cast<std::size_t>(degree) + 1, cplx{});
  for (int k = 0; k <= std::min(degree, this->degree()); ++k) c[static_cast<std::size_t>(k)] = c_[static_cast<std::size_t>(k)];
  return ComplexSeries(std::move(c));
}

ComplexSeries series_multiply(const ComplexSeries& a, const ComplexSeries& b) {
  require_same_degree(a, b, "series_multiply");
  return ComplexSeries(compensated(a.degree()) ? multiply_kernel<ComplexDD>(a.coefficients(), b.coefficients())
                                               : multiply_kernel<cplx>(a.coefficients(), b.coefficients()));
}

ComplexSeries series_log(const ComplexSeries& a) {
  if (std::abs(a[0] - 1.0) > kUnitTolerance) throw PreconditionError("series_log needs constant term 1");
  return ComplexSeries(compensated(a.degree()) ? log_kernel<ComplexDD>(a.coefficients())
                                               : log_kernel<cplx>(a.coefficients()));
}

ComplexSeries series_exp(const ComplexSeries& b) {
  if (std::abs(b[0]) > kUnitTolerance) throw PreconditionError("series_exp needs constant term 0");
  return ComplexSeries(compensated(b.degree()) ? exp_kernel<ComplexDD>(b.coefficients())
                                               : exp_kernel<cplx>(b.coefficients()));
}

ComplexSeries series_compose(const ComplexSeries& outer, const ComplexSeries& inner) {
  require_same_degree(outer, inner, "series_compose");
  if (inner[0] != 0.0) throw PreconditionError("series_compose needs an inner series with zero constant term");
  return ComplexSeries(compensated(outer.degree()) ? compose_kernel<ComplexDD>(outer.coefficients(), inner.coefficients())
                                                   : compose_kernel<cplx>(outer.coefficients(), inner.coefficients()));
}

ComplexSeries series_divide(const ComplexSeries& num, const ComplexSeries& den) {
  require_same_degree(num, den, "series_divide");
  if (den[0] == 0.0) throw PreconditionError("series_divide needs a nonzero constant term in the denominator");
  return ComplexSeries(compensated(num.degree()) ? divide_kernel<ComplexDD>(num.coefficients(), den.coefficients())
                                                 : divide_kernel<cplx>(num.coefficients(), den.coefficients()));
}

void write_series_csv(const ComplexSeries& s, std::ostream& out) {
  out << "k,re,im\n";
  char buf[96];
  for (int k = 0; k <= s.degree(); ++k) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", k, s[k].real(), s[k].imag());
    out << buf;
  }
}

}  // namespace spininterp
