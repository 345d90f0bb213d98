#include "spininterp/oracle/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "spininterp/errors.hpp"

namespace spininterp {

namespace {

constexpr int kEdgePanels = 16;
constexpr int kMaxDepth = 40;
constexpr double kPanelTolerance = 1e-5;
constexpr int kNewtonIterations = 80;

struct ContourHit {};

struct Rect {
  double x0, x1, y0, y1;
  double half() const { return 0.5 * std::max(x1 - x0, y1 - y0); }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z, double slack) const {
    return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack && z.imag() <= y1 + slack;
  }
};

class Winding {
 public:
  Winding(const AnalyticFunction& f, double tiny) : f_(f), tiny_(tiny) {}

  // integral of f'/f along the segment a -> b
  cplx edge(cplx a, cplx b) const {
    cplx total{};
    const cplx step = (b - a) / static_cast<double>(kEdgePanels);
    for (int k = 0; k < kEdgePanels; ++k) {
      const cplx p0 = a + step * static_cast<double>(k);
      const cplx p1 = p0 + step;
      const cplx g0 = log_derivative(p0), g1 = log_derivative(p1);
      total += panel(p0, p1, g0, g1, 0.5 * (p1 - p0) * (g0 + g1), kPanelTolerance, 0);
    }
    return total;
  }

  // winding number of a rectangle, or nullopt if the contour is unsafe
  std::optional<int> rect(const Rect& r, double snap) const {
    try {
      const cplx a{r.x0, r.y0}, b{r.x1, r.y0}, c{r.x1, r.y1}, d{r.x0, r.y1};
      const cplx integral = edge(a, b) + edge(b, c) + edge(c, d) + edge(d, a);
      const double w = integral.imag() / (2.0 * std::numbers::pi);
      const double rounded = std::round(w);
      if (std::fabs(w - rounded) > snap || std::fabs(integral.real()) > 2.0 * std::numbers::pi * snap)
        return std::nullopt;
      return static_cast<int>(rounded);
    } catch (const ContourHit&) {
      return std::nullopt;
    }
  }

 private:
  cplx log_derivative(cplx z) const {
    const auto v = f_(z);
    if (!(std::abs(v.value) > tiny_) || !std::isfinite(std::abs(v.derivative))) throw ContourHit{};
    return v.derivative / v.value;
  }

  // adaptive trapezoid with one Richardson step
  cplx panel(cplx p0, cplx p1, cplx g0, cplx g1, cplx coarse, double tol, int depth) const {
    const cplx pm = 0.5 * (p0 + p1);
    const cplx gm = log_derivative(pm);
    const cplx fine = 0.25 * (p1 - p0) * (g0 + 2.0 * gm + g1);
    if (std::abs(fine - coarse) <= 3.0 * tol) return fine + (fine - coarse) / 3.0;
    if (depth >= kMaxDepth) throw ContourHit{};
    const cplx left = 0.5 * (pm - p0) * (g0 + gm);
    const cplx right = 0.5 * (p1 - pm) * (gm + g1);
    return panel(p0, pm, g0, gm, left, 0.5 * tol, depth + 1) + panel(pm, p1, gm, g1, right, 0.5 * tol, depth + 1);
  }

  const AnalyticFunction& f_;
  double tiny_;
};

double boundary_max_abs(const AnalyticFunction& f, cplx center, double radius) {
  double m = 0.0;
  for (int k = 0; k < 256; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 256.0;
    m = std::max(m, std::abs(f(center + radius * std::polar(1.0, t)).value));
  }
  return m;
}

std::optional<cplx> newton(const AnalyticFunction& f, cplx z, int multiplicity, double tol) {
  for (int it = 0; it < kNewtonIterations; ++it) {
    const auto v = f(z);
    if (v.value == 0.0) return z;
    if (v.derivative == 0.0) return std::nullopt;
    const cplx step = static_cast<double>(multiplicity) * v.value / v.derivative;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    if (std::abs(step) <= std::max(1e-15 * std::abs(z), 1e-3 * tol)) return z;
  }
  return z;
}

struct Work {
  Rect rect;
  int winding;
};

// Splits r at its centre shifted by `shift` into four rectangles.
std::array<Rect, 4> split(const Rect& r, cplx shift) {
  const double xm = 0.5 * (r.x0 + r.x1) + shift.real();
  const double ym = 0.5 * (r.y0 + r.y1) + shift.imag();
  return {Rect{r.x0, xm, r.y0, ym}, Rect{xm, r.x1, r.y0, ym}, Rect{r.x0, xm, ym, r.y1}, Rect{xm, r.x1, ym, r.y1}};
}

}  // namespace

int ZeroList::total_multiplicity() const {
  int total = 0;
  for (const auto& z : zeros) total += z.multiplicity;
  return total;
}

ZeroList locate_zeros(const AnalyticFunction& f, cplx center, double radius, const ZeroSearchOptions& options) {
  if (!(radius > 0.0)) throw PreconditionError("radius must be positive");
  if (!(options.tol > 0.0)) throw PreconditionError("tol must be positive");
  ZeroList out;
  out.disk_center = center;
  out.disk_radius = radius;
  out.boundary_max = boundary_max_abs(f, center, radius);
  const double tiny = 1e-300;
  const Winding winding(f, tiny);
  const double snap = options.snap_threshold;

  // outer square, deliberately off-centre so symmetric zeros avoid its edges
  const cplx offset = radius * cplx(0.00731, 0.00419);
  const double half = radius * 1.02 + std::abs(offset);
  std::optional<int> w0;
  Rect outer{};
  for (int attempt = 0; attempt <= options.max_retries && !w0; ++attempt) {
    const cplx c = center + offset + options.tol * cplx(0.5, 0.5) * static_cast<double>(attempt);
    outer = Rect{c.real() - half, c.real() + half, c.imag() - half, c.imag() + half};
    w0 = winding.rect(outer, snap);
  }
  if (!w0) throw std::runtime_error("locate_zeros: a zero sits on the outer contour after all retries");
  if (*w0 < 0) throw std::runtime_error("locate_zeros: negative winding number (f not analytic?)");

  const double newton_size = radius / 32.0;
  std::vector<Work> stack;
  if (*w0 > 0) stack.push_back({outer, *w0});
  std::vector<Zero> found;
  while (!stack.empty()) {
    const Work w = stack.back();
    stack.pop_back();
    const double h = w.rect.half();
    if (w.winding == 1 && h <= newton_size) {
      const auto z = newton(f, w.rect.center(), 1, options.tol);
      if (z && w.rect.contains(*z, options.tol)) {
        found.push_back({*z, 1});
        continue;
      }
    }
    if (h <= options.tol) {
      const auto z = newton(f, w.rect.center(), w.winding, options.tol);
      found.push_back({z && w.rect.contains(*z, options.tol) ? *z : w.rect.center(), w.winding});
      continue;
    }
    bool done = false;
    for (int attempt = 0; attempt <= options.max_retries && !done; ++attempt) {
      const auto parts = split(w.rect, options.tol * cplx(0.5, 0.5) * static_cast<double>(attempt));
      std::array<int, 4> ws{};
      bool ok = true;
      for (std::size_t q = 0; q < 4 && ok; ++q) {
        const auto r = winding.rect(parts[q], snap);
        ok = r.has_value() && *r >= 0;
        if (ok) ws[q] = *r;
      }
      if (!ok || ws[0] + ws[1] + ws[2] + ws[3] != w.winding) continue;
      for (std::size_t q = 0; q < 4; ++q)
        if (ws[q] > 0) stack.push_back({parts[q], ws[q]});
      done = true;
    }
    if (!done) throw std::runtime_error("locate_zeros: a zero sits on a subdivision contour after all retries");
  }

  // keep zeros inside the open disk, merging duplicates
  std::sort(found.begin(), found.end(), [](const Zero& a, const Zero& b) {
    return a.location.real() != b.location.real() ? a.location.real() < b.location.real()
                                                  : a.location.imag() < b.location.imag();
  });
  for (const auto& z : found) {
    if (!(std::abs(z.location - center) < radius)) continue;
    bool merged = false;
    for (auto& kept : out.zeros)
      if (std::abs(kept.location - z.location) <= 10.0 * options.tol) {
        kept.multiplicity += z.multiplicity;
        merged = true;
        break;
      }
    if (!merged) out.zeros.push_back(z);
  }
  for (const auto& z : out.zeros) out.residual = std::max(out.residual, std::abs(f(z.location).value));
  return out;
}

int winding_number_circle(const AnalyticFunction& f, cplx center, double radius) {
  double previous = NAN;
  for (int samples = 256; samples <= (1 << 18); samples *= 2) {
    cplx acc{};
    for (int k = 0; k < samples; ++k) {
      const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
      const auto v = f(center + radius * u);
      if (v.value == 0.0) throw std::runtime_error("winding_number_circle: f vanishes on the circle");
      acc += v.derivative / v.value * radius * u;
    }
    const double w = acc.real() / samples;
    if (std::fabs(w - previous) < 1e-6) {
      const double rounded = std::round(w);
      if (std::fabs(w - rounded) > 0.2) throw std::runtime_error("winding_number_circle: non-integer winding");
      return static_cast<int>(rounded);
    }
    previous = w;
  }
  throw std::runtime_error("winding_number_circle: quadrature did not stabilise");
}

JensenResult jensen_check(const AnalyticFunction& f, double radius, int quad_points, const std::vector<Zero>& zeros) {
  if (quad_points < 1) throw PreconditionError("quad_points must be positive");
  const cplx f0 = f(0.0).value;
  if (f0 == 0.0) throw PreconditionError("jensen_check needs f(0) != 0");
  double lhs = 0.0;
  for (const auto& z : zeros)
    if (std::abs(z.location) < radius) lhs += z.multiplicity * std::log(radius / std::abs(z.location));
  double rhs = 0.0;
  for (int q = 0; q < quad_points; ++q) {
    const cplx z = std::polar(radius, 2.0 * std::numbers::pi * q / quad_points);
    rhs += std::log(std::abs(f(z).value / f0));
  }
  return {lhs, rhs / quad_points};
}

void write_zeros_csv(const ZeroList& zeros, std::ostream& out) {
  out << "re,im,multiplicity\n";
  char buf[96];
  for (const auto& z : zeros.zeros) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", z.location.real(), z.location.imag(), z.multiplicity);
    out << buf;
  }
}

void write_raster_csv(const AnalyticFunction& f, double re0, double re1, double im0, double im1, int resolution,
                      std::ostream& out) {
  if (resolution < 1) throw PreconditionError("resolution must be positive");
  out << "re,im,abs,arg\n";
  char buf[128];
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      const double x = resolution == 1 ? re0 : re0 + (re1 - re0) * i / (resolution - 1);
      const double y = resolution == 1 ? im0 : im0 + (im1 - im0) * j / (resolution - 1);
      const cplx v = f({x, y}).value;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x, y, std::abs(v), std::arg(v));
      out << buf;
    }
}

}  // namespace spininterp
