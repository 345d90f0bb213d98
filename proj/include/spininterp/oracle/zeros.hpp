#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "spininterp/oracle/enumeration.hpp"

namespace spininterp {

/// f and f' at a point.
using AnalyticFunction = std::function<ValueAndDerivative(cplx)>;

struct Zero {
  cplx location;
  int multiplicity;
};

struct ZeroList {
  cplx disk_center;
  double disk_radius = 0.0;
  std::vector<Zero> zeros;
  /// max |f| at the reported zeros
  double residual = 0.0;
  /// max |f| over a 256-point sample of the disk boundary
  double boundary_max = 0.0;

  int total_multiplicity() const;
};

struct ZeroSearchOptions {
  double tol = 1e-9;
  int max_retries = 5;
  double snap_threshold = 0.2;
};

/// Zeros of f strictly inside D(center, radius) by recursive quadrisection with
/// argument-principle winding numbers and Newton refinement. f must be analytic
/// on a neighbourhood of the square of half-width ~1.05 radius around center.
ZeroList locate_zeros(const AnalyticFunction& f, cplx center, double radius, const ZeroSearchOptions& options = {});

/// (1/2 pi i) closed integral of f'/f over the circle |z - center| = radius,
/// by the trapezoid rule with doubling until stable. Throws if the result is
/// not near an integer.
int winding_number_circle(const AnalyticFunction& f, cplx center, double radius);

struct JensenResult {
  double lhs;
  double rhs;
};

/// lhs = sum over zeros in D(0, R) of mult * log(R/|w|);
/// rhs = mean over quad_points angles of log|f(R e^{i theta}) / f(0)|.
JensenResult jensen_check(const AnalyticFunction& f, double radius, int quad_points, const std::vector<Zero>& zeros);

/// CSV re,im,multiplicity.
void write_zeros_csv(const ZeroList& zeros, std::ostream& out);

/// CSV re,im,abs,arg over a resolution x resolution grid of [re0,re1]x[im0,im1].
void write_raster_csv(const AnalyticFunction& f, double re0, double re1, double im0, double im1, int resolution,
                      std::ostream& out);

}  // namespace spininterp
