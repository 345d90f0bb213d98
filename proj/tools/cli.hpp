#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace spininterp::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Every flag of every subcommand. Unused fields keep their defaults.
struct RunConfig {
  std::string subcommand;
  std::string spec_path;  // empty: Sherrington-Kirkpatrick on the hypercube
  std::string disorder_path;
  std::string out_path;   // empty: standard output
  std::string format = "json";
  int threads = 0;
  int n = 10;
  std::uint64_t seed = 1;

  // estimate / exact / curves
  double beta_re = 0.0;
  double beta_im = 0.0;
  double eps = 0.25;
  double delta = 0.3;
  double eta = 1e-2;
  std::string mode = "auto";
  std::string force_moments = "auto";
  double jitter = 0.0;
  double budget = 10.0;
  std::int64_t max_degree = 4096;
  int curves_N = 0;        // 0: from the zero-count schedule
  double gamma = 0.0;      // 0: gamma = eps_hat^2/64
  double kappa = 0.0;      // 0: from the zero-count schedule
  std::int64_t degree = 0;  // 0: automatic
  int samples = 4096;

  // exact
  int moments = 0;
  int k_max = 0;  // 0: the largest the sphere moment path supports
  int raster = 0;
  double re_min = -1.5;
  double re_max = 1.5;
  double im_min = -1.5;
  double im_max = 1.5;

  // zeros
  double radius = 0.9;
  double tol = 1e-9;
  int quad_points = 2048;

  // threshold
  int points = 100;
  std::string table = "phi";

  // verify
  std::string suite = "jensen";
  std::uint64_t seeds = 5;
  std::uint64_t first_seed = 1;

  // bench
  int repeat = 3;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, subcommand, spec_path, disorder_path, out_path, format,
                                                threads, n, seed, beta_re, beta_im, eps, delta, eta, mode,
                                                force_moments, jitter, budget, max_degree, curves_N, gamma, kappa,
                                                degree, samples, moments, k_max, raster, re_min, re_max, im_min,
                                                im_max, radius, tol, quad_points, points, table, suite, seeds,
                                                first_seed, repeat)

/// Parses argv (without the program name). Throws CLI::ParseError on bad flags.
RunConfig parse_arguments(const std::vector<std::string>& args);

/// Runs one subcommand. Exit codes: 0 success, 2 refused input (bad flags,
/// preconditions, capacity or work budget), 1 internal error. Errors are
/// written to `err` as {"error": {"kind", "message"}}.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchEntry {
  std::string kernel;
  double serial_seconds;
  double parallel_seconds;
  bool identical;  // serial and parallel results agree bitwise
};

/// Times each parallel kernel against its serial reference.
std::vector<BenchEntry> run_benchmarks(int repeat);

}  // namespace spininterp::cli
