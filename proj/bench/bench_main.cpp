#include <cstdio>
#include <cstdlib>

#include "cli.hpp"
#include "spininterp/util/parallel.hpp"

int main(int argc, char** argv) {
  const int repeat = argc > 1 ? std::atoi(argv[1]) : 3;
  spininterp::set_thread_cap(spininterp::threads_from_environment());
  std::printf("%-28s %12s %12s %8s %s\n", "kernel", "serial_s", "parallel_s", "speedup", "identical");
  for (const auto& e : spininterp::cli::run_benchmarks(repeat > 0 ? repeat : 1))
    std::printf("%-28s %12.4f %12.4f %8.2f %s\n", e.kernel.c_str(), e.serial_seconds, e.parallel_seconds,
                e.serial_seconds / e.parallel_seconds, e.identical ? "yes" : "NO");
}
