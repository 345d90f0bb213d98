#include "spininterp/util/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace spininterp {

namespace {
int g_thread_cap = 0;
}

void set_thread_cap(int threads) {
  g_thread_cap = threads > 0 ? threads : 0;
  if (g_thread_cap > 0) omp_set_num_threads(g_thread_cap);
}

int thread_cap() { return g_thread_cap > 0 ? g_thread_cap : omp_get_max_threads(); }

int threads_from_environment() {
  const char* raw = std::getenv("SPININTERP_THREADS");
  if (raw == nullptr) return 0;
  try {
    const int value = std::stoi(raw);
    return value > 0 ? value : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace spininterp
