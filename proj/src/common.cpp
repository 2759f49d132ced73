#include "maxlab/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace maxlab {

int thread_count() {
  if (const char* env = std::getenv("MAXLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

double chunked_sum(uint64_t count, uint64_t chunk,
                   const std::function<double(uint64_t, uint64_t)>& partial) {
  if (chunk == 0) chunk = 4096;
  uint64_t nchunks = (count + chunk - 1) / chunk;
  std::vector<double> sums(nchunks, 0.0);
  int nt = thread_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (int64_t ci = 0; ci < static_cast<int64_t>(nchunks); ++ci) {
    uint64_t lo = static_cast<uint64_t>(ci) * chunk;
    uint64_t hi = lo + chunk < count ? lo + chunk : count;
    sums[static_cast<size_t>(ci)] = partial(lo, hi);
  }
  (void)nt;
  double total = 0.0;
  for (double s : sums) total += s;
  return total;
}

void parallel_for_index(size_t count, const std::function<void(size_t)>& body) {
  int nt = thread_count();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#endif
  for (int64_t i = 0; i < static_cast<int64_t>(count); ++i)
    body(static_cast<size_t>(i));
  (void)nt;
}

double sphere_measure(int n) {
  require(n >= 1 && n <= 3, "sphere_measure: n must be 1, 2 or 3");
  const double pi = 3.14159265358979323846;
  if (n == 1) return 2.0;
  if (n == 2) return 2.0 * pi;
  return 4.0 * pi;
}

double ball_volume(int n) {
  require(n >= 1 && n <= 3, "ball_volume: n must be 1, 2 or 3");
  const double pi = 3.14159265358979323846;
  if (n == 1) return 2.0;
  if (n == 2) return pi;
  return 4.0 * pi / 3.0;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace maxlab
