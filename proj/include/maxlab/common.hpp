#pragma once

// Small shared utilities: fixed-capacity points, error types, deterministic
// counter-based RNG, and a chunked parallel reduction that gives the same
// result regardless of thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxlab {

// Point in R^n, n <= 3.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int n = 0;

  Vec() = default;
  Vec(double x) : c{x, 0.0, 0.0}, n(1) {}
  Vec(double x, double y) : c{x, y, 0.0}, n(2) {}
  Vec(double x, double y, double z) : c{x, y, z}, n(3) {}

  double operator[](int i) const { return c[static_cast<size_t>(i)]; }
  double& operator[](int i) { return c[static_cast<size_t>(i)]; }

  double norm2() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
  double norm() const { return std::sqrt(norm2()); }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < n; ++i) r.c[static_cast<size_t>(i)] += o[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < n; ++i) r.c[static_cast<size_t>(i)] -= o[i];
    return r;
  }
  Vec operator*(double s) const {
    Vec r = *this;
    for (int i = 0; i < n; ++i) r.c[static_cast<size_t>(i)] *= s;
    return r;
  }
  bool operator==(const Vec& o) const { return n == o.n && c == o.c; }
};

inline Vec zero_vec(int n) {
  Vec v;
  v.n = n;
  return v;
}

// Error taxonomy. Precondition violations -> domain_error; quadrature or
// Monte-Carlo estimates that miss their tolerance -> accuracy_error; bad
// fit inputs -> fit_error; bad experiment configs -> config_error.
struct domain_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct accuracy_error : std::runtime_error {
  double estimate;
  double error_bound;
  accuracy_error(const std::string& what, double est, double err)
      : std::runtime_error(what), estimate(est), error_bound(err) {}
};

struct fit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw domain_error(msg);
}

// Counter-based generator: sample i of a stream is a pure function of
// (seed, i), so parallel evaluation order cannot change the draw.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct CounterRng {
  uint64_t seed;
  explicit CounterRng(uint64_t s) : seed(s) {}

  // uniform in [0,1), lane k of sample i
  double uniform(uint64_t i, uint64_t lane) const {
    uint64_t bits = mix64(seed ^ mix64(i * 0x100000001b3ull + lane));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
};

// Deterministic parallel map-reduce: work is split into fixed chunks whose
// partial sums are combined in chunk order, independent of scheduling.
double chunked_sum(uint64_t count, uint64_t chunk,
                   const std::function<double(uint64_t, uint64_t)>& partial);

// Parallel loop over [0, count) with disjoint writes. Honors MAXLAB_THREADS.
void parallel_for_index(size_t count, const std::function<void(size_t)>& body);

int thread_count();

inline double sq(double x) { return x * x; }

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }

// |S^{n-1}|: 2, 2*pi, 4*pi for n = 1, 2, 3
double sphere_measure(int n);

// volume of the unit ball in R^n
double ball_volume(int n);

std::string format_double(double v);

}  // namespace maxlab
