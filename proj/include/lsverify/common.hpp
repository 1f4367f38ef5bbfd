#pragma once

// Shared numeric infrastructure: error model, deterministic RNG, cached
// quadrature rules, log-space accumulation, deterministic parallel loops,
// and locale-independent numeric formatting.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsv {

using Vec = std::vector<double>;
using Cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846264338327950288;

enum class Errc {
  InvalidArgument,
  NoCubeFits,
  WindowRequired,
  RhoMismatch,
  UnboundedDomain,
  EmptySpectrum,
  Divergent,
  ZeroMass,
  NotThick,
  PreconditionViolated,
  NotFound,
  ToleranceNotReached,
  SchemaError,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Worker-thread budget: LSVERIFY_THREADS if set (clamped to >= 1), otherwise
// the hardware concurrency. Read once per process.
int thread_count();

// Runs body(i) for i in [0, n). Work is split into contiguous chunks so any
// result written to per-index storage is independent of the thread count;
// reductions over that storage must be done by the caller in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// log(exp(a) + exp(b)) without overflow; handles -inf identities.
double log_add(double a, double b);

// Accumulates log-space terms: after add(log t_i), log() is log(sum t_i).
class LogSum {
 public:
  void add(double log_term);
  double log() const { return total_; }

 private:
  double total_ = -kInf;
};

// Compensated serial summation (fixed order => deterministic).
struct Kahan {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// Deterministic random stream: mt19937_64 draws mapped to doubles by fixed
// arithmetic (no standard-library distributions, whose output is
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  // Uniform in [0, 1).
  double uniform();
  // Standard normal via Box-Muller.
  double normal();
  // Independent N(0,1) real and imaginary parts.
  Cplx complex_normal();
  std::uint64_t raw();

 private:
  std::mt19937_64 state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct QuadRule {
  Vec x;
  Vec w;
};

// Gauss-Legendre rule on [0, 1]; cached per order, thread-safe.
const QuadRule& gauss_legendre_01(int order);

// Gauss-Hermite rule for weight exp(-t^2) on the real line.
QuadRule gauss_hermite(int order);

// Shortest-width decimal with 17 significant digits, '.' separator, no locale.
std::string format_g17(double v);

std::string format_vec(const Vec& v);

}  // namespace lsv
