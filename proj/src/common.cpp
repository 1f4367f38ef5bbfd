#include "lsverify/common.hpp"

#include <gsl/gsl_integration.h>

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace lsv {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidArgument: return "invalid_argument";
    case Errc::NoCubeFits: return "no_cube_fits";
    case Errc::WindowRequired: return "window_required";
    case Errc::RhoMismatch: return "rho_mismatch";
    case Errc::UnboundedDomain: return "unbounded_domain";
    case Errc::EmptySpectrum: return "empty_spectrum";
    case Errc::Divergent: return "divergent";
    case Errc::ZeroMass: return "zero_mass";
    case Errc::NotThick: return "not_thick";
    case Errc::PreconditionViolated: return "precondition_violated";
    case Errc::NotFound: return "not_found";
    case Errc::ToleranceNotReached: return "tolerance_not_reached";
    case Errc::SchemaError: return "schema_error";
    case Errc::IoError: return "io_error";
  }
  return "unknown";
}

int thread_count() {
  static const int cached = [] {
    if (const char* env = std::getenv("LSVERIFY_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v >= 1) return static_cast<int>(v);
      return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex err_mutex;
  std::exception_ptr first_error;
  for (std::size_t c = 0; c < workers; ++c) {
    const std::size_t lo = n * c / workers;
    const std::size_t hi = n * (c + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

void LogSum::add(double log_term) { total_ = log_add(total_, log_term); }

double Rng::uniform() {
  // 53 random mantissa bits -> [0, 1).
  std::uint64_t bits = state_();
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::raw() { return state_(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Cplx Rng::complex_normal() {
  double re = normal();
  double im = normal();
  return Cplx(re, im);
}

const QuadRule& gauss_legendre_01(int order) {
  if (order < 1 || order > 512) {
    throw Error(Errc::InvalidArgument,
                "Gauss-Legendre order must be in [1, 512], got " + std::to_string(order));
  }
  static std::mutex mutex;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  gsl_integration_glfixed_table* table =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order));
  if (table == nullptr) {
    throw Error(Errc::InvalidArgument, "failed to build Gauss-Legendre table");
  }
  QuadRule rule;
  rule.x.resize(static_cast<std::size_t>(order));
  rule.w.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double xi = 0.0;
    double wi = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(i), &xi, &wi, table);
    rule.x[static_cast<std::size_t>(i)] = xi;
    rule.w[static_cast<std::size_t>(i)] = wi;
  }
  gsl_integration_glfixed_table_free(table);
  auto [pos, inserted] = cache.emplace(order, std::move(rule));
  (void)inserted;
  return pos->second;
}

QuadRule gauss_hermite(int order) {
  if (order < 1 || order > 512) {
    throw Error(Errc::InvalidArgument,
                "Gauss-Hermite order must be in [1, 512], got " + std::to_string(order));
  }
  gsl_integration_fixed_workspace* ws = gsl_integration_fixed_alloc(
      gsl_integration_fixed_hermite, static_cast<std::size_t>(order), 0.0, 1.0, 0.0, 0.0);
  if (ws == nullptr) {
    throw Error(Errc::InvalidArgument, "failed to build Gauss-Hermite rule");
  }
  const double* nodes = gsl_integration_fixed_nodes(ws);
  const double* weights = gsl_integration_fixed_weights(ws);
  QuadRule rule;
  rule.x.assign(nodes, nodes + order);
  rule.w.assign(weights, weights + order);
  gsl_integration_fixed_free(ws);
  return rule;
}

std::string format_g17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_vec(const Vec& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_g17(v[i]);
  }
  out += "]";
  return out;
}

}  // namespace lsv
