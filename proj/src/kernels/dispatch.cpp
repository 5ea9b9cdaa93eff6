#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "gammaproc/error.hpp"
#include "gammaproc/kernels.hpp"
#include "kernels/table.hpp"

namespace gammaproc::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(GAMMAPROC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("GAMMAPROC_KERNELS")) {
    if (std::string_view(env) == "scalar") return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

const detail::KernelTable& table() noexcept {
#if defined(GAMMAPROC_HAVE_AVX2)
  if (current().load(std::memory_order_relaxed) == Backend::avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

void check_sizes(std::size_t a, std::size_t b, const char* fn) {
  if (a != b) throw DomainError(std::string(fn) + ": length mismatch");
}

}  // namespace

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

bool backend_available(Backend backend) noexcept {
  return backend == Backend::scalar || cpu_has_avx2();
}

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw DomainError("kernel backend " + std::string(backend_name(backend)) + " is not available");
  }
  current().store(backend, std::memory_order_relaxed);
}

std::string_view backend_name(Backend backend) noexcept {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

double sum(std::span<const double> x) { return table().sum(x.data(), x.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size(), "dot");
  return table().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size(), "axpy");
  table().axpy(alpha, x.data(), y.data(), x.size());
}

double affine_logsumexp(double a, std::span<const double> x, double b, std::span<const double> y) {
  check_sizes(x.size(), y.size(), "affine_logsumexp");
  return table().affine_logsumexp(nullptr, a, x.data(), b, y.data(), x.size());
}

double shifted_affine_logsumexp(std::span<const double> offset, double a, std::span<const double> x,
                                double b, std::span<const double> y) {
  check_sizes(x.size(), y.size(), "shifted_affine_logsumexp");
  check_sizes(offset.size(), x.size(), "shifted_affine_logsumexp");
  return table().affine_logsumexp(offset.data(), a, x.data(), b, y.data(), x.size());
}

}  // namespace gammaproc::kernels
