#pragma once

#include <span>
#include <string_view>

// Data-parallel inner loops shared by the samplers and the evaluation metric.
// Each kernel has a scalar reference implementation and, where the CPU
// supports it, an AVX2 implementation selected at runtime. The two agree to
// rounding (see tests/test_kernels.cpp), not bit-for-bit: the vector versions
// reassociate sums across lanes.
//
// The environment variable GAMMAPROC_KERNELS=scalar forces the reference path.

namespace gammaproc::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend() noexcept;
bool backend_available(Backend backend) noexcept;

/// Throws DomainError if the backend is not available on this CPU.
void set_backend(Backend backend);

std::string_view backend_name(Backend backend) noexcept;

double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// log sum_i exp(a * x[i] - b * y[i]); -inf for empty input.
double affine_logsumexp(double a, std::span<const double> x, double b, std::span<const double> y);

/// Same as affine_logsumexp, also adding a per-element offset: log sum_i
/// exp(offset[i] + a * x[i] - b * y[i]).
double shifted_affine_logsumexp(std::span<const double> offset, double a, std::span<const double> x,
                                double b, std::span<const double> y);

}  // namespace gammaproc::kernels
