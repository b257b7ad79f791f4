// Copyright 2026 The wsrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense arithmetic kernels shared by the similarity and scorer code.
//
// Every kernel has a portable scalar reference implementation. Vector
// variants (AVX2+FMA on x86-64, NEON on AArch64) are chosen once at runtime
// from the CPU feature set and can be pinned with set_isa() or the
// WSRANK_SIMD environment variable ("scalar", "avx2", "neon").
//
// Reduction order inside a variant is fixed, so results are reproducible
// for a given ISA. Different ISAs agree to rounding, not bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace wsrank::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

/// True when `isa` can run on this machine and was compiled in.
bool isa_available(Isa isa);

/// Best available ISA, honoring WSRANK_SIMD when set to an available one.
Isa detect_isa();

Isa active_isa();
void set_isa(Isa isa);

// Dispatched entry points. Spans must have equal length.
double dot(std::span<const double> a, std::span<const double> b);
double dot_f32(std::span<const float> a, std::span<const float> b);  // f64 accumulation
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// out[r] = bias[r] + dot(W[r, :], x) for a row-major rows x cols matrix.
void gemv(std::span<const double> weights, std::span<const double> bias,
          std::span<const double> x, std::span<double> out);

/// grad_w[r, :] += delta[r] * x  (outer-product accumulation).
void add_outer(std::span<const double> delta, std::span<const double> x,
               std::span<double> grad_w);

/// grad_x[c] += sum_r W[r, c] * delta[r]  (transposed matrix-vector product).
void gemv_transposed_acc(std::span<const double> weights,
                         std::span<const double> delta,
                         std::span<double> grad_x);

// Per-ISA implementations, exposed for equivalence testing.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double dot_f32(const float* a, const float* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double dot_f32(const float* a, const float* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double dot_f32(const float* a, const float* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace neon

}  // namespace wsrank::simd
