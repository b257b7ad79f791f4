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

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "wsrank/simd/kernels.hpp"

namespace wsrank::simd {

namespace {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*dot_f32)(const float*, const float*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::dot_f32, &scalar::axpy};
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::dot_f32, &avx2::axpy};
constexpr KernelTable kNeonTable{&neon::dot, &neon::dot_f32, &neon::axpy};

const KernelTable& table_for(Isa isa) {
  switch (isa) {
    case Isa::kAvx2:
      return kAvx2Table;
    case Isa::kNeon:
      return kNeonTable;
    case Isa::kScalar:
      break;
  }
  return kScalarTable;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{&table_for(detect_isa())};
  return table;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detect_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
    case Isa::kScalar:
      break;
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* env = std::getenv("WSRANK_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (want == isa_name(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) isa = Isa::kScalar;
  active().store(isa, std::memory_order_relaxed);
  active_table().store(&table_for(isa), std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_table().load(std::memory_order_relaxed)->dot(a.data(), b.data(),
                                                             a.size());
}

double dot_f32(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return active_table().load(std::memory_order_relaxed)->dot_f32(a.data(), b.data(),
                                                                 a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_table().load(std::memory_order_relaxed)->axpy(alpha, x.data(), y.data(),
                                                       x.size());
}

void gemv(std::span<const double> weights, std::span<const double> bias,
          std::span<const double> x, std::span<double> out) {
  const std::size_t rows = out.size();
  const std::size_t cols = x.size();
  assert(weights.size() == rows * cols && bias.size() == rows);
  const KernelTable* k = active_table().load(std::memory_order_relaxed);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = bias[r] + k->dot(weights.data() + r * cols, x.data(), cols);
  }
}

void add_outer(std::span<const double> delta, std::span<const double> x,
               std::span<double> grad_w) {
  const std::size_t cols = x.size();
  assert(grad_w.size() == delta.size() * cols);
  const KernelTable* k = active_table().load(std::memory_order_relaxed);
  for (std::size_t r = 0; r < delta.size(); ++r) {
    if (delta[r] == 0.0) continue;
    k->axpy(delta[r], x.data(), grad_w.data() + r * cols, cols);
  }
}

void gemv_transposed_acc(std::span<const double> weights,
                         std::span<const double> delta,
                         std::span<double> grad_x) {
  const std::size_t cols = grad_x.size();
  assert(weights.size() == delta.size() * cols);
  const KernelTable* k = active_table().load(std::memory_order_relaxed);
  for (std::size_t r = 0; r < delta.size(); ++r) {
    if (delta[r] == 0.0) continue;
    k->axpy(delta[r], weights.data() + r * cols, grad_x.data(), cols);
  }
}

}  // namespace wsrank::simd
