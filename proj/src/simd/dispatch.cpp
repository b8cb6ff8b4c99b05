#include <atomic>
#include <cstdlib>
#include <cstring>

#include "czx/simd.hpp"
#include "kernels_internal.hpp"

namespace czx::simd {
namespace {

const KernelTable kScalar{Isa::scalar, detail::dot_scalar, detail::axpy_scalar,
                          detail::matvec_scalar, detail::max_scalar};
#if defined(CZX_HAVE_AVX2)
const KernelTable kAvx2{Isa::avx2, detail::dot_avx2, detail::axpy_avx2, detail::matvec_avx2,
                        detail::max_avx2};
#endif
#if defined(CZX_HAVE_NEON) && defined(__ARM_NEON) && defined(__aarch64__)
const KernelTable kNeon{Isa::neon, detail::dot_neon, detail::axpy_neon, detail::matvec_neon,
                        detail::max_neon};
#endif

bool cpu_has_avx2() {
#if defined(CZX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  const char* env = std::getenv("CZX_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return &kScalar;
#if defined(CZX_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
#if defined(CZX_HAVE_NEON) && defined(__ARM_NEON) && defined(__aarch64__)
  return &kNeon;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&kScalar};
#if defined(CZX_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&kAvx2);
#endif
#if defined(CZX_HAVE_NEON) && defined(__ARM_NEON) && defined(__aarch64__)
  out.push_back(&kNeon);
#endif
  return out;
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = pick_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force(Isa isa) {
  for (const KernelTable* t : available_tables()) {
    if (t->isa == isa) {
      g_active.store(t, std::memory_order_release);
      return;
    }
  }
  g_active.store(&kScalar, std::memory_order_release);
}

std::string isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    default: return "scalar";
  }
}

}  // namespace czx::simd
