// Compiled with -mavx2 -mfma. Only reached through dispatch after avx2::available().

#include <algorithm>

#include "carseq/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define CARSEQ_HAVE_AVX2 1
#else
#define CARSEQ_HAVE_AVX2 0
#endif

namespace carseq::kernels::avx2 {

#if CARSEQ_HAVE_AVX2

bool available() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

}  // namespace

PenaltySums window_penalties(std::span<const std::int32_t> prefix, int capacity, int window,
                             int t_begin, int t_end, std::span<const double> over_weight,
                             std::span<const double> under_weight,
                             std::span<std::int32_t> over_count,
                             std::span<std::int32_t> under_count) {
  PenaltySums sums;
  // Windows clipped at the sequence start have a constant left edge; do them scalar.
  const int body = std::min(t_end, std::max(t_begin, window - 1));
  if (body > t_begin) {
    sums = scalar::window_penalties(prefix, capacity, window, t_begin, body, over_weight,
                                    under_weight, over_count, under_count);
  }

  const __m256i cap = _mm256_set1_epi32(capacity);
  const __m256i zero = _mm256_setzero_si256();
  __m256d acc_over = _mm256_setzero_pd();
  __m256d acc_under = _mm256_setzero_pd();
  int t = body;
  for (; t + 8 <= t_end; t += 8) {
    const __m256i right =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prefix.data() + t + 1));
    const __m256i left =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prefix.data() + t + 1 - window));
    const __m256i usage = _mm256_sub_epi32(right, left);
    const __m256i over = _mm256_max_epi32(zero, _mm256_sub_epi32(usage, cap));
    const __m256i under = _mm256_max_epi32(zero, _mm256_sub_epi32(cap, usage));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(over_count.data() + t), over);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(under_count.data() + t), under);

    const __m256d over_lo = _mm256_cvtepi32_pd(_mm256_castsi256_si128(over));
    const __m256d over_hi = _mm256_cvtepi32_pd(_mm256_extracti128_si256(over, 1));
    const __m256d under_lo = _mm256_cvtepi32_pd(_mm256_castsi256_si128(under));
    const __m256d under_hi = _mm256_cvtepi32_pd(_mm256_extracti128_si256(under, 1));
    acc_over = _mm256_fmadd_pd(_mm256_loadu_pd(over_weight.data() + t), over_lo, acc_over);
    acc_over = _mm256_fmadd_pd(_mm256_loadu_pd(over_weight.data() + t + 4), over_hi, acc_over);
    acc_under = _mm256_fmadd_pd(_mm256_loadu_pd(under_weight.data() + t), under_lo, acc_under);
    acc_under =
        _mm256_fmadd_pd(_mm256_loadu_pd(under_weight.data() + t + 4), under_hi, acc_under);
  }
  sums.over += hsum(acc_over);
  sums.under += hsum(acc_under);

  if (t < t_end) {
    const PenaltySums tail = scalar::window_penalties(prefix, capacity, window, t, t_end,
                                                      over_weight, under_weight, over_count,
                                                      under_count);
    sums.over += tail.over;
    sums.under += tail.under;
  }
  return sums;
}

void evaporate(std::span<double> tau, double keep, double floor) {
  const __m256d k = _mm256_set1_pd(keep);
  const __m256d f = _mm256_set1_pd(floor);
  std::size_t i = 0;
  const std::size_t n = tau.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(tau.data() + i);
    _mm256_storeu_pd(tau.data() + i, _mm256_max_pd(f, _mm256_mul_pd(v, k)));
  }
  for (; i < n; ++i) tau[i] = std::max(floor, tau[i] * keep);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

#else

bool available() { return false; }

PenaltySums window_penalties(std::span<const std::int32_t> prefix, int capacity, int window,
                             int t_begin, int t_end, std::span<const double> over_weight,
                             std::span<const double> under_weight,
                             std::span<std::int32_t> over_count,
                             std::span<std::int32_t> under_count) {
  return scalar::window_penalties(prefix, capacity, window, t_begin, t_end, over_weight,
                                  under_weight, over_count, under_count);
}

void evaporate(std::span<double> tau, double keep, double floor) {
  scalar::evaporate(tau, keep, floor);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  return scalar::squared_distance(a, b);
}

#endif

}  // namespace carseq::kernels::avx2
