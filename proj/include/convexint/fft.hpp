/// @file fft.hpp
/// @brief Iterative radix-2 complex FFT plus axis transforms for d-dim arrays.
///
/// Grids are powers of two by construction, so radix-2 covers every case.
/// Forward transform is an unnormalized sum; the inverse carries the 1/n.
#pragma once

#include <complex>
#include <map>
#include <vector>

#include "convexint/util.hpp"

namespace convexint {

using cplx = std::complex<double>;

namespace detail {

struct FftPlan {
  int n = 0;
  std::vector<int> rev;
  std::vector<cplx> tw;  // twiddles e^{-2pi i k / len} per stage, packed

  explicit FftPlan(int n_) : n(n_) {
    require(n > 0 && (n & (n - 1)) == 0, "fft: size must be a power of two");
    rev.resize(n);
    int lg = 0;
    while ((1 << lg) < n) ++lg;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int b = 0; b < lg; ++b)
        if (i & (1 << b)) r |= 1 << (lg - 1 - b);
      rev[i] = r;
    }
    tw.reserve(n);
    for (int len = 2; len <= n; len <<= 1)
      for (int k = 0; k < len / 2; ++k) {
        double ang = -2.0 * M_PI * k / len;
        tw.emplace_back(std::cos(ang), std::sin(ang));
      }
  }
};

inline const FftPlan& fft_plan(int n) {
  static std::map<int, FftPlan> plans;
  auto it = plans.find(n);
  if (it == plans.end()) it = plans.emplace(n, FftPlan(n)).first;
  return it->second;
}

}  // namespace detail

/// In-place FFT of length n (power of two). inverse=true applies conj twiddles
/// and scales by 1/n.
inline void fft_inplace(cplx* a, int n, bool inverse) {
  const auto& plan = detail::fft_plan(n);
  for (int i = 0; i < n; ++i) {
    int r = plan.rev[i];
    if (i < r) std::swap(a[i], a[r]);
  }
  std::size_t toff = 0;
  for (int len = 2; len <= n; len <<= 1) {
    int half = len / 2;
    for (int i = 0; i < n; i += len) {
      for (int k = 0; k < half; ++k) {
        cplx w = plan.tw[toff + k];
        if (inverse) w = std::conj(w);
        cplx u = a[i + k];
        cplx v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
    toff += half;
  }
  if (inverse) {
    double s = 1.0 / n;
    for (int i = 0; i < n; ++i) a[i] *= s;
  }
}

inline void fft(std::vector<cplx>& a, bool inverse) { fft_inplace(a.data(), (int)a.size(), inverse); }

/// Transform a d-dim row-major array (last axis fastest) along one axis.
inline void fft_axis(cplx* data, int dim, int n, int axis, bool inverse) {
  std::int64_t vol = 1;
  for (int a = 0; a < dim; ++a) vol *= n;
  std::int64_t stride = 1;
  for (int a = dim - 1; a > axis; --a) stride *= n;
  std::int64_t block = stride * n;  // span of one full line set
  std::vector<cplx> line(n);
  for (std::int64_t base = 0; base < vol; base += block) {
    for (std::int64_t off = 0; off < stride; ++off) {
      cplx* p = data + base + off;
      if (stride == 1) {
        fft_inplace(p, n, inverse);
      } else {
        for (int i = 0; i < n; ++i) line[i] = p[i * stride];
        fft_inplace(line.data(), n, inverse);
        for (int i = 0; i < n; ++i) p[i * stride] = line[i];
      }
    }
  }
}

/// Full d-dim transform.
inline void fft_nd(cplx* data, int dim, int n, bool inverse) {
  for (int a = 0; a < dim; ++a) fft_axis(data, dim, n, a, inverse);
}

/// Integer frequency of bin k on an n-grid: 0..n/2-1, then -n/2..-1.
inline int fft_freq(int k, int n) { return k < n / 2 ? k : k - n; }

}  // namespace convexint
