/// @file field.hpp
/// @brief Periodic fields on the unit d-torus sampled on uniform power-of-two
///        grids, with spectral calculus (derivatives, Poisson inverse,
///        de-aliased products) and Lebesgue/Sobolev norms.
///
/// Convention: samples live at x_i = i/N. A field is identified with its
/// band-limited trigonometric interpolant; spectra are kept Nyquist-free so
/// that every derivative multiplier is unambiguous and real fields stay real.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "convexint/fft.hpp"
#include "convexint/util.hpp"

namespace convexint {

struct GridSpec {
  int dim = 3;
  int n = 32;
  std::int64_t volume() const {
    std::int64_t v = 1;
    for (int a = 0; a < dim; ++a) v *= n;
    return v;
  }
  bool operator==(const GridSpec&) const = default;
};

class PeriodicField {
public:
  PeriodicField() = default;
  PeriodicField(GridSpec g, int comps, double init = 0.0)
      : g_(g), comps_(comps), v_(static_cast<std::size_t>(g.volume()) * comps, init) {
    require((g.n & (g.n - 1)) == 0 && g.n >= 4, "grid size must be a power of two >= 4");
    require(g.dim >= 2, "dim must be >= 2");
    require(comps == 1 || comps == g.dim, "components must be 1 or dim");
  }
  static PeriodicField scalar(int dim, int n) { return PeriodicField({dim, n}, 1); }
  static PeriodicField vector(int dim, int n) { return PeriodicField({dim, n}, dim); }

  int dim() const { return g_.dim; }
  int n() const { return g_.n; }
  int comps() const { return comps_; }
  GridSpec grid() const { return g_; }
  std::int64_t volume() const { return g_.volume(); }

  double* comp(int c) { return v_.data() + static_cast<std::size_t>(c) * volume(); }
  const double* comp(int c) const { return v_.data() + static_cast<std::size_t>(c) * volume(); }
  std::span<double> comp_span(int c) { return {comp(c), static_cast<std::size_t>(volume())}; }
  std::span<const double> comp_span(int c) const { return {comp(c), static_cast<std::size_t>(volume())}; }

  double& operator()(int c, std::int64_t idx) { return comp(c)[idx]; }
  double operator()(int c, std::int64_t idx) const { return comp(c)[idx]; }

  PeriodicField& operator+=(const PeriodicField& o) {
    require(v_.size() == o.v_.size(), "field size mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  PeriodicField& operator-=(const PeriodicField& o) {
    require(v_.size() == o.v_.size(), "field size mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  PeriodicField& operator*=(double s) {
    for (auto& x : v_) x *= s;
    return *this;
  }
  void axpy(double a, const PeriodicField& o) {
    require(v_.size() == o.v_.size(), "field size mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * o.v_[i];
  }
  void fill(double x) { std::fill(v_.begin(), v_.end(), x); }

  double mean(int c = 0) const {
    StableSum s;
    for (double x : comp_span(c)) s.add(x);
    return s.value() / volume();
  }

  /// Pointwise Euclidean magnitude across components at flat index i.
  double magnitude(std::int64_t i) const {
    if (comps_ == 1) return std::abs(v_[i]);
    double s = 0;
    for (int c = 0; c < comps_; ++c) {
      double x = comp(c)[i];
      s += x * x;
    }
    return std::sqrt(s);
  }

  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }

private:
  GridSpec g_;
  int comps_ = 1;
  std::vector<double> v_;
};

class SpectralField {
public:
  SpectralField() = default;
  SpectralField(GridSpec g, int comps)
      : g_(g), comps_(comps), v_(static_cast<std::size_t>(g.volume()) * comps) {}

  int dim() const { return g_.dim; }
  int n() const { return g_.n; }
  int comps() const { return comps_; }
  GridSpec grid() const { return g_; }
  std::int64_t volume() const { return g_.volume(); }
  cplx* comp(int c) { return v_.data() + static_cast<std::size_t>(c) * volume(); }
  const cplx* comp(int c) const { return v_.data() + static_cast<std::size_t>(c) * volume(); }

  /// Interpolant coefficient of mode k for component c is comp(c)[k]/N^d.
  std::vector<cplx>& raw() { return v_; }
  const std::vector<cplx>& raw() const { return v_; }

private:
  GridSpec g_;
  int comps_ = 1;
  std::vector<cplx> v_;
};

namespace detail {

/// Decompose a flat row-major index into per-axis indices.
inline void unflatten(std::int64_t idx, int dim, int n, int* out) {
  for (int a = dim - 1; a >= 0; --a) {
    out[a] = static_cast<int>(idx % n);
    idx /= n;
  }
}

}  // namespace detail

/// Zero every mode with a Nyquist index on any axis.
inline void zero_nyquist(SpectralField& s) {
  int n = s.n(), dim = s.dim();
  int idx[8];
  for (int c = 0; c < s.comps(); ++c) {
    cplx* p = s.comp(c);
    for (std::int64_t i = 0; i < s.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      for (int a = 0; a < dim; ++a)
        if (idx[a] == n / 2) {
          p[i] = 0.0;
          break;
        }
    }
  }
}

inline SpectralField fft_forward(const PeriodicField& f, bool strip_nyquist = true) {
  SpectralField s(f.grid(), f.comps());
  for (int c = 0; c < f.comps(); ++c) {
    cplx* p = s.comp(c);
    const double* q = f.comp(c);
    for (std::int64_t i = 0; i < f.volume(); ++i) p[i] = q[i];
    fft_nd(p, f.dim(), f.n(), false);
  }
  if (strip_nyquist) zero_nyquist(s);
  return s;
}

inline PeriodicField fft_inverse(const SpectralField& s) {
  PeriodicField f(s.grid(), s.comps());
  std::vector<cplx> buf(static_cast<std::size_t>(s.volume()));
  for (int c = 0; c < s.comps(); ++c) {
    std::copy(s.comp(c), s.comp(c) + s.volume(), buf.begin());
    fft_nd(buf.data(), s.dim(), s.n(), true);
    double* q = f.comp(c);
    for (std::int64_t i = 0; i < s.volume(); ++i) q[i] = buf[i].real();
  }
  return f;
}

/// Multiply component c by the derivative symbol 2*pi*i*k_axis.
inline void derivative_inplace(SpectralField& s, int axis) {
  int n = s.n(), dim = s.dim();
  int idx[8];
  for (int c = 0; c < s.comps(); ++c) {
    cplx* p = s.comp(c);
    for (std::int64_t i = 0; i < s.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      double k = fft_freq(idx[axis], n);
      p[i] *= cplx(0.0, 2.0 * M_PI * k);
    }
  }
}

inline PeriodicField partial_derivative(const PeriodicField& f, int axis) {
  SpectralField s = fft_forward(f);
  derivative_inplace(s, axis);
  return fft_inverse(s);
}

/// Gradient of a scalar field as a vector field.
inline PeriodicField gradient(const PeriodicField& f) {
  require(f.comps() == 1, "gradient expects a scalar field");
  PeriodicField g(f.grid(), f.dim());
  SpectralField s = fft_forward(f);
  std::vector<cplx> buf(static_cast<std::size_t>(f.volume()));
  int n = f.n(), dim = f.dim();
  int idx[8];
  for (int a = 0; a < dim; ++a) {
    std::copy(s.comp(0), s.comp(0) + s.volume(), buf.begin());
    for (std::int64_t i = 0; i < f.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      double k = fft_freq(idx[a], n);
      buf[i] *= cplx(0.0, 2.0 * M_PI * k);
    }
    fft_nd(buf.data(), dim, n, true);
    double* q = g.comp(a);
    for (std::int64_t i = 0; i < f.volume(); ++i) q[i] = buf[i].real();
  }
  return g;
}

/// Spectral divergence of a vector field.
inline PeriodicField divergence(const PeriodicField& f) {
  require(f.comps() == f.dim(), "divergence expects a vector field");
  int n = f.n(), dim = f.dim();
  std::vector<cplx> acc(static_cast<std::size_t>(f.volume()), cplx(0, 0));
  std::vector<cplx> buf(static_cast<std::size_t>(f.volume()));
  int idx[8];
  for (int a = 0; a < dim; ++a) {
    const double* q = f.comp(a);
    for (std::int64_t i = 0; i < f.volume(); ++i) buf[i] = q[i];
    fft_nd(buf.data(), dim, n, false);
    for (std::int64_t i = 0; i < f.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      int ka = idx[a] == n / 2 ? 0 : fft_freq(idx[a], n);
      bool nyq = false;
      for (int b = 0; b < dim; ++b) nyq |= (idx[b] == n / 2);
      if (!nyq) acc[i] += buf[i] * cplx(0.0, 2.0 * M_PI * ka);
    }
  }
  fft_nd(acc.data(), dim, n, true);
  PeriodicField out(f.grid(), 1);
  double* o = out.comp(0);
  for (std::int64_t i = 0; i < f.volume(); ++i) o[i] = acc[i].real();
  return out;
}

/// L^s norm with grid quadrature; s = infinity accepted as INFINITY.
inline double lp_norm(const PeriodicField& f, double s) {
  require(s >= 1.0, "lp_norm: s must be >= 1 (or infinity)");
  if (std::isinf(s)) {
    double m = 0;
    for (std::int64_t i = 0; i < f.volume(); ++i) m = std::max(m, f.magnitude(i));
    return m;
  }
  StableSum acc;
  for (std::int64_t i = 0; i < f.volume(); ++i) acc.add(std::pow(f.magnitude(i), s));
  return std::pow(acc.value() / f.volume(), 1.0 / s);
}

/// W^{k,p} norm: sum of L^p norms of all spectral partials of order <= k.
/// Multi-indices of order 2 are counted once each. k <= 2 supported.
inline double sobolev_norm(const PeriodicField& f, int k, double p) {
  require(k >= 0 && k <= 2, "sobolev_norm: only orders k <= 2 are supported");
  StableSum total;
  total.add(lp_norm(f, p));
  if (k >= 1) {
    for (int a = 0; a < f.dim(); ++a) total.add(lp_norm(partial_derivative(f, a), p));
  }
  if (k >= 2) {
    for (int a = 0; a < f.dim(); ++a)
      for (int b = a; b < f.dim(); ++b) total.add(lp_norm(partial_derivative(partial_derivative(f, a), b), p));
  }
  return total.value();
}

inline double ck_norm(const PeriodicField& f, int k) {
  return sobolev_norm(f, k, std::numeric_limits<double>::infinity());
}

/// grad(Laplace^{-1} g) computed mode-wise, zero mode dropped. Input must be
/// mean-zero; a stray mean signals a missing subtraction upstream.
inline PeriodicField poisson_antidivergence(const PeriodicField& g, double mean_tol = 1e-10) {
  require(g.comps() == 1, "poisson_antidivergence expects a scalar field");
  double m = g.mean();
  double scale = std::max(1.0, lp_norm(g, std::numeric_limits<double>::infinity()));
  require(std::abs(m) <= mean_tol * scale, "poisson_antidivergence: input is not mean-zero");
  SpectralField s = fft_forward(g);
  int n = g.n(), dim = g.dim();
  PeriodicField out(g.grid(), dim);
  std::vector<cplx> buf(static_cast<std::size_t>(g.volume()));
  int idx[8];
  for (int a = 0; a < dim; ++a) {
    const cplx* src = s.comp(0);
    for (std::int64_t i = 0; i < g.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      double k2 = 0;
      for (int b = 0; b < dim; ++b) {
        double kb = fft_freq(idx[b], n);
        k2 += kb * kb;
      }
      if (k2 == 0) {
        buf[i] = 0;
        continue;
      }
      double ka = fft_freq(idx[a], n);
      // grad(Delta^{-1}): (2*pi*i*ka) / (-4*pi^2*k2)
      buf[i] = src[i] * cplx(0.0, -ka / (2.0 * M_PI * k2));
    }
    fft_nd(buf.data(), dim, n, true);
    double* q = out.comp(a);
    for (std::int64_t i = 0; i < g.volume(); ++i) q[i] = buf[i].real();
  }
  return out;
}

/// Remove the divergence part: f - grad(Laplace^{-1} div f).
inline PeriodicField helmholtz_project(const PeriodicField& f) {
  require(f.comps() == f.dim(), "helmholtz_project expects a vector field");
  PeriodicField d = divergence(f);
  double m = d.mean();
  for (auto& x : d.raw()) x -= m;
  PeriodicField corr = poisson_antidivergence(d, 1e-6);
  PeriodicField out = f;
  out -= corr;
  return out;
}

/// Copy modes of `s` into a grid refined by `factor`, preserving interpolant
/// coefficients (band-limited upsampling).
inline SpectralField upsample_spectrum(const SpectralField& s, int factor) {
  int n = s.n(), dim = s.dim();
  int nb = n * factor;
  SpectralField big({dim, nb}, s.comps());
  std::fill(big.raw().begin(), big.raw().end(), cplx(0, 0));
  double scale = std::pow(static_cast<double>(factor), dim);
  int idx[8];
  for (int c = 0; c < s.comps(); ++c) {
    const cplx* src = s.comp(c);
    cplx* dst = big.comp(c);
    for (std::int64_t i = 0; i < s.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      bool skip = false;
      std::int64_t j = 0;
      for (int a = 0; a < dim; ++a) {
        int f = fft_freq(idx[a], n);
        if (idx[a] == n / 2) skip = true;  // Nyquist dropped
        int kb = f >= 0 ? f : f + nb;
        j = j * nb + kb;
      }
      if (!skip) dst[j] = src[i] * scale;
    }
  }
  return big;
}

/// Keep modes |freq| < n/2 of a finer spectrum on a coarser n-grid.
inline SpectralField truncate_spectrum(const SpectralField& s, int n_out) {
  int nb = s.n(), dim = s.dim();
  SpectralField out({dim, n_out}, s.comps());
  std::fill(out.raw().begin(), out.raw().end(), cplx(0, 0));
  double scale = std::pow(static_cast<double>(n_out) / nb, dim);
  int idx[8];
  for (int c = 0; c < s.comps(); ++c) {
    const cplx* src = s.comp(c);
    cplx* dst = out.comp(c);
    for (std::int64_t i = 0; i < s.volume(); ++i) {
      detail::unflatten(i, dim, nb, idx);
      bool keep = true;
      std::int64_t j = 0;
      for (int a = 0; a < dim; ++a) {
        int f = fft_freq(idx[a], nb);
        if (std::abs(f) >= n_out / 2) {
          keep = false;
          break;
        }
        int ko = f >= 0 ? f : f + n_out;
        j = j * n_out + ko;
      }
      if (keep) dst[j] += src[i] * scale;
    }
  }
  return out;
}

inline PeriodicField resample(const PeriodicField& f, int n_out) {
  if (n_out == f.n()) return f;
  SpectralField s = fft_forward(f);
  if (n_out > f.n()) return fft_inverse(upsample_spectrum(s, n_out / f.n()));
  return fft_inverse(truncate_spectrum(s, n_out));
}

/// De-aliased product: both factors are band-limited-upsampled to a 2x grid,
/// multiplied pointwise there, and truncated back. Component rules:
/// scalar*scalar, scalar*vector, vector-dot-vector.
inline PeriodicField multiply_dealiased(const PeriodicField& a, const PeriodicField& b) {
  require(a.grid() == b.grid(), "product: grid mismatch");
  PeriodicField fa = fft_inverse(upsample_spectrum(fft_forward(a), 2));
  PeriodicField fb = fft_inverse(upsample_spectrum(fft_forward(b), 2));
  int out_comps;
  if (a.comps() == 1 && b.comps() == 1)
    out_comps = 1;
  else if (a.comps() == 1 || b.comps() == 1)
    out_comps = a.dim();
  else
    out_comps = 1;  // dot product
  PeriodicField prod(fa.grid(), out_comps);
  std::int64_t vol = fa.volume();
  if (a.comps() == 1 && b.comps() == 1) {
    for (std::int64_t i = 0; i < vol; ++i) prod(0, i) = fa(0, i) * fb(0, i);
  } else if (a.comps() == 1 || b.comps() == 1) {
    const PeriodicField& s = a.comps() == 1 ? fa : fb;
    const PeriodicField& v = a.comps() == 1 ? fb : fa;
    for (int c = 0; c < out_comps; ++c)
      for (std::int64_t i = 0; i < vol; ++i) prod(c, i) = s(0, i) * v(c, i);
  } else {
    for (std::int64_t i = 0; i < vol; ++i) {
      double acc = 0;
      for (int c = 0; c < a.comps(); ++c) acc += fa(c, i) * fb(c, i);
      prod(0, i) = acc;
    }
  }
  return fft_inverse(truncate_spectrum(fft_forward(prod, false), a.n()));
}

/// Plain pointwise product on the stored grid (no de-aliasing).
inline PeriodicField multiply_pointwise(const PeriodicField& a, const PeriodicField& b) {
  require(a.grid() == b.grid(), "product: grid mismatch");
  if (a.comps() == 1 && b.comps() == 1) {
    PeriodicField out(a.grid(), 1);
    for (std::int64_t i = 0; i < a.volume(); ++i) out(0, i) = a(0, i) * b(0, i);
    return out;
  }
  if (a.comps() == 1 || b.comps() == 1) {
    const PeriodicField& s = a.comps() == 1 ? a : b;
    const PeriodicField& v = a.comps() == 1 ? b : a;
    PeriodicField out(a.grid(), v.comps());
    for (int c = 0; c < v.comps(); ++c)
      for (std::int64_t i = 0; i < a.volume(); ++i) out(c, i) = s(0, i) * v(c, i);
    return out;
  }
  PeriodicField out(a.grid(), 1);
  for (std::int64_t i = 0; i < a.volume(); ++i) {
    double acc = 0;
    for (int c = 0; c < a.comps(); ++c) acc += a(c, i) * b(c, i);
    out(0, i) = acc;
  }
  return out;
}

/// Evaluate the interpolant of component c at an off-grid point (separable
/// partial sum; exact for band-limited data).
inline double evaluate_at(const SpectralField& s, std::span<const double> x, int c = 0) {
  int n = s.n(), dim = s.dim();
  require(static_cast<int>(x.size()) == dim, "evaluate_at: point dimension mismatch");
  std::vector<std::vector<cplx>> phases(dim, std::vector<cplx>(n));
  for (int a = 0; a < dim; ++a)
    for (int k = 0; k < n; ++k) {
      double ang = 2.0 * M_PI * fft_freq(k, n) * x[a];
      phases[a][k] = cplx(std::cos(ang), std::sin(ang));
    }
  const cplx* p = s.comp(c);
  cplx acc(0, 0);
  if (dim == 2) {
    std::int64_t i = 0;
    for (int k0 = 0; k0 < n; ++k0) {
      cplx row(0, 0);
      for (int k1 = 0; k1 < n; ++k1, ++i) row += p[i] * phases[1][k1];
      acc += row * phases[0][k0];
    }
  } else if (dim == 3) {
    std::int64_t i = 0;
    for (int k0 = 0; k0 < n; ++k0) {
      cplx plane(0, 0);
      for (int k1 = 0; k1 < n; ++k1) {
        cplx row(0, 0);
        for (int k2 = 0; k2 < n; ++k2, ++i) row += p[i] * phases[2][k2];
        plane += row * phases[1][k1];
      }
      acc += plane * phases[0][k0];
    }
  } else {
    int idx[8];
    for (std::int64_t i = 0; i < s.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      cplx ph(1, 0);
      for (int a = 0; a < dim; ++a) ph *= phases[a][idx[a]];
      acc += p[i] * ph;
    }
  }
  return acc.real() / s.volume();
}

/// Random real band-limited scalar/vector field with modes |k| <= kmax.
inline PeriodicField random_band_limited(int dim, int n, int kmax, std::mt19937_64& rng, int comps = 1,
                                         bool mean_zero = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralField s({dim, n}, comps);
  std::fill(s.raw().begin(), s.raw().end(), cplx(0, 0));
  int idx[8];
  for (int c = 0; c < comps; ++c) {
    cplx* p = s.comp(c);
    for (std::int64_t i = 0; i < s.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      bool ok = true;
      for (int a = 0; a < dim; ++a)
        if (std::abs(fft_freq(idx[a], n)) > kmax) ok = false;
      if (!ok) continue;
      p[i] = cplx(g(rng), g(rng));
    }
    if (mean_zero) p[0] = 0;
  }
  PeriodicField f = fft_inverse(s);  // real part: Hermitian part of the noise
  double norm = lp_norm(f, 2.0);
  if (norm > 0) f *= 1.0 / norm;
  return f;
}

}  // namespace convexint
