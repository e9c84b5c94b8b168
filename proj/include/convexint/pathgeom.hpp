/// @file pathgeom.hpp
/// @brief Orbit geometry on the torus: the cyclic lambda-power basis, orbit
///        averages (exact Fourier projector and quadrature), the partition of
///        unity crawled along an orbit, trace fields, and separated anchors.
///
/// Directions are xi_j = cyclic permutations of (1, 1/lambda, ..., lambda^{1-d}),
/// doubled with their negatives. Every orbit {u*xi_j} closes after arc
/// parameter L = lambda^{d-1}; L*xi_j has integer coordinates, so averaging a
/// band-limited field along an orbit is exactly the spectral projection onto
/// modes k with k . (L xi_j) = 0.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "convexint/field.hpp"

namespace convexint {

struct XiBasis {
  int d = 3;
  int lambda = 4;
  std::int64_t L = 0;                               // lambda^{d-1}
  std::vector<std::vector<double>> xis;             // 2d direction vectors
  std::vector<std::vector<std::int64_t>> int_orbit; // L*xi_j for j < d (exact integers)
  double max_offdiag_dot = 0;                       // measured near-orthonormality defect * lambda
  std::vector<double> xi_inv;                       // inverse of [xi_1 ... xi_d], row-major
  double cond2 = 0;                                 // 2-norm condition number of that matrix
};

namespace detail {

/// Invert a small dense matrix (row-major) by Gauss-Jordan with pivoting.
inline std::vector<double> invert_dense(std::vector<double> a, int d) {
  std::vector<double> inv(d * d, 0.0);
  for (int i = 0; i < d; ++i) inv[i * d + i] = 1.0;
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(a[r * d + col]) > std::abs(a[piv * d + col])) piv = r;
    require(std::abs(a[piv * d + col]) > 1e-14, "matrix inversion: singular");
    for (int c = 0; c < d; ++c) {
      std::swap(a[piv * d + c], a[col * d + c]);
      std::swap(inv[piv * d + c], inv[col * d + c]);
    }
    double s = 1.0 / a[col * d + col];
    for (int c = 0; c < d; ++c) {
      a[col * d + c] *= s;
      inv[col * d + c] *= s;
    }
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      double f = a[r * d + col];
      if (f == 0) continue;
      for (int c = 0; c < d; ++c) {
        a[r * d + c] -= f * a[col * d + c];
        inv[r * d + c] -= f * inv[col * d + c];
      }
    }
  }
  return inv;
}

/// Largest/smallest eigenvalue of a small SPD matrix by Jacobi sweeps.
inline void spd_extreme_eigs(std::vector<double> a, int d, double& lo, double& hi) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) off += a[p * d + q] * a[p * d + q];
    if (off < 1e-28) break;
    for (int p = 0; p < d; ++p)
      for (int q = p + 1; q < d; ++q) {
        double apq = a[p * d + q];
        if (std::abs(apq) < 1e-18) continue;
        double theta = 0.5 * std::atan2(2 * apq, a[q * d + q] - a[p * d + p]);
        double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < d; ++k) {
          double akp = a[k * d + p], akq = a[k * d + q];
          a[k * d + p] = c * akp - s * akq;
          a[k * d + q] = s * akp + c * akq;
        }
        for (int k = 0; k < d; ++k) {
          double apk = a[p * d + k], aqk = a[q * d + k];
          a[p * d + k] = c * apk - s * aqk;
          a[q * d + k] = s * apk + c * aqk;
        }
      }
  }
  lo = a[0];
  hi = a[0];
  for (int i = 0; i < d; ++i) {
    lo = std::min(lo, a[i * d + i]);
    hi = std::max(hi, a[i * d + i]);
  }
}

}  // namespace detail

inline XiBasis make_xi_basis(int d, int lambda) {
  require(d >= 3, "make_xi_basis: d >= 3");
  require(lambda >= 2, "make_xi_basis: lambda >= 2");
  XiBasis b;
  b.d = d;
  b.lambda = lambda;
  b.L = 1;
  for (int i = 0; i < d - 1; ++i) b.L *= lambda;
  b.xis.assign(2 * d, std::vector<double>(d, 0.0));
  b.int_orbit.assign(d, std::vector<std::int64_t>(d, 0));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) {
      int e = (i - j + d) % d;  // lambda exponent of component i of xi_{j+1}
      std::int64_t num = 1;
      for (int t = 0; t < d - 1 - e; ++t) num *= lambda;
      b.int_orbit[j][i] = num;                       // L * lambda^{-e}
      b.xis[j][i] = static_cast<double>(num) / b.L;  // lambda^{-e}
    }
    for (int i = 0; i < d; ++i) b.xis[d + j][i] = -b.xis[j][i];
  }
  // measured near-orthonormality defect
  double worst = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double dot = 0;
      for (int a = 0; a < d; ++a) dot += b.xis[i][a] * b.xis[j][a];
      double target = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(dot - target));
    }
  b.max_offdiag_dot = worst;
  // decomposition matrix: columns xi_1..xi_d
  std::vector<double> m(d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m[r * d + c] = b.xis[c][r];
  b.xi_inv = detail::invert_dense(m, d);
  std::vector<double> mtm(d * d, 0.0);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      double s = 0;
      for (int k = 0; k < d; ++k) s += m[k * d + r] * m[k * d + c];
      mtm[r * d + c] = s;
    }
  double lo, hi;
  detail::spd_extreme_eigs(mtm, d, lo, hi);
  b.cond2 = std::sqrt(hi / std::max(lo, 1e-300));
  return b;
}

/// Integer orbit vector m_j = L*xi_j (sign included for j >= d).
inline std::vector<std::int64_t> orbit_int_vector(const XiBasis& b, int j) {
  std::vector<std::int64_t> m = b.int_orbit[j % b.d];
  if (j >= b.d)
    for (auto& v : m) v = -v;
  return m;
}

/// Resonance index of mode k: m(k) = k . (L xi_j). Modes with m(k)=0 are the
/// exact orbit-average component.
inline std::int64_t mode_resonance(const int* kfreq, const std::vector<std::int64_t>& mvec) {
  std::int64_t s = 0;
  for (std::size_t a = 0; a < mvec.size(); ++a) s += kfreq[a] * mvec[a];
  return s;
}

/// Exact orbit average of a band-limited field: keep only resonance-0 modes.
inline PeriodicField orbit_average_field(const PeriodicField& f, const XiBasis& b, int j) {
  SpectralField s = fft_forward(f);
  auto mvec = orbit_int_vector(b, j);
  int n = f.n(), dim = f.dim();
  int idx[8], kf[8];
  for (int c = 0; c < f.comps(); ++c) {
    cplx* p = s.comp(c);
    for (std::int64_t i = 0; i < f.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      for (int a = 0; a < dim; ++a) kf[a] = fft_freq(idx[a], n);
      if (mode_resonance(kf, mvec) != 0) p[i] = 0;
    }
  }
  return fft_inverse(s);
}

/// 1-D restriction of a band-limited field to the orbit line through `anchor`:
/// f(anchor + u xi_j) = sum_m bins[m] e^{2 pi i m u / L}. One N^d pass builds
/// the bins; evaluations are then O(#bins).
class OrbitLineEval {
public:
  OrbitLineEval() = default;
  OrbitLineEval(const SpectralField& f, const XiBasis& b, int j, std::span<const double> anchor, int comp = 0)
      : L_(static_cast<double>(b.L)) {
    int n = f.n(), dim = f.dim();
    auto mvec = orbit_int_vector(b, j);
    std::int64_t mmax = 0;
    for (int a = 0; a < dim; ++a) mmax += (n / 2) * std::llabs(mvec[a]);
    bins_.assign(2 * mmax + 1, cplx(0, 0));
    mmax_ = mmax;
    std::vector<std::vector<cplx>> phases(dim, std::vector<cplx>(n));
    for (int a = 0; a < dim; ++a)
      for (int k = 0; k < n; ++k) {
        double ang = 2.0 * M_PI * fft_freq(k, n) * anchor[a];
        phases[a][k] = cplx(std::cos(ang), std::sin(ang));
      }
    const cplx* p = f.comp(comp);
    int idx[8], kf[8];
    double scale = 1.0 / f.volume();
    for (std::int64_t i = 0; i < f.volume(); ++i) {
      detail::unflatten(i, dim, n, idx);
      cplx ph(scale, 0);
      for (int a = 0; a < dim; ++a) {
        kf[a] = fft_freq(idx[a], n);
        ph *= phases[a][idx[a]];
      }
      bins_[mode_resonance(kf, mvec) + mmax_] += p[i] * ph;
    }
  }

  /// Value at arc parameter u.
  double eval(double u) const {
    cplx rot = std::polar(1.0, 2.0 * M_PI * u / L_);
    cplx pw(1, 0);
    double acc = bins_[mmax_].real();
    for (std::int64_t m = 1; m <= mmax_; ++m) {
      pw *= rot;
      acc += 2.0 * (bins_[mmax_ + m] * pw).real();
    }
    return acc;
  }

  /// Exact average over one period (resonance-0 bin).
  double mean() const { return bins_[mmax_].real(); }

  double period() const { return L_; }

private:
  double L_ = 1;
  std::int64_t mmax_ = 0;
  std::vector<cplx> bins_;
};

/// Composite midpoint average (1/L) int_0^L f(anchor + u xi_j) du for a
/// callable integrand.
inline double path_average(const std::function<double(std::span<const double>)>& f, const XiBasis& b, int j,
                           std::span<const double> anchor, int M) {
  require(M >= 4, "path_average: too few nodes");
  int d = b.d;
  std::vector<double> x(d);
  StableSum acc;
  for (int i = 0; i < M; ++i) {
    double u = (i + 0.5) * static_cast<double>(b.L) / M;
    for (int a = 0; a < d; ++a) {
      double v = anchor[a] + u * b.xis[j][a];
      x[a] = v - std::floor(v);
    }
    acc.add(f(x));
  }
  return acc.value() / M;
}

/// Default orbit quadrature node count.
inline int orbit_quadrature_nodes(const XiBasis& b, int n_grid) {
  std::int64_t m = std::max<std::int64_t>(4096, 8 * b.L * n_grid);
  return static_cast<int>(m);
}

/// Bump function crawled along orbit j: nonnegative, supported in the ball of
/// radius c_d/lambda, unit integral, unit path average at every point.
struct PartitionBump {
  PeriodicField U;
  double support_radius = 0;  // c_d / lambda
  double c_d = 0;
  double min_normalizer = 0;  // min of the orbit-averaged envelope
  int j = 0;
};

namespace detail {

inline PeriodicField radial_torus_bump(GridSpec g, double radius, double core_fraction = 0.5) {
  PeriodicField f(g, 1);
  int idx[8];
  for (std::int64_t i = 0; i < f.volume(); ++i) {
    unflatten(i, g.dim, g.n, idx);
    double r2 = 0;
    for (int a = 0; a < g.dim; ++a) {
      double x = static_cast<double>(idx[a]) / g.n;
      double dxa = torus_delta(x);
      r2 += dxa * dxa;
    }
    double rho = std::sqrt(r2) / radius;
    double val;
    if (rho <= core_fraction)
      val = 1.0;
    else if (rho >= 1.0)
      val = 0.0;
    else
      val = smoothstep_cinf((1.0 - rho) / (1.0 - core_fraction));
    f(0, i) = val;
  }
  return f;
}

}  // namespace detail

/// Construct U_j on an N-grid. When c_d = 0, searches c in {1,2,4,8} for the
/// smallest one whose orbit-averaged envelope stays >= 1/2.
inline PartitionBump partition_of_unity(const XiBasis& b, int j, int N, double c_d = 0.0) {
  std::vector<double> candidates = c_d > 0 ? std::vector<double>{c_d} : std::vector<double>{1, 2, 4, 8};
  for (double c : candidates) {
    double radius = c / b.lambda;
    if (radius > 0.5 + 1e-12) break;  // ball no longer fits in the torus
    PeriodicField omega = detail::radial_torus_bump({b.d, N}, radius);
    double m0 = omega.mean();
    require(m0 > 0, "partition_of_unity: empty bump (grid too coarse)");
    omega *= 1.0 / m0;
    PeriodicField envelope = orbit_average_field(omega, b, j);
    double mn = envelope(0, 0);
    for (std::int64_t i = 0; i < envelope.volume(); ++i) mn = std::min(mn, envelope(0, i));
    if (mn < 0.5) continue;
    PartitionBump out;
    out.support_radius = radius;
    out.c_d = c;
    out.min_normalizer = mn;
    out.j = j;
    out.U = omega;
    for (std::int64_t i = 0; i < omega.volume(); ++i) out.U(0, i) = omega(0, i) / envelope(0, i);
    double mu = out.U.mean();
    out.U *= 1.0 / mu;  // pin the unit integral exactly
    return out;
  }
  fail("partition_of_unity: no candidate c_d kept the normalizer uniformly positive");
}

/// Trace left by a ball of varying radius crawling once around orbit j:
/// int_0^L r(u)^{-d} 1_{B_{r(u)}(anchor + u xi_j)} du, assembled on a grid.
inline PeriodicField trace_field(const std::function<double(double)>& r_profile, const XiBasis& b, int j,
                                 std::span<const double> anchor, int N, double r_min, double r_max,
                                 int M = 0) {
  require(r_min > 0 && r_min <= r_max, "trace_field: bad radius bracket");
  require(r_max <= 8.0 / b.lambda + 1e-12, "trace_field: stripe is not tubular (r_max too large)");
  if (M == 0) M = orbit_quadrature_nodes(b, N);
  int d = b.d;
  PeriodicField T({d, N}, 1);
  double du = static_cast<double>(b.L) / M;
  std::vector<double> center(d);
  int lo[8], hi[8], idx[8];
  for (int i = 0; i < M; ++i) {
    double u = (i + 0.5) * du;
    double r = r_profile(u);
    require(r >= r_min - 1e-12 && r <= r_max + 1e-12, "trace_field: r(u) leaves its bracket");
    double w = du * std::pow(r, -d);
    for (int a = 0; a < d; ++a) {
      double v = anchor[a] + u * b.xis[j][a];
      center[a] = v - std::floor(v);
      lo[a] = static_cast<int>(std::floor((center[a] - r) * N)) - 1;
      hi[a] = static_cast<int>(std::ceil((center[a] + r) * N)) + 1;
    }
    // d == 3 path is the hot one
    if (d == 3) {
      double r2 = r * r;
      for (int i0 = lo[0]; i0 <= hi[0]; ++i0) {
        double d0 = torus_delta(static_cast<double>(i0) / N - center[0]);
        if (d0 * d0 > r2) continue;
        int w0 = ((i0 % N) + N) % N;
        for (int i1 = lo[1]; i1 <= hi[1]; ++i1) {
          double d1 = torus_delta(static_cast<double>(i1) / N - center[1]);
          if (d0 * d0 + d1 * d1 > r2) continue;
          int w1 = ((i1 % N) + N) % N;
          for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
            double d2 = torus_delta(static_cast<double>(i2) / N - center[2]);
            if (d0 * d0 + d1 * d1 + d2 * d2 > r2) continue;
            int w2 = ((i2 % N) + N) % N;
            T(0, (static_cast<std::int64_t>(w0) * N + w1) * N + w2) += w;
          }
        }
      }
    } else {
      // generic slow path
      for (std::int64_t flat = 0; flat < T.volume(); ++flat) {
        detail::unflatten(flat, d, N, idx);
        double s = 0;
        for (int a = 0; a < d; ++a) {
          double dd = torus_delta(static_cast<double>(idx[a]) / N - center[a]);
          s += dd * dd;
        }
        if (s <= r * r) T(0, flat) += w;
      }
    }
  }
  return T;
}

struct SeparationAnchors {
  std::vector<std::vector<double>> points;  // 2d anchors
  double threshold = 0;
  double achieved = 0;  // measured min pairwise orbit distance
  std::uint64_t seed = 0;
  int attempts = 0;
  bool ok = false;
};

namespace detail {

/// Min distance between translated orbits i and j, by dense (t,s) sampling
/// with local refinement.
inline double orbit_pair_distance(const XiBasis& b, std::span<const double> xi_anchor,
                                  std::span<const double> xj_anchor, int i, int j, int grid = 64) {
  int d = b.d;
  double Ld = static_cast<double>(b.L);
  auto dist = [&](double t, double s) {
    double acc = 0;
    for (int a = 0; a < d; ++a) {
      double delta = torus_delta(xi_anchor[a] + t * b.xis[i][a] - xj_anchor[a] - s * b.xis[j][a]);
      acc += delta * delta;
    }
    return std::sqrt(acc);
  };
  double best = 1e300, bt = 0, bs = 0;
  for (int a = 0; a < grid; ++a)
    for (int c = 0; c < grid; ++c) {
      double t = (a + 0.5) * Ld / grid, s = (c + 0.5) * Ld / grid;
      double v = dist(t, s);
      if (v < best) {
        best = v;
        bt = t;
        bs = s;
      }
    }
  double h = Ld / grid;
  for (int iter = 0; iter < 24; ++iter) {
    bool improved = false;
    for (int dt = -1; dt <= 1; ++dt)
      for (int ds = -1; ds <= 1; ++ds) {
        double v = dist(bt + dt * h, bs + ds * h);
        if (v < best) {
          best = v;
          bt += dt * h;
          bs += ds * h;
          improved = true;
        }
      }
    if (!improved) h *= 0.5;
    if (h < 1e-7 * Ld) break;
  }
  return best;
}

}  // namespace detail

/// Measured min over all pairs i<j of translated-orbit distances.
inline double anchors_min_distance(const XiBasis& b, const std::vector<std::vector<double>>& pts, int grid = 64) {
  double worst = 1e300;
  for (int i = 0; i < 2 * b.d; ++i)
    for (int j = i + 1; j < 2 * b.d; ++j)
      worst = std::min(worst, detail::orbit_pair_distance(b, pts[i], pts[j], i, j, grid));
  return worst;
}

/// Seeded rejection sampling of 2d anchors with pairwise orbit distance >= threshold.
inline SeparationAnchors find_separation_anchors(const XiBasis& b, double threshold, std::uint64_t seed,
                                                 int max_attempts = 200) {
  SeparationAnchors out;
  out.threshold = threshold;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double best_seen = -1;
  std::vector<std::vector<double>> best_pts;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<std::vector<double>> pts(2 * b.d, std::vector<double>(b.d));
    for (auto& p : pts)
      for (auto& x : p) x = uni(rng);
    double m = anchors_min_distance(b, pts);
    if (m > best_seen) {
      best_seen = m;
      best_pts = pts;
    }
    out.attempts = attempt;
    if (m >= threshold) {
      out.points = pts;
      out.achieved = m;
      out.ok = true;
      return out;
    }
  }
  out.points = best_pts;
  out.achieved = best_seen;
  out.ok = threshold <= 0;
  return out;
}

}  // namespace convexint
