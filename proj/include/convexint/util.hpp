/// @file util.hpp
/// @brief Small shared utilities: stable summation, hashing, bump profiles.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace convexint {

/// Neumaier compensated accumulator. Summation order is fixed by call order,
/// so reductions are deterministic by construction.
class StableSum {
public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

private:
  double s_ = 0.0, c_ = 0.0;
};

inline double stable_sum(std::span<const double> xs) {
  StableSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

/// FNV-1a, used to stamp reports with a config fingerprint.
inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}
inline std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

/// C-infinity bump on (-1,1): exp(-a/(1-u^2)), zero outside. `a` trades
/// interior flatness against edge steepness.
inline double bump_profile(double u, double a = 1.0) {
  double u2 = u * u;
  if (u2 >= 1.0) return 0.0;
  return std::exp(a - a / (1.0 - u2));  // normalized so value at u=0 is 1
}

/// Derivative of bump_profile in u.
inline double bump_profile_deriv(double u, double a = 1.0) {
  double u2 = u * u;
  if (u2 >= 1.0) return 0.0;
  double d = 1.0 - u2;
  return bump_profile(u, a) * (-2.0 * a * u / (d * d));
}

/// Smooth transition h: h=0 for s<=0, h=1 for s>=1, C-infinity monotone.
inline double smoothstep_cinf(double s) {
  auto e = [](double t) { return t <= 0.0 ? 0.0 : std::exp(-1.0 / t); };
  double a = e(s), b = e(1.0 - s);
  return a / (a + b);
}

/// d/ds of smoothstep_cinf.
inline double smoothstep_cinf_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  auto e = [](double t) { return std::exp(-1.0 / t); };
  double a = e(s), b = e(1.0 - s);
  double ap = a / (s * s), bp = -b / ((1.0 - s) * (1.0 - s));
  double sum = a + b;
  return (ap * sum - a * (ap + bp)) / (sum * sum);
}

/// Torus distance helpers on [0,1)^d.
inline double torus_delta(double x) {
  double d = x - std::floor(x);
  return d > 0.5 ? d - 1.0 : d;
}
inline double torus_dist2(std::span<const double> x, std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = torus_delta(x[i] - y[i]);
    s += d * d;
  }
  return s;
}

[[noreturn]] inline void fail(const std::string& msg) { throw std::runtime_error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

/// Gauss-Legendre nodes/weights on [-1,1] (Newton on Legendre polynomials).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1);
      double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace convexint
