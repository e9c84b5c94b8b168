/// @file timeseries.hpp
/// @brief Time series of periodic fields on a padded uniform time grid, with
///        space-time mollification and time interpolation.
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "convexint/field.hpp"

namespace convexint {

struct MollifierSpec {
  double ell = 0.0625;   // kernel half-width in space and time
  double sharpness = 1.0;
};

class TimeSeriesField {
public:
  TimeSeriesField() = default;
  TimeSeriesField(double t0, double t1, double pad, double dt, GridSpec g, int comps)
      : t0_(t0), t1_(t1), pad_(pad), dt_(dt) {
    require(dt > 0 && pad >= 0 && t1 >= t0, "time series: bad window");
    int m = frame_count(t0, t1, pad, dt);
    frames_.reserve(m);
    for (int k = 0; k < m; ++k) frames_.emplace_back(g, comps);
  }

  static int frame_count(double t0, double t1, double pad, double dt) {
    return 1 + static_cast<int>(std::llround((t1 - t0 + 2 * pad) / dt));
  }

  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double pad() const { return pad_; }
  double dt() const { return dt_; }
  int size() const { return static_cast<int>(frames_.size()); }
  double frame_time(int k) const { return t0_ - pad_ + k * dt_; }
  double data_start() const { return t0_ - pad_; }
  double data_end() const { return frame_time(size() - 1); }

  PeriodicField& frame(int k) { return frames_[k]; }
  const PeriodicField& frame(int k) const { return frames_[k]; }
  std::vector<PeriodicField>& frames() { return frames_; }
  const std::vector<PeriodicField>& frames() const { return frames_; }

  int dim() const { return frames_.at(0).dim(); }
  int n() const { return frames_.at(0).n(); }
  int comps() const { return frames_.at(0).comps(); }
  GridSpec grid() const { return frames_.at(0).grid(); }

  bool consistent() const {
    if (size() != frame_count(t0_, t1_, pad_, dt_)) return false;
    for (const auto& f : frames_)
      if (!(f.grid() == frames_[0].grid()) || f.comps() != frames_[0].comps()) return false;
    return true;
  }

  /// Index of the frame at or just below time t.
  int floor_index(double t) const {
    int k = static_cast<int>(std::floor((t - data_start()) / dt_ + 1e-12));
    return std::clamp(k, 0, size() - 1);
  }

  /// Cubic Lagrange interpolation in time (4-point stencil, clamped at ends).
  PeriodicField eval(double t) const {
    double w[4];
    int base = stencil(t, w);
    PeriodicField out(frames_[0].grid(), frames_[0].comps());
    for (int j = 0; j < 4; ++j) out.axpy(w[j], frames_[base + j]);
    return out;
  }

  /// d/dt of the cubic interpolant.
  PeriodicField eval_deriv(double t) const {
    double w[4];
    int base = stencil_deriv(t, w);
    PeriodicField out(frames_[0].grid(), frames_[0].comps());
    for (int j = 0; j < 4; ++j) out.axpy(w[j], frames_[base + j]);
    return out;
  }

  /// Stencil base index and weights for cubic interpolation at t.
  int stencil(double t, double w[4]) const {
    double s = (t - data_start()) / dt_;
    int i1 = static_cast<int>(std::floor(s));
    i1 = std::clamp(i1, 1, size() - 3);
    double th = s - i1;
    w[0] = -th * (th - 1) * (th - 2) / 6.0;
    w[1] = (th + 1) * (th - 1) * (th - 2) / 2.0;
    w[2] = -(th + 1) * th * (th - 2) / 2.0;
    w[3] = (th + 1) * th * (th - 1) / 6.0;
    return i1 - 1;
  }
  int stencil_deriv(double t, double w[4]) const {
    double s = (t - data_start()) / dt_;
    int i1 = static_cast<int>(std::floor(s));
    i1 = std::clamp(i1, 1, size() - 3);
    double th = s - i1;
    w[0] = -(3 * th * th - 6 * th + 2) / 6.0 / dt_;
    w[1] = (3 * th * th - 4 * th - 1) / 2.0 / dt_;
    w[2] = -(3 * th * th - 2 * th - 2) / 2.0 / dt_;
    w[3] = (3 * th * th - 1) / 6.0 / dt_;
    return i1 - 1;
  }

  /// max over frames with frame_time in [a,b] of fn(frame).
  double max_over(double a, double b, const std::function<double(const PeriodicField&)>& fn) const {
    double m = 0;
    bool any = false;
    for (int k = 0; k < size(); ++k) {
      double t = frame_time(k);
      if (t < a - 1e-12 || t > b + 1e-12) continue;
      m = any ? std::max(m, fn(frames_[k])) : fn(frames_[k]);
      any = true;
    }
    require(any, "max_over: no frames in window");
    return m;
  }

private:
  double t0_ = 0, t1_ = 0, pad_ = 0, dt_ = 1;
  std::vector<PeriodicField> frames_;
};

namespace detail {

/// Normalized nonnegative taps of the compact bump on a uniform lattice with
/// spacing h and half-width ell. Requires at least a 3-tap stencil.
inline std::vector<double> mollifier_taps(double ell, double h, double sharpness) {
  require(ell >= 2.0 * h - 1e-12, "mollifier: kernel under-resolved (ell < 2h)");
  int m = static_cast<int>(std::ceil(ell / h)) - 1;
  while (m >= 1 && m * h >= ell) --m;
  require(m >= 1, "mollifier: kernel under-resolved");
  std::vector<double> w(2 * m + 1);
  StableSum sum;
  for (int k = -m; k <= m; ++k) {
    w[k + m] = bump_profile(k * h / ell, sharpness);
    sum.add(w[k + m]);
  }
  for (auto& x : w) x /= sum.value();
  return w;
}

/// Circular convolution along one axis with the given taps (centered).
inline void convolve_axis(PeriodicField& f, int axis, const std::vector<double>& taps) {
  int n = f.n(), dim = f.dim();
  int m = (static_cast<int>(taps.size()) - 1) / 2;
  std::int64_t stride = 1;
  for (int a = dim - 1; a > axis; --a) stride *= n;
  std::int64_t block = stride * n;
  std::vector<double> line(n), out(n);
  for (int c = 0; c < f.comps(); ++c) {
    double* base_ptr = f.comp(c);
    for (std::int64_t base = 0; base < f.volume(); base += block) {
      for (std::int64_t off = 0; off < stride; ++off) {
        double* p = base_ptr + base + off;
        for (int i = 0; i < n; ++i) line[i] = p[i * stride];
        for (int i = 0; i < n; ++i) {
          double acc = 0;
          for (int k = -m; k <= m; ++k) {
            int j = i - k;
            j -= n * static_cast<int>(std::floor(static_cast<double>(j) / n));
            acc += taps[k + m] * line[j];
          }
          out[i] = acc;
        }
        for (int i = 0; i < n; ++i) p[i * stride] = out[i];
      }
    }
  }
}

}  // namespace detail

/// Mollify one snapshot in space only (separable compact bump of width ell).
inline PeriodicField mollify_space(const PeriodicField& f, const MollifierSpec& spec) {
  auto taps = detail::mollifier_taps(spec.ell, 1.0 / f.n(), spec.sharpness);
  PeriodicField out = f;
  for (int a = 0; a < f.dim(); ++a) detail::convolve_axis(out, a, taps);
  return out;
}

/// Space-time mollification. The kernel is the tensor product of the compact
/// bump in each space axis and in time; sampled taps are renormalized so a
/// constant stays exactly constant and nonnegativity is preserved. The output
/// window shrinks by the time half-width on each side (pad decreases).
inline TimeSeriesField mollify_spacetime(const TimeSeriesField& in, const MollifierSpec& spec) {
  require(in.pad() >= 2.0 * spec.ell - 1e-12, "mollify_spacetime: pad must be >= 2*ell");
  auto staps = detail::mollifier_taps(spec.ell, 1.0 / in.n(), spec.sharpness);
  auto ttaps = detail::mollifier_taps(spec.ell, in.dt(), spec.sharpness);
  int mt = (static_cast<int>(ttaps.size()) - 1) / 2;
  double new_pad = in.pad() - mt * in.dt();
  TimeSeriesField out(in.t0(), in.t1(), new_pad, in.dt(), in.grid(), in.comps());
  require(out.size() == in.size() - 2 * mt, "mollify_spacetime: frame bookkeeping");
  // Stream input frames once, space-mollify each, accumulate into outputs.
  for (int i = 0; i < in.size(); ++i) {
    PeriodicField sm = in.frame(i);
    for (int a = 0; a < in.dim(); ++a) detail::convolve_axis(sm, a, staps);
    for (int k = -mt; k <= mt; ++k) {
      int j = i - mt - k;  // output index receiving tap k from input i
      if (j < 0 || j >= out.size()) continue;
      out.frame(j).axpy(ttaps[k + mt], sm);
    }
  }
  return out;
}

/// Same mollification driven by a frame generator, for sources too fine to
/// hold in memory. gen(i) must return the input frame at t = start + i*dt_in.
inline TimeSeriesField mollify_spacetime_stream(const std::function<PeriodicField(int)>& gen, int n_in,
                                                double start, double dt_in, GridSpec g, int comps,
                                                double out_t0, double out_t1, double out_pad, double out_dt,
                                                const MollifierSpec& spec) {
  auto staps = detail::mollifier_taps(spec.ell, 1.0 / g.n, spec.sharpness);
  auto ttaps = detail::mollifier_taps(spec.ell, dt_in, spec.sharpness);
  int mt = (static_cast<int>(ttaps.size()) - 1) / 2;
  TimeSeriesField out(out_t0, out_t1, out_pad, out_dt, g, comps);
  int stride = static_cast<int>(std::llround(out_dt / dt_in));
  require(std::abs(stride * dt_in - out_dt) < 1e-9 * out_dt, "stream mollify: out_dt must be a multiple of dt_in");
  // Output frame j sits at input index base_j = (out_time - start)/dt_in.
  std::vector<std::int64_t> base(out.size());
  for (int j = 0; j < out.size(); ++j) {
    double tj = out.frame_time(j);
    auto bj = static_cast<std::int64_t>(std::llround((tj - start) / dt_in));
    require(bj - mt >= 0 && bj + mt < n_in, "stream mollify: source window too small");
    base[j] = bj;
  }
  for (int i = 0; i < n_in; ++i) {
    bool needed = false;
    for (int j = 0; j < out.size(); ++j)
      if (std::llabs(base[j] - i) <= mt) {
        needed = true;
        break;
      }
    if (!needed) continue;
    PeriodicField sm = gen(i);
    for (int a = 0; a < g.dim; ++a) detail::convolve_axis(sm, a, staps);
    for (int j = 0; j < out.size(); ++j) {
      std::int64_t k = i - base[j];
      if (std::llabs(k) <= mt) out.frame(j).axpy(ttaps[k + mt], sm);
    }
  }
  return out;
}

}  // namespace convexint
