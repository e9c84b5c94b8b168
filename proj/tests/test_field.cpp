/// @file test_field.cpp
/// @brief Field calculus tests: norms, spectral identities, Poisson inverse,
///        de-aliased products, mollification, serialization.
#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <random>

#include "convexint/field.hpp"
#include "convexint/serialize.hpp"
#include "convexint/timeseries.hpp"

using namespace convexint;

namespace {

PeriodicField sample_scalar(int dim, int n, const std::function<double(const double*)>& f) {
  PeriodicField out({dim, n}, 1);
  int idx[8];
  for (std::int64_t i = 0; i < out.volume(); ++i) {
    detail::unflatten(i, dim, n, idx);
    double x[8];
    for (int a = 0; a < dim; ++a) x[a] = static_cast<double>(idx[a]) / n;
    out(0, i) = f(x);
  }
  return out;
}

}  // namespace

TEST_CASE("lp_norm basics") {
  auto zero = PeriodicField::scalar(3, 16);
  CHECK(lp_norm(zero, 2.0) == 0.0);

  auto f = sample_scalar(3, 16, [](const double* x) { return std::cos(2 * M_PI * x[0]); });
  CHECK(lp_norm(f, 2.0) == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(lp_norm(f, std::numeric_limits<double>::infinity()) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(lp_norm(f, 0.5));
}

TEST_CASE("lp_norm monotone in pointwise magnitude") {
  std::mt19937_64 rng(11);
  auto g = random_band_limited(3, 16, 4, rng);
  PeriodicField bigger = g;
  for (auto& v : bigger.raw()) v = std::abs(v) + 0.25;
  PeriodicField smaller = g;
  for (auto& v : smaller.raw()) v = std::abs(v);
  for (double s : {1.0, 2.0, 3.5, std::numeric_limits<double>::infinity()})
    CHECK(lp_norm(smaller, s) <= lp_norm(bigger, s) + 1e-15);
}

TEST_CASE("sobolev_norm examples") {
  auto c = PeriodicField::scalar(3, 16);
  c.fill(0.7);
  CHECK(sobolev_norm(c, 1, 2.0) == Catch::Approx(0.7).epsilon(1e-12));

  auto f = sample_scalar(3, 32, [](const double* x) { return std::sin(2 * M_PI * x[0]); });
  double expect = 1.0 / std::sqrt(2.0) + 2 * M_PI / std::sqrt(2.0);
  CHECK(sobolev_norm(f, 1, 2.0) == Catch::Approx(expect).epsilon(1e-12));

  auto f64 = sample_scalar(3, 64, [](const double* x) { return std::sin(2 * M_PI * x[0]); });
  CHECK(std::abs(sobolev_norm(f, 1, 2.0) - sobolev_norm(f64, 1, 2.0)) < 1e-12);
  CHECK_THROWS(sobolev_norm(f, 3, 2.0));
}

TEST_CASE("poisson antidivergence single mode") {
  auto g = sample_scalar(3, 32, [](const double* x) { return std::cos(2 * M_PI * x[0]); });
  auto v = poisson_antidivergence(g);
  auto expect0 = sample_scalar(3, 32, [](const double* x) { return std::sin(2 * M_PI * x[0]) / (2 * M_PI); });
  double err = 0;
  for (std::int64_t i = 0; i < g.volume(); ++i) {
    err = std::max(err, std::abs(v(0, i) - expect0(0, i)));
    err = std::max(err, std::abs(v(1, i)));
    err = std::max(err, std::abs(v(2, i)));
  }
  CHECK(err < 1e-12);

  auto zero = PeriodicField::scalar(3, 16);
  auto vz = poisson_antidivergence(zero);
  CHECK(lp_norm(vz, 2.0) == 0.0);

  auto bad = sample_scalar(3, 16, [](const double*) { return 1.0; });
  CHECK_THROWS(poisson_antidivergence(bad));
}

TEST_CASE("div of grad-laplace-inverse recovers mean-zero input") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_band_limited(3, 32, 6, rng, 1, /*mean_zero=*/true);
    auto v = poisson_antidivergence(g, 1e-8);
    auto back = divergence(v);
    back -= g;
    double rel = lp_norm(back, 2.0) / std::max(1e-300, lp_norm(g, 2.0));
    CHECK(rel < 1e-8);
    // mode-wise symbol bound on integer frequencies
    CHECK(lp_norm(v, 2.0) <= lp_norm(g, 2.0) / (2 * M_PI) + 1e-12);
  }
}

TEST_CASE("product rule on the doubled grid") {
  std::mt19937_64 rng(7);
  auto a = random_band_limited(3, 32, 5, rng);
  auto b = random_band_limited(3, 32, 5, rng);
  // On the doubled grid the product of two band-limited fields is exact.
  auto A = fft_inverse(upsample_spectrum(fft_forward(a), 2));
  auto B = fft_inverse(upsample_spectrum(fft_forward(b), 2));
  auto AB = multiply_pointwise(A, B);
  auto dAB = partial_derivative(AB, 0);
  auto rhs = multiply_pointwise(partial_derivative(A, 0), B);
  rhs += multiply_pointwise(A, partial_derivative(B, 0));
  dAB -= rhs;
  double rel = lp_norm(dAB, 2.0) / std::max(1e-300, lp_norm(rhs, 2.0));
  CHECK(rel < 1e-10);
}

TEST_CASE("dealiased product equals exact modes of true product") {
  std::mt19937_64 rng(8);
  auto a = random_band_limited(3, 32, 5, rng);
  auto b = random_band_limited(3, 32, 5, rng);
  auto p = multiply_dealiased(a, b);
  // truncation of the exact product: compare against doubled-grid computation
  auto A = fft_inverse(upsample_spectrum(fft_forward(a), 2));
  auto B = fft_inverse(upsample_spectrum(fft_forward(b), 2));
  auto exact = fft_inverse(truncate_spectrum(fft_forward(multiply_pointwise(A, B), false), 32));
  exact -= p;
  CHECK(lp_norm(exact, std::numeric_limits<double>::infinity()) < 1e-12);
}

TEST_CASE("mollify: constants, Fourier multiplier, L1 contraction, commutation") {
  MollifierSpec spec{0.125, 1.0};
  auto c = PeriodicField::scalar(3, 32);
  c.fill(0.3);
  auto mc = mollify_space(c, spec);
  for (std::int64_t i = 0; i < mc.volume(); ++i) CHECK(mc(0, i) == Catch::Approx(0.3).epsilon(1e-14));

  // cosine is an eigenfunction; eigenvalue from the normalized taps
  auto f = sample_scalar(3, 32, [](const double* x) { return std::cos(2 * M_PI * x[0]); });
  auto mf = mollify_space(f, spec);
  auto taps = detail::mollifier_taps(spec.ell, 1.0 / 32, spec.sharpness);
  int m = (static_cast<int>(taps.size()) - 1) / 2;
  double cexp = 0;
  for (int k = -m; k <= m; ++k) cexp += taps[k + m] * std::cos(2 * M_PI * k / 32.0);
  CHECK(cexp > 0);
  CHECK(cexp <= 1.0);
  for (std::int64_t i : {std::int64_t(0), std::int64_t(1234), std::int64_t(32767)})
    CHECK(mf(0, i) == Catch::Approx(cexp * f(0, i)).margin(1e-13));

  // nonnegativity is preserved exactly (convex combination of samples)
  std::mt19937_64 rng(3);
  auto g = random_band_limited(3, 32, 6, rng);
  for (auto& v : g.raw()) v = std::abs(v);
  auto mg = mollify_space(g, spec);
  for (std::int64_t i = 0; i < mg.volume(); ++i) CHECK(mg(0, i) >= -1e-15);

  // commutes with spectral derivatives (both are Fourier multipliers)
  auto lhs = partial_derivative(mollify_space(g, spec), 1);
  auto rhs = mollify_space(partial_derivative(g, 1), spec);
  lhs -= rhs;
  CHECK(lp_norm(lhs, 2.0) / std::max(1e-300, lp_norm(rhs, 2.0)) < 1e-8);
}

TEST_CASE("mollify_spacetime window bookkeeping and L1 bound") {
  GridSpec g{3, 16};
  MollifierSpec spec{0.25, 1.0};
  double dt = 0.0625;
  TimeSeriesField ts(0.0, 1.0, 0.5, dt, g, 1);
  std::mt19937_64 rng(5);
  for (int k = 0; k < ts.size(); ++k) {
    double t = ts.frame_time(k);
    auto base = random_band_limited(3, 16, 3, rng);
    // smooth in time: blend two fixed fields with slow coefficients
    ts.frame(k) = base;
    ts.frame(k) *= 0.2;
    auto f = sample_scalar(3, 16, [t](const double* x) {
      return std::cos(2 * M_PI * x[0]) * std::cos(0.8 * t) + 0.4 * std::sin(2 * M_PI * x[2]);
    });
    ts.frame(k) += f;
  }
  auto out = mollify_spacetime(ts, spec);
  CHECK(out.t0() == ts.t0());
  CHECK(out.t1() == ts.t1());
  CHECK(out.pad() < ts.pad());
  CHECK(out.pad() >= ts.pad() - spec.ell - 1e-12);
  CHECK(out.consistent());

  auto l1 = [](const PeriodicField& f) { return lp_norm(f, 1.0); };
  double in_max = ts.max_over(ts.data_start(), ts.data_end(), l1);
  double out_max = out.max_over(out.data_start(), out.data_end(), l1);
  CHECK(out_max <= in_max + 1e-12);
}

TEST_CASE("field snapshot binary round trip") {
  std::mt19937_64 rng(17);
  auto f = random_band_limited(3, 16, 3, rng, 3);
  std::string path = "roundtrip_field.bin";
  write_field(path, f, 0.75);
  double t = 0;
  auto g = read_field(path, &t);
  CHECK(t == 0.75);
  REQUIRE(g.comps() == f.comps());
  REQUIRE(g.n() == f.n());
  double err = 0;
  for (int c = 0; c < f.comps(); ++c)
    for (std::int64_t i = 0; i < f.volume(); ++i) err = std::max(err, std::abs(f(c, i) - g(c, i)));
  CHECK(err == 0.0);
  std::remove(path.c_str());
}
