/// @file test_timeseries.cpp
/// @brief Time grid bookkeeping and interpolation accuracy.
#include <catch2/catch_amalgamated.hpp>

#include "convexint/timeseries.hpp"

using namespace convexint;

TEST_CASE("frame count and times") {
  GridSpec g{2, 8};
  TimeSeriesField ts(0.0, 1.0, 0.25, 0.125, g, 1);
  CHECK(ts.size() == 13);
  CHECK(ts.frame_time(0) == Catch::Approx(-0.25));
  CHECK(ts.frame_time(ts.size() - 1) == Catch::Approx(1.25));
  CHECK(ts.consistent());
}

TEST_CASE("cubic time interpolation is exact on cubics") {
  GridSpec g{2, 8};
  TimeSeriesField ts(0.0, 1.0, 0.25, 0.1, g, 1);
  auto poly = [](double t) { return 1.0 + t * (0.5 + t * (-2.0 + 0.75 * t)); };
  auto dpoly = [](double t) { return 0.5 + t * (-4.0 + 2.25 * t); };
  for (int k = 0; k < ts.size(); ++k) ts.frame(k).fill(poly(ts.frame_time(k)));
  for (double t : {0.03, 0.31, 0.77, 0.99}) {
    auto f = ts.eval(t);
    CHECK(f(0, 5) == Catch::Approx(poly(t)).epsilon(1e-12));
    auto d = ts.eval_deriv(t);
    CHECK(d(0, 5) == Catch::Approx(dpoly(t)).epsilon(1e-10));
  }
}

TEST_CASE("mollifier taps reject under-resolved kernels") {
  CHECK_THROWS(detail::mollifier_taps(0.05, 0.0625, 1.0));
  auto taps = detail::mollifier_taps(0.2, 0.0625, 1.0);
  double sum = 0;
  for (double w : taps) {
    CHECK(w >= 0);
    sum += w;
  }
  CHECK(sum == Catch::Approx(1.0).epsilon(1e-14));
}
