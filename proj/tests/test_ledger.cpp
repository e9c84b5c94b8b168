/// @file test_ledger.cpp
/// @brief Exact-rational checks of the exponent choice and inequality table.
#include <catch2/catch_amalgamated.hpp>

#include "convexint/ledger.hpp"

using namespace convexint;

TEST_CASE("feasible parameters at d=3, q=2") {
  auto c = feasible_parameters(3, Rat(2));
  CHECK(c.qp == Rat(2));
  CHECK(c.beta == Rat(10206));
  CHECK(c.kappa == Rat(91854));
  CHECK(c.mu == Rat(1714608));
  CHECK(c.a2 == Rat(3402));
  CHECK(c.a4 == Rat(3402));
  CHECK(c.a3 == Rat(5103));
  CHECK(c.a1 == Rat(1, 4));
  CHECK(c.delta == Rat(1, 30862956));
  // closed form denominator assembled digit by digit
  CHECK(1944 * 81 * 4 * 49 + 12 == 30862956);
}

TEST_CASE("a2 equals a4 for any admissible (d,q)") {
  for (int d : {3, 4, 5, 7}) {
    for (const char* qs : {"3/2", "2", "3", "17/5"}) {
      auto c = feasible_parameters(d, rat_from_string(qs));
      CHECK(c.a2 == c.a4);
      CHECK(c.a2 > 1);
      CHECK(c.a4 > 1);
      CHECK(c.a1 > 0);
      CHECK(c.a3 > 0);
    }
  }
}

TEST_CASE("rational parser") {
  CHECK(rat_from_string("3/2") == Rat(3, 2));
  CHECK(rat_from_string("2") == Rat(2));
  CHECK(rat_from_string("1.5") == Rat(3, 2));
  CHECK(rat_from_string("0.125") == Rat(1, 8));
}

TEST_CASE("selected margins at d=3, q=2") {
  auto c = feasible_parameters(3, Rat(2));
  auto rows = verify_exponent_inequalities(c, Rat(0));
  auto find = [&](const std::string& name) {
    for (auto& r : rows)
      if (r.name == name) return r;
    FAIL("row not found: " + name);
    return rows[0];
  };
  CHECK(find("structural-1a").margin == Rat(91854 - 40824));
  CHECK(find("pert-rho-moll").margin == Rat(10206 - 3402) - Rat(1, 4));
  CHECK(find("pert-rho-moll").margin == Rat(27215, 4));

  auto rows_half = verify_exponent_inequalities(c, c.delta / 2);
  for (auto& r : rows_half) {
    if (r.name == "pert-WP") CHECK(r.margin == Rat(1, 6));
  }
  auto rows_told = verify_exponent_inequalities(c, 9 * c.delta / 10);
  for (auto& r : rows_told) {
    if (r.name == "pert-WP") CHECK(r.margin == Rat(1, 10));
  }
}

TEST_CASE("alpha gate") {
  auto c = feasible_parameters(3, Rat(2));
  CHECK_THROWS(verify_exponent_inequalities(c, c.delta));
  CHECK_THROWS(verify_exponent_inequalities(c, 2 * c.delta));
}

TEST_CASE("sweep passes with strictly positive margins") {
  auto s = sweep({3, 4, 5}, {rat_from_string("3/2"), Rat(2), Rat(3)});
  CHECK(s.all_pass);
  CHECK(s.failures.empty());
  CHECK(s.points == 27);
  // every row margin strictly positive over the sweep
  std::vector<Rat> qs = {rat_from_string("3/2"), Rat(2), Rat(3)};
  for (int d : {3, 4, 5}) {
    for (const Rat& q : qs) {
      auto c = feasible_parameters(d, q);
      std::vector<Rat> alphas = {Rat(0), Rat(c.delta / 2), Rat(9 * c.delta / 10)};
      for (const Rat& a : alphas) {
        for (auto& r : verify_exponent_inequalities(c, a)) CHECK(r.margin > 0);
      }
    }
  }
}

TEST_CASE("delta decreases in d at fixed q") {
  Rat prev;
  bool first = true;
  for (int d : {3, 4, 5, 6, 7, 8}) {
    auto c = feasible_parameters(d, Rat(2));
    if (!first) CHECK(c.delta < prev);
    prev = c.delta;
    first = false;
  }
}
