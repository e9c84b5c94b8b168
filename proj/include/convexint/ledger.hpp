/// @file ledger.hpp
/// @brief Exact-rational bookkeeping of the scheme's exponent choice and the
///        full inequality table that closes the iteration.
///
/// Every inequality is kept as data (name, closed-form margin, strictness) so
/// each row can be audited against its formula string. All arithmetic is
/// exact (GMP rationals); a row passes when its margin is positive (or
/// nonnegative for the non-strict structural rows).
#pragma once

#include <gmpxx.h>

#include <functional>
#include <string>
#include <vector>

#include "convexint/util.hpp"

namespace convexint {

using Rat = mpq_class;

inline Rat rat_from_string(const std::string& s) {
  // Accepts "3", "3/2" and plain decimals like "1.5".
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rat r;
    require(r.set_str(s, 10) == 0, "cannot parse rational: " + s);
    r.canonicalize();
    return r;
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  std::size_t frac = s.size() - dot - 1;
  Rat num;
  require(num.set_str(digits, 10) == 0, "cannot parse rational: " + s);
  Rat den(1);
  for (std::size_t i = 0; i < frac; ++i) den *= 10;
  Rat r = num / den;
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }
inline double rat_double(const Rat& r) { return r.get_d(); }

/// The feasible exponent choice and the derived gap delta(d,q).
struct ExponentChoice {
  int d = 3;
  Rat q, qp;                      // q and its conjugate q' = q/(q-1)
  Rat beta, kappa, gamma, mu;     // scale exponents: ell, 1/lambda, sigma, rbar
  Rat a1, a2, a3, a4;
  Rat delta;
};

inline ExponentChoice feasible_parameters(int d, const Rat& q) {
  require(d >= 3, "feasible_parameters: d >= 3 required");
  require(q > 1, "feasible_parameters: q > 1 required");
  ExponentChoice c;
  c.d = d;
  c.q = q;
  c.qp = q / (q - 1);
  Rat dd(d);
  Rat s = dd + q + c.qp;
  c.beta = 81 * c.qp * dd * dd * s;
  c.kappa = 3 * c.beta * dd;
  c.gamma = Rat(1, 2);
  c.mu = 4 * c.beta * dd * c.qp * s;
  c.a1 = Rat(1, 4);
  c.a2 = c.beta / 3;
  c.a3 = c.beta / 2;
  c.a4 = c.beta / 3;
  c.delta = Rat(1, 6) / (c.mu * dd + c.qp);
  // Closed form of the same gap; the two must agree identically.
  Rat closed = 1 / (1944 * dd * dd * dd * dd * c.qp * c.qp * s * s + 6 * c.qp);
  require(c.delta == closed, "delta closed forms disagree (internal error)");
  require(c.a1 > 0 && c.a2 > 1 && c.a3 > 0 && c.a4 > 1, "exponent choice violates a-parameter constraints");
  return c;
}

struct LedgerRow {
  std::string name;
  std::string formula;  // human-readable margin expression
  Rat margin;
  bool strict = true;   // margin must be > 0 (else >= 0)
  bool pass = false;
};

/// Full inequality table for a given choice and alpha in [0, delta).
inline std::vector<LedgerRow> verify_exponent_inequalities(const ExponentChoice& c, const Rat& alpha) {
  require(alpha >= 0, "alpha must be >= 0");
  require(alpha < c.delta, "alpha must be < delta(d,q)");
  Rat d(c.d);
  const Rat &q = c.q, &qp = c.qp, &b = c.beta, &k = c.kappa, &g = c.gamma, &m = c.mu;
  const Rat &a1 = c.a1, &a2 = c.a2, &a3 = c.a3, &a4 = c.a4;
  Rat a24 = a2 * a4;
  std::vector<LedgerRow> rows;
  auto add = [&](const std::string& name, const std::string& formula, const Rat& margin, bool strict) {
    LedgerRow r{name, formula, margin, strict, false};
    r.pass = strict ? (margin > 0) : (margin >= 0);
    rows.push_back(std::move(r));
  };

  // Structural constraints on the parameter scales.
  add("structural-1a", "kappa - beta*(d+1)", k - b * (d + 1), false);
  add("structural-1b", "1 + mu*d/q' - kappa*(d-1) - beta*(2d+1) - gamma",
      1 + m * d / qp - k * (d - 1) - b * (2 * d + 1) - g, false);
  add("structural-2", "mu + q'/d - beta*q' - kappa*(2d-2)/(d-2)",
      m + qp / d - b * qp - k * (2 * d - 2) / (d - 2), false);

  // Time localization: look-ahead and kernel width fit in the trimmed window.
  add("timeloc-tau", "1 + mu*d/q' - kappa*(d-1) - gamma - a3", 1 + m * d / qp - k * (d - 1) - g - a3, false);
  add("timeloc-ell", "beta - a3", b - a3, false);

  // Perturbation size rows: each exponent must exceed a1.
  add("pert-rho-moll", "(beta - a2) - a1", b - a2 - a1, true);
  add("pert-thetaP", "(1 - gamma) - a1", 1 - g - a1, true);
  add("pert-thetaT",
      "mu/q' - kappa*(d-1)/q - beta*(d/(q-1)+2d+3) - gamma + 1 + 1/d - a1",
      m / qp - k * (d - 1) / q - b * (d / (q - 1) + 2 * d + 3) - g + 1 + 1 / d - a1, true);
  add("pert-thetaC", "mu*d/q' - kappa*(d-1) - 2*beta*(d+1) - gamma + 2 - a1",
      m * d / qp - k * (d - 1) - 2 * b * (d + 1) - g + 2 - a1, true);
  add("pert-b-moll", "(beta - a2) - a1", b - a2 - a1, true);
  add("pert-WP", "(gamma - a1) - alpha*(mu*d + q')", g - a1 - alpha * (m * d + qp), true);

  // Derivative rows: each exponent plus a2*a4 must be positive.
  add("deriv-rho-moll", "a2*a4 - a2", a24 - a2, true);
  Rat thetaP_t = a24 + 1 - g - b * (d + 1);
  Rat thetaP_x = a24 - m * d / qp - b * (d + qp + 1);
  add("deriv-thetaP-a", "a2*a4 + 1 - gamma - beta*(d+1)", thetaP_t, true);
  add("deriv-thetaP-b", "a2*a4 - mu*d/q' - beta*(d+q'+1)", thetaP_x, true);
  Rat thetaT_t = a24 - m * d / qp - b * (d + 1);
  add("deriv-thetaT-time", "a2*a4 - mu*d/q' - beta*(d+1)", thetaT_t, true);
  add("deriv-thetaT-space",
      "a2*a4 + mu/q - kappa*(d-1)/q - beta*(d/(q-1)+2d+3) - gamma + 1 - 1/(d(q-1))",
      a24 + m / q - k * (d - 1) / q - b * (d / (q - 1) + 2 * d + 3) - g + 1 - 1 / (d * (q - 1)), true);
  Rat thetaC = std::min({thetaP_t, thetaP_x, thetaT_t});
  add("deriv-thetaC", "min(deriv-thetaP-a, deriv-thetaP-b, deriv-thetaT-time)", thetaC, true);
  add("deriv-b-moll", "a2*a4 - a2", a24 - a2, true);
  add("deriv-WP", "a2*a4 - mu*(d*alpha + d/q') - beta*(d+q'+1) + 2*gamma - 1 - q'*alpha",
      a24 - m * (d * alpha + d / qp) - b * (d + qp + 1) + 2 * g - 1 - qp * alpha, true);

  // Error rows: each exponent must exceed a4.
  add("err-R1", "2*beta - 2*a2 - a4", 2 * b - 2 * a2 - a4, true);
  add("err-R2", "mu*d/q' - beta*(2d+1) - gamma + 2 - a4", m * d / qp - b * (2 * d + 1) - g + 2 - a4, true);
  add("err-R3", "2 - gamma - beta*(d+1) + mu*d/q' - a4", 2 - g - b * (d + 1) + m * d / qp - a4, true);
  add("err-R4", "mu - beta*(d+q'+1) + 1 + q'/d - a4", m - b * (d + qp + 1) + 1 + qp / d - a4, true);
  add("err-R5", "kappa - beta*(d+2) + 1 - a4", k - b * (d + 2) + 1 - a4, true);
  add("err-R6a", "mu - beta*(d+q'+2) + 1 + q'/d - a4", m - b * (d + qp + 2) + 1 + qp / d - a4, true);
  add("err-R6b", "mu*d/q' - kappa*(d-1) - beta*(d+2) - gamma + 2 - a4",
      m * d / qp - k * (d - 1) - b * (d + 2) - g + 2 - a4, true);
  add("err-R7a", "mu*d/q - beta*(d*q' - d/q') + gamma + 1/(q-1) - a4",
      m * d / q - b * (d * qp - d / qp) + g + 1 / (q - 1) - a4, true);
  add("err-R7b", "mu*d/q' - kappa*(d-1) - beta*(3d+2-d/q) - gamma + 2 - a4",
      m * d / qp - k * (d - 1) - b * (3 * d + 2 - d / q) - g + 2 - a4, true);
  add("err-R7c", "mu/q' - kappa*(d-1)/q - beta*(d/(q-1)+2d+3) + 1 + 1/d - a4",
      m / qp - k * (d - 1) / q - b * (d / (q - 1) + 2 * d + 3) + 1 + 1 / d - a4, true);
  return rows;
}

struct SweepFailure {
  int d;
  Rat q, alpha;
  LedgerRow row;
};

struct SweepSummary {
  int points = 0;
  int rows_checked = 0;
  bool all_pass = true;
  std::vector<SweepFailure> failures;
};

/// Run the full table over (d, q) samples and alpha in {0, delta/2, 9delta/10}.
inline SweepSummary sweep(const std::vector<int>& ds, const std::vector<Rat>& qs) {
  SweepSummary s;
  for (int d : ds) {
    require(d >= 3 && d <= 10, "sweep: d out of range [3,10]");
    for (const Rat& q : qs) {
      require(q > 1 && q <= 10, "sweep: q out of range (1,10]");
      ExponentChoice c = feasible_parameters(d, q);
      const Rat alphas[3] = {Rat(0), c.delta / 2, 9 * c.delta / 10};
      for (const Rat& a : alphas) {
        ++s.points;
        auto rows = verify_exponent_inequalities(c, a);
        for (auto& r : rows) {
          ++s.rows_checked;
          if (!r.pass) {
            s.all_pass = false;
            s.failures.push_back({d, q, a, r});
          }
        }
      }
    }
  }
  return s;
}

}  // namespace convexint
