#include <gtest/gtest.h>

#include <cmath>

#include "coupledfix/closed_form.hpp"

using namespace coupledfix;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

// One step of each recursion, written out independently of the closed forms.
ScalarPair step(OracleKind k, ScalarPair p, double lambda) {
  switch (k) {
    case OracleKind::picard_example_2_1:
      return {(p.x - 2.0 * p.y) / 3.0, (p.y - 2.0 * p.x) / 3.0};
    case OracleKind::krasnoselskij_example_4_1: {
      const double x = (1.0 - lambda) * p.x + lambda * (-(p.x + p.x) / 2.0);
      return {x, x};
    }
    case OracleKind::double_krasnoselskij_example_2_1:
      // The recursion the printed formula solves: F(x,y) = -(x+y)/2.
      return {(1.0 - lambda) * p.x + lambda * (-(p.x + p.y) / 2.0),
              (1.0 - lambda) * p.y + lambda * (-(p.y + p.x) / 2.0)};
  }
  return p;
}

}  // namespace

TEST(ClosedForm, PicardExample21) {
  const OracleHandle h{OracleKind::picard_example_2_1, 1.0, 0.0};
  const auto p1 = oracle_iterate(h, 1);
  EXPECT_DOUBLE_EQ(p1.x, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p1.y, -2.0 / 3.0);
  const auto lim = oracle_limit(h);
  EXPECT_EQ(lim.x, 0.5);
  EXPECT_EQ(lim.y, -0.5);
  const auto diag = oracle_limit({OracleKind::picard_example_2_1, 0.3, 0.3});
  EXPECT_EQ(diag.x, 0.0);
  EXPECT_EQ(diag.y, 0.0);
}

TEST(ClosedForm, Krasnoselskij41) {
  const OracleHandle h{OracleKind::krasnoselskij_example_4_1, 1.0, 0.0, 0.5};
  for (long n = 1; n < 5; ++n) EXPECT_EQ(oracle_iterate(h, n).x, 0.0);
  const OracleHandle q{OracleKind::krasnoselskij_example_4_1, 1.0, 0.0, 0.25};
  EXPECT_EQ(oracle_iterate(q, 3).x, 0.125);
}

TEST(ClosedForm, DoubleKrasnoselskijEqualStart) {
  for (double lambda : {0.1, 0.3, 0.8}) {
    const OracleHandle h{OracleKind::double_krasnoselskij_example_2_1, 0.7, 0.7, lambda};
    for (long n = 0; n < 20; ++n) {
      const auto p = oracle_iterate(h, n);
      const double want = std::pow(1.0 - 2.0 * lambda, static_cast<double>(n)) * 0.7;
      EXPECT_NEAR(p.x, want, 1e-14);
      EXPECT_EQ(p.x, p.y);
    }
  }
  const auto lim = oracle_limit({OracleKind::double_krasnoselskij_example_2_1, 0.2, -0.9, 0.3});
  EXPECT_EQ(lim.x, 0.0);
  EXPECT_EQ(lim.y, 0.0);
}

TEST(ClosedForm, InitialValuesExact) {
  for (auto k : {OracleKind::picard_example_2_1, OracleKind::double_krasnoselskij_example_2_1}) {
    const auto p = oracle_iterate({k, 0.123456789, -0.987654321, 0.4}, 0);
    EXPECT_EQ(p.x, 0.123456789);
    EXPECT_EQ(p.y, -0.987654321);
  }
}

TEST(ClosedForm, Errors) {
  EXPECT_THROW(oracle_iterate({OracleKind::krasnoselskij_example_4_1, 1, 0, 0.5}, -1), std::out_of_range);
  EXPECT_THROW(oracle_iterate({OracleKind::krasnoselskij_example_4_1, 1, 0, 1.5}, 2), std::out_of_range);
  EXPECT_THROW(oracle_limit({OracleKind::double_krasnoselskij_example_2_1, 1, 0, 0.0}), std::domain_error);
  EXPECT_THROW(oracle_iterate({static_cast<OracleKind>(99), 1, 0, 0.5}, 2), std::invalid_argument);
}

TEST(ClosedForm, RecurrenceConsistency) {
  for (auto k : {OracleKind::picard_example_2_1, OracleKind::krasnoselskij_example_4_1,
                 OracleKind::double_krasnoselskij_example_2_1}) {
    for (double lambda : {0.2, 0.5, 0.65}) {
      const OracleHandle h{k, 0.8, -0.35, lambda};
      for (long n = 0; n <= 60; ++n) {
        const auto next = step(k, oracle_iterate(h, n), lambda);
        const auto want = oracle_iterate(h, n + 1);
        ASSERT_LE(rel_err(next.x, want.x), 1e-12) << to_string(k) << " n=" << n;
        ASSERT_LE(rel_err(next.y, want.y), 1e-12) << to_string(k) << " n=" << n;
      }
    }
  }
}

TEST(ClosedForm, LimitMatchesLongRun) {
  // Contraction factors here are at most 0.85; 0.9^200 * 1 is already 7e-10.
  const OracleHandle hs[] = {
      {OracleKind::picard_example_2_1, 0.4, -0.6},
      {OracleKind::krasnoselskij_example_4_1, 0.9, 0.0, 0.3},
      {OracleKind::double_krasnoselskij_example_2_1, 0.9, -0.2, 0.3},
      {OracleKind::double_krasnoselskij_example_2_1, -1.0, 1.0, 0.15},
  };
  for (const auto& h : hs) {
    const auto p = oracle_iterate(h, 200);
    const auto lim = oracle_limit(h);
    EXPECT_LE(std::hypot(p.x - lim.x, p.y - lim.y), 1e-10) << to_string(h.kind);
  }
}
