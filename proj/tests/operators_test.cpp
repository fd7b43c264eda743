#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "coupledfix/contractivity.hpp"
#include "coupledfix/operators.hpp"
#include "support.hpp"

using namespace coupledfix;

TEST(Operators, EvalBuiltins) {
  EXPECT_DOUBLE_EQ(eval(example_2_1(), Vector{1}, Vector{0})[0], 1.0 / 3.0);
  EXPECT_EQ(eval(example_2_2(), Vector{-1}, Vector{2}), Vector{-1});
  EXPECT_EQ(eval(example_4_1(), Vector{1}, Vector{1}), Vector{-1});
}

TEST(Operators, EvalErrors) {
  EXPECT_THROW(eval(example_2_1(), Vector{1, 2}, Vector{0, 0}), DimensionError);
  BivariateOperator blowup("blowup", Box::cube(1, -1, 1),
                           [](const Vector&, const Vector&) { return std::vector<double>{std::numeric_limits<double>::infinity()}; },
                           true);
  EXPECT_THROW(eval(blowup, Vector{0}, Vector{0}), OperatorDefect);
}

TEST(Operators, IsCoupledFixedPoint) {
  const auto f22 = example_2_2();
  EXPECT_TRUE(is_coupled_fixed_point(f22, {Vector{2}, Vector{-1}}, 1e-10));
  EXPECT_TRUE(is_coupled_fixed_point(f22, {Vector{-4}, Vector{-4}}, 1e-10));
  EXPECT_FALSE(is_coupled_fixed_point(example_2_1(), {Vector{1}, Vector{1}}, 1e-10));
  EXPECT_THROW(is_coupled_fixed_point(f22, {Vector{1}, Vector{1}}, 0.0), std::invalid_argument);
  EXPECT_THROW(is_coupled_fixed_point(f22, {Vector{1, 1}, Vector{1, 1}}, 1e-10), DimensionError);
}

TEST(Operators, BuiltinKnownFixedPointsHold) {
  for (const auto& f : {example_2_1(), example_2_2(), example_4_1()}) {
    ASSERT_FALSE(f.known_coupled_fixed_points().empty());
    for (const auto& p : f.known_coupled_fixed_points()) {
      EXPECT_TRUE(is_coupled_fixed_point(f, p, 1e-10)) << f.name();
    }
  }
}

TEST(Operators, Example22LeavesItsDomain) {
  const auto f = example_2_2();
  EXPECT_EQ(eval(f, Vector{-4}, Vector{4}), Vector{-20});
  EXPECT_FALSE(f.domain().contains(Vector{-20}));
  EXPECT_FALSE(f.range_in_domain());
}

TEST(Operators, SelfMapsStayInDomain) {
  SampleStream s(3);
  const auto small = make_linear_operator(Matrix::from_rows({{0.2, 0.1}, {0.0, 0.3}}),
                                          Matrix::from_rows({{-0.3, 0.0}, {0.1, 0.2}}), Vector{0.1, -0.1},
                                          Box::cube(2, -1, 1));
  ASSERT_TRUE(small.range_in_domain());
  for (const auto& f : {example_2_1(), example_4_1(), small}) {
    ASSERT_TRUE(f.range_in_domain()) << f.name();
    for (int i = 0; i < 5000; ++i) {
      const Vector x = s.point(f.domain()), y = s.point(f.domain());
      ASSERT_TRUE(f.domain().contains(f(x, y))) << f.name();
    }
  }
}

TEST(Operators, LinearReproducesExample21) {
  const auto lin = make_linear_operator(Matrix::from_rows({{1.0 / 3.0}}), Matrix::from_rows({{-2.0 / 3.0}}),
                                        Vector{0}, Box::cube(1, -1, 1));
  const auto ref = example_2_1();
  SampleStream s(4);
  for (int i = 0; i < 1000; ++i) {
    const Vector x = s.point(ref.domain()), y = s.point(ref.domain());
    ASSERT_NEAR(lin(x, y)[0], ref(x, y)[0], 1e-15);
  }
  EXPECT_TRUE(lin.range_in_domain());
}

TEST(Operators, LinearConstantMap) {
  const auto f = make_linear_operator(Matrix::zeros(1), Matrix::zeros(1), Vector{0.5}, Box::cube(1, 0, 1));
  ASSERT_EQ(f.known_coupled_fixed_points().size(), 1u);
  EXPECT_EQ(f.known_coupled_fixed_points()[0], CoupledPair(Vector{0.5}, Vector{0.5}));
}

TEST(Operators, LinearDiagonalFixedPoint) {
  const Matrix a = Matrix::from_rows({{0.2, 0}, {0, 0.1}});
  const Matrix b = Matrix::from_rows({{0.3, 0}, {0, 0.4}});
  const Vector c{1, 1};
  const auto oracle = coupledfix::testing::solve_fixed_point_by_elimination(a, b, c);
  EXPECT_NEAR(oracle[0], 2.0, 1e-14);
  EXPECT_NEAR(oracle[1], 2.0, 1e-14);
  const auto f = make_linear_operator(a, b, c, Box::cube(2, -5, 5));
  ASSERT_EQ(f.known_coupled_fixed_points().size(), 1u);
  const auto& p = f.known_coupled_fixed_points()[0];
  EXPECT_NEAR(p.x[0], 2.0, 1e-14);
  EXPECT_NEAR(p.x[1], 2.0, 1e-14);
  EXPECT_TRUE(is_coupled_fixed_point(f, p, 1e-10));
}

TEST(Operators, LinearSingularSystem) {
  EXPECT_THROW(linear_fixed_point(Matrix::from_rows({{0.5}}), Matrix::from_rows({{0.5}}), Vector{1}),
               std::domain_error);
  // Norm sum 1: no fixed point is attached, and construction still succeeds.
  const auto f = make_linear_operator(Matrix::from_rows({{0.5}}), Matrix::from_rows({{0.5}}), Vector{0},
                                      Box::cube(1, -1, 1));
  EXPECT_TRUE(f.known_coupled_fixed_points().empty());
}

TEST(Operators, LinearDimensionMismatch) {
  EXPECT_THROW(make_linear_operator(Matrix::zeros(2), Matrix::zeros(1), Vector{0, 0}, Box::cube(2, -1, 1)),
               DimensionError);
  EXPECT_THROW(Matrix::from_rows({{1, 2}}), std::invalid_argument);
}

TEST(Operators, SpectralNormAgreesWithPowerIteration) {
  SampleStream s(21);
  for (std::size_t d : {1u, 2u, 5u, 12u}) {
    const Matrix m = coupledfix::testing::random_matrix(s, d);
    EXPECT_NEAR(spectral_norm(m), coupledfix::testing::spectral_norm_by_power_iteration(m), 1e-8) << d;
  }
}

TEST(Operators, RegistryLookup) {
  EXPECT_EQ(make_operator("example_4_1").name(), "example_4_1");
  EXPECT_THROW(make_operator("linear"), std::invalid_argument);
  EXPECT_THROW(make_operator("nope"), std::invalid_argument);
  EXPECT_EQ(operator_names().size(), 4u);
}

// (x, y) -> (x - 2y)/3 has F(x,y) = x exactly when y = -x, so its coupled
// fixed points fill the antidiagonal. Only (0,0) has equal components.
TEST(OperatorProperties, Example21CoupledFixedPointsLieOnAntidiagonal) {
  const double step = 1e-3;
  std::size_t hits = 0;
  bool saw_off_origin = false;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + i * step;
    for (int j = 0; j <= 2000; ++j) {
      const double y = -1.0 + j * step;
      const double r = std::max(std::abs((x - 2.0 * y) / 3.0 - x), std::abs((y - 2.0 * x) / 3.0 - y));
      if (r < 1e-6) {
        ++hits;
        ASSERT_LE(std::abs(x + y), 2e-6) << x << "," << y;
        if (std::abs(x) > 1e-3) saw_off_origin = true;
      }
    }
  }
  EXPECT_EQ(hits, 2001u);
  EXPECT_TRUE(saw_off_origin);
  const auto f = example_2_1();
  EXPECT_TRUE(is_coupled_fixed_point(f, {Vector{0.5}, Vector{-0.5}}, 1e-12));
  // Equal components: only the origin.
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + i * step;
    if (std::abs(f(Vector{x}, Vector{x})[0] - x) < 1e-6) {
      ASSERT_LE(std::abs(x), 1e-3);
    }
  }
}

TEST(OperatorProperties, Example22GridFindsTheFourPoints) {
  const auto f = example_2_2();
  const std::vector<std::pair<double, double>> known = {{-4, -4}, {1, 1}, {-1, 2}, {2, -1}};
  std::vector<int> found(known.size(), 0);
  for (int i = 0; i <= 800; ++i) {
    const double x = -4.0 + i * 0.01;
    for (int j = 0; j <= 800; ++j) {
      const double y = -4.0 + j * 0.01;
      const double r = std::max(std::abs(4 - x * x - 2 * y - x), std::abs(4 - y * y - 2 * x - y));
      if (r >= 1e-6) continue;
      bool matched = false;
      for (std::size_t k = 0; k < known.size(); ++k) {
        if (std::hypot(x - known[k].first, y - known[k].second) < 1e-3) {
          ++found[k];
          matched = true;
        }
      }
      ASSERT_TRUE(matched) << x << "," << y;
    }
  }
  for (int c : found) EXPECT_EQ(c, 1);
}

TEST(OperatorProperties, LinearFamilyIsWeaklyNonexpansive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto lp = coupledfix::testing::random_linear_problem(100 + seed, 2 + seed % 6, 1.0);
    const auto& lin = *lp.op.linear();
    ASSERT_LE(lin.a_norm + lin.b_norm, 1.0 + 1e-12);
    const auto quads = sample_quadruples(lp.op.domain(), 500, seed);
    for (const auto& q : quads) {
      const double lhs = distance(lp.op(q.x, q.y), lp.op(q.u, q.v));
      const double rhs = lin.a_norm * distance(q.x, q.u) + lin.b_norm * distance(q.y, q.v);
      ASSERT_LE(lhs, rhs + 1e-9 * std::max(1.0, rhs));
    }
  }
}

TEST(OperatorProperties, EvaluationIsDeterministic) {
  const auto lp = coupledfix::testing::random_linear_problem(77, 6, 0.8);
  SampleStream s(1);
  for (int i = 0; i < 100; ++i) {
    const Vector x = s.point(lp.op.domain()), y = s.point(lp.op.domain());
    ASSERT_EQ(lp.op(x, y), lp.op(x, y));
  }
}
