#include <gtest/gtest.h>

#include <cmath>

#include "rsg/diagnostics.hpp"
#include "rsg/errors.hpp"
#include "rsg_harness/problems.hpp"

using namespace rsg;

TEST(EmbedMultipliers, ScattersIntoPositions) {
  const Vector lambda = (Vector(2) << 0.5, -1.25).finished();
  const Vector eta = embed_multipliers(lambda, {3, 0}, 5);
  const Vector expected = (Vector(5) << -1.25, 0, 0, 0.5, 0).finished();
  EXPECT_EQ(eta, expected);
}

TEST(EmbedMultipliers, EmptyGivesZeros) {
  EXPECT_EQ(embed_multipliers(Vector(0), {}, 3), Vector::Zero(3));
}

TEST(EmbedMultipliers, RejectsBadInput) {
  EXPECT_THROW(embed_multipliers(Vector::Ones(2), {1}, 3), DimensionError);
  EXPECT_THROW(embed_multipliers(Vector::Ones(1), {3}, 3), DimensionError);
}

class BallLpKkt : public ::testing::Test {
 protected:
  void SetUp() override { p = harness::make_ball_lp(6, 11, &c); }
  ProblemSpec p;
  Vector c;
};

TEST_F(BallLpKkt, AnalyticPairPasses) {
  const Vector x = -c / c.norm();
  const Vector eta = Vector::Constant(1, c.norm() / 2.0);
  const KktReport r = kkt_check(p, x, eta, 1e-10, 1e-10, 1e-10);
  EXPECT_LE(r.stationarity, 1e-10);
  EXPECT_LE(r.max_complementarity, 1e-10);
  EXPECT_TRUE(r.pass());
}

TEST_F(BallLpKkt, ZeroMultiplierLeavesGradient) {
  const Vector x = -c / c.norm();
  const KktReport r = kkt_check(p, x, Vector::Zero(1), 1e-6, 1e-6, 1e-6);
  EXPECT_NEAR(r.stationarity, c.norm(), 1e-12);
  EXPECT_FALSE(r.stationarity_pass);
  EXPECT_TRUE(r.feasibility_pass);
}

TEST_F(BallLpKkt, NegativeMultiplierFlagged) {
  const Vector x = -c / c.norm();
  const KktReport r = kkt_check(p, x, Vector::Constant(1, -0.1), 1e3, 1e-3, 1e3);
  EXPECT_FALSE(r.multiplier_pass);
  EXPECT_DOUBLE_EQ(r.min_multiplier, -0.1);
}

TEST_F(BallLpKkt, InfeasiblePointFlagged) {
  const Vector x = -2.0 * c / c.norm();
  const KktReport r = kkt_check(p, x, Vector::Zero(1), 1e3, 1e3, 1e3);
  EXPECT_NEAR(r.max_violation, 3.0, 1e-12);
  EXPECT_FALSE(r.feasibility_pass);
}

TEST(KktCheck, UnconstrainedMinimum) {
  ProblemSpec p;
  p.dim = 2;
  p.objective.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.objective.gradient = [](const Vector& x) -> Vector { return x; };
  p.x0 = Vector::Zero(2);
  const KktReport r = kkt_check(p, Vector::Zero(2), Vector(0), 1e-12, 0.0, 0.0);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.stationarity, 0.0);
}

TEST(KktCheck, RequiresGradient) {
  ProblemSpec p;
  p.dim = 1;
  p.objective.value = [](const Vector& x) { return x[0]; };
  p.x0 = Vector::Zero(1);
  EXPECT_THROW(kkt_check(p, p.x0, Vector(0), 1, 1, 1), MissingGradientError);
}

TEST(KktCheck, LengthMismatch) {
  const ProblemSpec p = harness::make_halfline();
  EXPECT_THROW(kkt_check(p, Vector::Zero(2), Vector::Zero(1), 1, 1, 1), DimensionError);
  EXPECT_THROW(kkt_check(p, Vector::Zero(1), Vector::Zero(2), 1, 1, 1), DimensionError);
}

TEST(ComplementarityBudget, MatchesFormula) {
  Vector c;
  const ProblemSpec p = harness::make_ball_lp(4, 2, &c);
  const Vector x = 0.5 * Vector::Ones(4);
  const Vector eta = Vector::Constant(1, 3.0);
  // |grad g| = |2x| = 2.
  EXPECT_NEAR(default_complementarity_budget(p, x, eta, 1e-6), 1e-6 * 2.0 * 3.0 + 1e-8, 1e-20);
}

TEST(EstimateMultipliers, HalflineOptimum) {
  const ProblemSpec p = harness::make_halfline();
  const Vector eta = estimate_multipliers(p, Vector::Constant(1, -1.0), 1e-6);
  ASSERT_EQ(eta.size(), 1);
  EXPECT_NEAR(eta[0], 1.0, 1e-15);
  EXPECT_EQ(estimate_multipliers(p, Vector::Zero(1), 1e-6)[0], 0.0);
}
