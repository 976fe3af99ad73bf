#include "oracles.hpp"

#include <maskrl/convex/containment.hpp>
#include <maskrl/convex/linear_program.hpp>
#include <maskrl/convex/scaling_program.hpp>
#include <maskrl/relevant/relevant_sets.hpp>

#include <gtest/gtest.h>

#include <numeric>

using namespace maskrl;

TEST(LinearProgram, SimpleOptimum) {
  // max x + y  s.t.  x + 2y <= 4, 3x + y <= 6, x, y >= 0   →  (1.6, 1.2)
  LinearProgram lp(2);
  lp.objective << -1.0, -1.0;
  lp.add_inequality(Vector{{1.0, 2.0}}, 4.0);
  lp.add_inequality(Vector{{3.0, 1.0}}, 6.0);
  lp.lower = Vector::Zero(2);
  const LpResult r = solve_lp(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.x(0), 1.6, 1e-10);
  EXPECT_NEAR(r.x(1), 1.2, 1e-10);
  EXPECT_NEAR(r.objective, -2.8, 1e-10);
}

TEST(LinearProgram, InfeasibleAndUnboundedAreStatuses) {
  LinearProgram inf(1);
  inf.objective << 1.0;
  inf.add_inequality(Vector{{1.0}}, -1.0);
  inf.lower = Vector::Zero(1);
  EXPECT_EQ(solve_lp(inf).status, LpStatus::infeasible);

  LinearProgram unb(1);
  unb.objective << -1.0;
  unb.lower = Vector::Zero(1);
  EXPECT_EQ(solve_lp(unb).status, LpStatus::unbounded);
}

TEST(LinearProgram, EqualitiesAndFreeVariables) {
  // min |x| style: min t s.t. t >= x - 3, t >= 3 - x, x + y = 1, y = -1 → x = 2, t = 1
  LinearProgram lp(3);
  lp.objective << 0.0, 0.0, 1.0;
  lp.add_inequality(Vector{{1.0, 0.0, -1.0}}, 3.0);
  lp.add_inequality(Vector{{-1.0, 0.0, -1.0}}, -3.0);
  lp.add_equality(Vector{{1.0, 1.0, 0.0}}, 1.0);
  lp.add_equality(Vector{{0.0, 1.0, 0.0}}, -1.0);
  const LpResult r = solve_lp(lp);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.x(0), 2.0, 1e-10);
  EXPECT_NEAR(r.x(2), 1.0, 1e-10);
  EXPECT_LE(lp_violation(lp, r.x), 1e-10);
}

TEST(LinearProgram, RandomProgramsAreFeasibleAtOptimum) {
  Rng rng(23);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const int nv = 4;
    LinearProgram lp(nv);
    for (int i = 0; i < nv; ++i) lp.objective(i) = n(rng);
    lp.lower = Vector::Constant(nv, -5.0);
    lp.upper = Vector::Constant(nv, 5.0);
    for (int k = 0; k < 6; ++k) {
      Vector row(nv);
      for (int i = 0; i < nv; ++i) row(i) = n(rng);
      lp.add_inequality(row, 1.0 + std::abs(n(rng)));
    }
    const LpResult r = solve_lp(lp);
    ASSERT_TRUE(r.optimal());
    EXPECT_LE(lp_violation(lp, r.x), 1e-9);
    // no random feasible point does better
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int s = 0; s < 200; ++s) {
      Vector x(nv);
      for (int i = 0; i < nv; ++i) x(i) = u(rng);
      if (lp_violation(lp, x) == 0.0) EXPECT_GE(lp.objective.dot(x), r.objective - 1e-9);
    }
  }
}

TEST(LinearProgram, RejectsInconsistentShapes) {
  LinearProgram lp(2);
  lp.ineq_matrix = Matrix::Zero(1, 3);
  lp.ineq_rhs = Vector::Zero(1);
  EXPECT_THROW(lp.validate(), std::invalid_argument);
}

TEST(Containment, BoxInBox) {
  const Zonotope outer = Zonotope::from_box(IntervalBox(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)));
  const Zonotope inner(Vector{{0.2, 0.0}}, 0.5 * Matrix::Identity(2, 2));
  const ContainmentResult r = zonotope_containment(inner, outer);
  EXPECT_TRUE(r.certified);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_LE(certificate_residual(inner, outer, *r.certificate), 1e-9);
  EXPECT_NEAR(r.norm, 0.7, 1e-9);

  const Zonotope too_big(Vector::Zero(2), 1.5 * Matrix::Identity(2, 2));
  EXPECT_FALSE(zonotope_containment(too_big, outer).certified);
}

TEST(Containment, CertifiedImpliesVertexContainment) {
  // sufficient test: whenever it certifies, all vertices of inner are in outer
  Rng rng(29);
  std::normal_distribution<double> n;
  int certified = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Matrix go(2, 3);
    for (Index i = 0; i < go.size(); ++i) go(i) = n(rng);
    const Zonotope outer(Vector::Zero(2), go);
    Matrix gi(2, 2);
    for (Index i = 0; i < gi.size(); ++i) gi(i) = 0.3 * n(rng);
    const Zonotope inner(Vector{{0.2 * n(rng), 0.2 * n(rng)}}, gi);
    const ContainmentResult r = zonotope_containment(inner, outer);
    if (!r.certified) continue;
    ++certified;
    const auto poly = oracle::zonotope_polygon(outer.center(), outer.generators());
    for (const Vector& v : oracle::sign_points(inner.center(), inner.generators()))
      EXPECT_GE(oracle::polygon_margin(poly, v), -1e-9);
  }
  EXPECT_GT(certified, 20);
}

TEST(Containment, ExactForParallelotopeOuter) {
  // square invertible outer: the certificate is unique, so the test is exact
  Rng rng(31);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 200; ++trial) {
    Matrix go(2, 2);
    for (Index i = 0; i < go.size(); ++i) go(i) = n(rng);
    if (std::abs(go.determinant()) < 0.2) continue;
    const Zonotope outer(Vector::Zero(2), go);
    Matrix gi(2, 2);
    for (Index i = 0; i < gi.size(); ++i) gi(i) = 0.4 * n(rng);
    const Zonotope inner(Vector{{0.3 * n(rng), 0.3 * n(rng)}}, gi);
    const auto poly = oracle::zonotope_polygon(outer.center(), outer.generators());
    double worst = 1e300;
    for (const Vector& v : oracle::sign_points(inner.center(), inner.generators()))
      worst = std::min(worst, oracle::polygon_margin(poly, v));
    if (std::abs(worst) < 1e-6) continue;
    EXPECT_EQ(zonotope_containment(inner, outer).certified, worst > 0.0);
  }
}

namespace {

// grid search of Σ log p over the Seeker box case constraints
Vector seeker_box_grid_optimum() {
  // p1+p2+p3 <= 1, p1+p2+p4 <= 1 (from |G̃ diag p| row sums)
  double best = -1e300;
  Vector arg(4);
  const int steps = 200;
  for (int i = 1; i < steps; ++i)
    for (int j = 1; i + j < steps; ++j) {
      const double p1 = static_cast<double>(i) / steps;
      const double p2 = static_cast<double>(j) / steps;
      const double rest = 1.0 - p1 - p2;
      const double v = std::log(p1) + std::log(p2) + 2.0 * std::log(rest);
      if (v > best) {
        best = v;
        arg << p1, p2, rest, rest;
      }
    }
  return arg;
}

}  // namespace

TEST(ScalingProgram, SeekerBoxCaseMatchesGridSearch) {
  ScalingProgram program(seeker_template());
  program.fix_center(Vector::Zero(2));
  add_containment(program, program.relevant_set(),
                  Zonotope::from_box(IntervalBox(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0))));
  const ScalingSolution sol = solve_geometric_mean(program);
  ASSERT_TRUE(sol.optimal());
  const Vector grid = seeker_box_grid_optimum();
  EXPECT_LT((sol.scalings - grid).cwiseAbs().maxCoeff(), 1e-2);
  EXPECT_LT((sol.scalings - Vector{{0.25, 0.25, 0.5, 0.5}}).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_LT(sol.kkt_residual, 1e-6);
}

TEST(ScalingProgram, ObjectiveHistoryIsMonotone) {
  ScalingProgram program(seeker_template());
  program.fix_center(Vector::Zero(2));
  add_containment(program, program.relevant_set(),
                  Zonotope::from_box(IntervalBox(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0))));
  const ScalingSolution sol = solve_geometric_mean(program);
  ASSERT_GE(sol.objective_history.size(), 2u);
  for (size_t i = 1; i < sol.objective_history.size(); ++i)
    EXPECT_GE(sol.objective_history[i], sol.objective_history[i - 1] - 1e-9);
}

TEST(ScalingProgram, SingleScalingCap) {
  ScalingProgram program(Matrix::Identity(1, 1));
  program.fix_center(Vector::Zero(1));
  Vector row = Vector::Zero(program.num_variables());
  row(program.scaling_offset()) = 1.0;
  program.add_inequality(row, 0.7);
  const ScalingSolution sol = solve_geometric_mean(program);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.scalings(0), 0.7, 1e-6);
}

TEST(ScalingProgram, RandomTwoGeneratorProgramsMatchGridSearch) {
  Rng rng(37);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    // a1 p1 + b1 p2 <= 1, a2 p1 + b2 p2 <= 1 with positive coefficients
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
    ScalingProgram program(Matrix::Identity(2, 2));
    program.fix_center(Vector::Zero(2));
    Vector r1 = Vector::Zero(program.num_variables());
    r1(2) = a1;
    r1(3) = b1;
    Vector r2 = Vector::Zero(program.num_variables());
    r2(2) = a2;
    r2(3) = b2;
    program.add_inequality(r1, 1.0);
    program.add_inequality(r2, 1.0);
    const ScalingSolution sol = solve_geometric_mean(program);
    ASSERT_TRUE(sol.optimal());

    double best = -1e300;
    Vector arg(2);
    const int n = 2000;
    const double hi1 = std::min(1.0 / a1, 1.0 / a2);
    for (int i = 1; i < n; ++i) {
      const double p1 = hi1 * i / n;
      const double p2 = std::min((1.0 - a1 * p1) / b1, (1.0 - a2 * p1) / b2);
      if (p2 <= 0.0) continue;
      const double v = std::log(p1) + std::log(p2);
      if (v > best) {
        best = v;
        arg << p1, p2;
      }
    }
    EXPECT_LT((sol.scalings - arg).cwiseAbs().maxCoeff(), 1e-3) << "trial " << trial;
  }
}

TEST(ScalingProgram, RowPermutationInvariance) {
  ScalingProgram program(seeker_template());
  program.fix_center(Vector::Zero(2));
  add_containment(program, program.relevant_set(),
                  Zonotope::from_box(IntervalBox(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0))));
  std::vector<Index> order(static_cast<size_t>(program.ineq_matrix().rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::reverse(order.begin(), order.end());
  const ScalingSolution a = solve_geometric_mean(program);
  const ScalingSolution b = solve_geometric_mean(program.permuted(order));
  EXPECT_LT((a.scalings - b.scalings).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ScalingProgram, InfeasibleIsReported) {
  ScalingProgram program(Matrix::Identity(1, 1));
  program.fix_center(Vector::Zero(1));
  Vector row = Vector::Zero(program.num_variables());
  row(program.scaling_offset()) = 1.0;
  program.add_inequality(row, -1.0);
  EXPECT_EQ(solve_geometric_mean(program).status, ScalingStatus::infeasible);
}

TEST(ScalingProgram, LiftedContainmentIsSound) {
  // non-square outer forces the lifted certificate
  ScalingProgram program(seeker_template());
  const Zonotope outer(Vector::Zero(2), Matrix{{1.0, 0.5, 0.0}, {0.0, 0.5, 1.0}});
  add_containment(program, program.relevant_set(), outer);
  const ScalingSolution sol = solve_geometric_mean(program);
  ASSERT_TRUE(sol.optimal());
  const Zonotope z = sol.zonotope(seeker_template());
  const auto poly = oracle::zonotope_polygon(outer.center(), outer.generators());
  for (const Vector& v : oracle::sign_points(z.center(), z.generators()))
    EXPECT_GE(oracle::polygon_margin(poly, v), -1e-7);
}

TEST(ScalingProgram, SupportBoundHolds) {
  ScalingProgram program(seeker_template());
  program.fix_center(Vector::Zero(2));
  add_containment(program, program.relevant_set(),
                  Zonotope::from_box(IntervalBox(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0))));
  const Vector dir{{1.0, 0.0}};
  add_support_bound(program, program.relevant_set(), dir, 0.5);
  const ScalingSolution sol = solve_geometric_mean(program);
  ASSERT_TRUE(sol.optimal());
  EXPECT_LE(support_function(sol.zonotope(seeker_template()), dir), 0.5 + 1e-7);
}

TEST(ScalingProgram, MaxSlackPointRecentersFixedScalings) {
  ScalingProgram program(Matrix::Identity(1, 1));
  // c + p <= 1, -(c - p) <= 1  with p pinned to 0.5 → slack maximized at c = 0
  Vector r1 = Vector::Zero(program.num_variables());
  r1(0) = 1.0;
  r1(1) = 1.0;
  Vector r2 = Vector::Zero(program.num_variables());
  r2(0) = -1.0;
  r2(1) = 1.0;
  program.add_inequality(r1, 1.0);
  program.add_inequality(r2, 1.0);
  const auto sp = max_slack_point(program, Vector{{0.5}});
  ASSERT_TRUE(sp.has_value());
  EXPECT_NEAR(sp->variables(0), 0.0, 1e-9);
  EXPECT_NEAR(sp->slack, 0.5, 1e-9);
}
