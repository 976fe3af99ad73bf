#include "oracles.hpp"

#include <maskrl/envs/quadrotor.hpp>
#include <maskrl/envs/seeker.hpp>
#include <maskrl/relevant/linearize.hpp>
#include <maskrl/relevant/providers.hpp>

#include <gtest/gtest.h>

using namespace maskrl;

namespace {

SeekerRequest seeker_request(const Vector& agent, const Vector& obstacle, double radius) {
  SeekerRequest req;
  req.agent = agent;
  req.obstacle = obstacle;
  req.obstacle_radius = radius;
  req.template_generators = seeker_template();
  return req;
}

}  // namespace

TEST(Linearize, MatrixExponentialOfDiagonalAndRotation) {
  const Matrix d = Vector{{1.0, -2.0}}.asDiagonal();
  const Matrix e = matrix_exponential(d);
  EXPECT_NEAR(e(0, 0), std::exp(1.0), 1e-13);
  EXPECT_NEAR(e(1, 1), std::exp(-2.0), 1e-13);
  Matrix r(2, 2);
  r << 0, -1, 1, 0;
  const Matrix er = matrix_exponential(3.0 * r);
  EXPECT_NEAR(er(0, 0), std::cos(3.0), 1e-12);
  EXPECT_NEAR(er(1, 0), std::sin(3.0), 1e-12);
}

TEST(Linearize, SeekerIsExact) {
  SeekerDynamics m;
  const LinearizedStep lin =
      linearize_step(m, Vector{{1.0, 2.0}}, Vector::Zero(2), 1.0, Zonotope::point(Vector::Zero(0)), 0.0);
  EXPECT_TRUE(lin.a_d.isApprox(Matrix::Identity(2, 2)));
  EXPECT_TRUE(lin.b_d.isApprox(Matrix::Identity(2, 2)));
  EXPECT_LT(lin.w_prime.center().norm(), 1e-14);
}

TEST(Linearize, AffineModelReproducesTheFlowNearTheOperatingPoint) {
  Quad2dDynamics m;
  Vector s{{0.1, 1.0, 0.1, -0.1, 0.05, 0.1}};
  const Vector a = quad2d_action_box().center();
  const LinearizedStep lin = linearize_step(m, s, a, 0.1, quad2d_disturbance_set(), 0.0);
  const Vector pred = lin.a_d * s + lin.b_d * a + lin.w_prime.center();
  Vector truth = s;
  for (int i = 0; i < 200; ++i) truth = rk4_step(m, truth, a, Vector::Zero(2), 0.1 / 200);
  EXPECT_LT((pred - truth).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(SeekerRelevantSet, FreeSpaceIsTheTemplateOptimum) {
  SeekerRequest req = seeker_request(Vector::Zero(2), Vector{{8.0, 8.0}}, 1.0);
  const RelevantSetResult r = seeker_relevant_set(req);
  ASSERT_EQ(r.source, RelevantSetSource::optimal);
  EXPECT_LT((r.scalings - Vector{{0.25, 0.25, 0.5, 0.5}}).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(SeekerRelevantSet, EveryVertexIsSafe) {
  // vertices of A^r are the extreme actions; the next state must avoid the disk and stay in bounds
  Rng rng(7);
  SeekerEnv env;
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    env.reset(rng);
    SeekerRequest req = seeker_request(env.state(), env.obstacle(), env.obstacle_radius());
    const RelevantSetResult r = seeker_relevant_set(req);
    if (r.fallback) continue;
    ++checked;
    const auto poly = oracle::zonotope_polygon(r.set.center(), r.set.generators());
    for (const Vector& v : poly) {
      EXPECT_LE(v.cwiseAbs().maxCoeff(), 1.0 + 1e-7);
      const Vector next = env.state() + v;
      EXPECT_GE((next - env.obstacle()).norm(), env.obstacle_radius() - 1e-7);
      EXPECT_LE(next.cwiseAbs().maxCoeff(), 10.0 + 1e-7);
    }
  }
  EXPECT_GT(checked, 250);
}

TEST(SeekerRelevantSet, NextToTheObstacleShrinks) {
  SeekerRequest near = seeker_request(Vector::Zero(2), Vector{{1.5, 0.0}}, 1.0);
  SeekerRequest far = seeker_request(Vector::Zero(2), Vector{{8.0, 0.0}}, 1.0);
  const RelevantSetResult rn = seeker_relevant_set(near);
  const RelevantSetResult rf = seeker_relevant_set(far);
  EXPECT_LT(rn.scalings.prod(), rf.scalings.prod());
  EXPECT_LE(support_function(rn.set, Vector{{1.0, 0.0}}), 0.5 + 1e-7);
}

TEST(SeekerRelevantSet, InsideTheObstacleIsAnError) {
  SeekerRequest req = seeker_request(Vector::Zero(2), Vector{{0.5, 0.0}}, 1.0);
  EXPECT_THROW(seeker_relevant_set(req), std::domain_error);
}

TEST(SeekerRelevantSet, InfeasibleFallsBackToPreviousScalings) {
  // next state must lie in [-8.5, 8.5]^2, one unit step cannot get there from the corner
  SeekerRequest req = seeker_request(Vector{{9.99, 9.99}}, Vector{{-5.0, -5.0}}, 1.0);
  req.margin = 1.5;
  req.previous_scalings = Vector::Constant(4, 0.01);
  const RelevantSetResult r = seeker_relevant_set(req);
  EXPECT_TRUE(r.fallback);
  EXPECT_NE(r.source, RelevantSetSource::optimal);
  EXPECT_FALSE(r.certified);
}

TEST(TemplateRelevantSet, ReachableSetStaysInRelevantStates) {
  for (EnvKind kind : {EnvKind::quad2d, EnvKind::quad3d}) {
    TemplateProvider provider(kind);
    auto env = make_environment(kind);
    Rng rng(3);
    int optimal = 0;
    for (int trial = 0; trial < 40; ++trial) {
      env->reset(rng);
      provider.reset();
      const RelevantSetResult r = provider.compute(*env);
      // A^r ⊆ A always
      const IntervalBox hull = interval_hull(r.set);
      EXPECT_TRUE(((hull.lower() - env->action_box().lower()).array() >= -1e-7).all());
      EXPECT_TRUE(((env->action_box().upper() - hull.upper()).array() >= -1e-7).all());
      if (r.source != RelevantSetSource::optimal) continue;
      ++optimal;
      // linearized successor of every vertex action lies in S^r
      const auto& q = dynamic_cast<QuadrotorEnv&>(*env);
      const LinearizedStep lin = linearize_step(env->dynamics(), env->state(), env->action_box().center(), env->dt(),
                                                q.disturbance_set(), provider.eps_lin());
      const Zonotope& sr = provider.relevant_states();
      const IntervalBox sr_hull = interval_hull(sr);
      for (int k = 0; k < 16; ++k) {
        Vector beta(r.set.num_generators());
        for (Index j = 0; j < beta.size(); ++j) beta(j) = ((k >> (j % 4)) & 1) ? 1.0 : -1.0;
        const Vector a = r.set.center() + r.set.generators() * beta;
        const Vector next = lin.a_d * env->state() + lin.b_d * a + lin.w_prime.center();
        EXPECT_TRUE(((next - sr_hull.lower()).array() >= -1e-6).all());
        EXPECT_TRUE(((sr_hull.upper() - next).array() >= -1e-6).all());
      }
    }
    EXPECT_GT(optimal, 10) << to_string(kind);
  }
}

TEST(Providers, StaticAndFullActionProviders) {
  auto env = make_environment(EnvKind::seeker);
  auto full = make_full_action_provider(*env);
  const RelevantSetResult r = full->compute(*env);
  EXPECT_FALSE(r.fallback);
  EXPECT_TRUE(r.set.center().isZero());
  EXPECT_TRUE(r.set.generators().isApprox(Matrix::Identity(2, 2)));
}

TEST(Providers, StaticNormBallSet) {
  const Zonotope z = static_norm_ball_set(1.0, 6, 12);
  EXPECT_EQ(z.dim(), 6);
  double worst = 0.0;
  for (const Vector& v : oracle::sign_points(z.center(), z.generators())) worst = std::max(worst, v.norm());
  EXPECT_LE(worst, 1.0 + 1e-12);
}

TEST(Providers, ValidationCountsFeasibleStates) {
  TemplateProvider provider(EnvKind::quad2d);
  auto env = make_environment(EnvKind::quad2d);
  Rng rng(5);
  const StateSetValidation v = validate_relevant_states(provider, *env, 50, rng);
  EXPECT_EQ(v.samples, 50);
  EXPECT_GT(v.feasible, 0);
  EXPECT_LE(v.feasible, 50);
}
