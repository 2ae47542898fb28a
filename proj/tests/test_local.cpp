#include <gtest/gtest.h>

#include "oracles.hpp"
#include "riskplan/local_planner.hpp"

using namespace riskplan;

namespace {

ReferencePath straight(double length) { return build_reference(std::vector<Vec2>{{0, 0}, {length, 0}}, 0.5); }

FrenetState cruising(double s, double v) {
  FrenetState st;
  st.s = s;
  st.s_d = v;
  return st;
}

std::vector<double> approx(std::vector<double> v) {
  for (auto& x : v) x = std::round(x * 1e9) / 1e9;
  return v;
}

const CandidateTrajectory& by_terminal(const std::vector<CandidateTrajectory>& cands, const FrenetState& target) {
  for (const auto& c : cands)
    if (std::abs(c.terminal.t - target.t) < 1e-9 && std::abs(c.terminal.d) < 1e-12 &&
        std::abs(c.terminal.s - target.s) < 1e-9)
      return c;
  throw std::runtime_error("no candidate at the reference target");
}

}  // namespace

TEST(SampleAxis, DocumentedRows) {
  EXPECT_EQ(sample_axis(-3, 1, 5, 0, 0), (std::vector<double>{1}));
  EXPECT_EQ(approx(sample_axis(-7, 0, 7, 4, 4)), (std::vector<double>{-7, -5.25, -3.5, -1.75, 0, 1.75, 3.5, 5.25, 7}));
  EXPECT_EQ(approx(sample_axis(3, 5, 7, 2, 2)), (std::vector<double>{3, 4, 5, 6, 7}));
  EXPECT_THROW(sample_axis(2, 1, 1, 1, 1), Error);
}

TEST(SampleAxis, OptionTwoCounts) {
  const auto s = SamplingSpec::option2();
  EXPECT_EQ(sample_axis(s.d_min, 0, s.d_max, s.d_lower, s.d_upper).size(), 15u);
  EXPECT_EQ(sample_axis(0.8, 1, 1.2, s.s_lower, s.s_upper).size(), 9u);
  EXPECT_EQ(sample_axis(s.t_min, s.t_ref, s.t_max, s.t_lower, s.t_upper).size(), 7u);
}

TEST(GenerateCandidates, OpenSpaceCardinality) {
  const auto ref = straight(400);
  const auto o1 = generate_candidates(ref, cruising(10, kmh_to_ms(25)), SamplingSpec::option1());
  EXPECT_EQ(o1.candidates.size(), 315u);
  EXPECT_EQ(o1.dropped, 0u);
  const auto o2 = generate_candidates(ref, cruising(10, kmh_to_ms(25)), SamplingSpec::option2());
  EXPECT_EQ(o2.candidates.size(), 945u);
  for (std::size_t i = 0; i < o1.candidates.size(); ++i) {
    EXPECT_EQ(o1.candidates[i].id, i);
    EXPECT_EQ(o1.candidates[i].points.size(), static_cast<std::size_t>(std::floor(o1.candidates[i].duration / 0.25)) + 1);
  }
}

TEST(GenerateCandidates, DropsCandidatesPastTheReference) {
  const auto ref = straight(40);
  const auto set = generate_candidates(ref, cruising(10, kmh_to_ms(25)), SamplingSpec::option1());
  EXPECT_GT(set.dropped, 0u);
  EXPECT_EQ(set.candidates.size() + set.dropped, 315u);
}

TEST(GenerateCandidates, QuinticsReproduceBoundaryStates) {
  const auto ref = straight(400);
  FrenetState cur = cruising(12, 5);
  cur.d = 0.7;
  cur.d_d = -0.3;
  cur.d_dd = 0.1;
  cur.s_dd = 0.4;
  const auto set = generate_candidates(ref, cur, SamplingSpec::option1());
  for (const auto& c : set.candidates) {
    const double T = c.duration;
    EXPECT_NEAR(c.lateral.value(0), cur.d, 1e-9);
    EXPECT_NEAR(c.lateral.d1(0), cur.d_d, 1e-9);
    EXPECT_NEAR(c.lateral.d2(0), cur.d_dd, 1e-9);
    EXPECT_NEAR(c.lateral.value(T), c.terminal.d, 1e-9);
    EXPECT_NEAR(c.lateral.d1(T), 0, 1e-9);
    EXPECT_NEAR(c.longitudinal.value(0), cur.s, 1e-9);
    EXPECT_NEAR(c.longitudinal.d1(0), cur.s_d, 1e-9);
    EXPECT_NEAR(c.longitudinal.value(T), c.terminal.s, 1e-9);
    EXPECT_NEAR(c.longitudinal.d1(T), c.terminal.s_d, 1e-9);
    EXPECT_NEAR(c.longitudinal.d2(T), 0, 1e-9);
  }
}

TEST(Annotate, StraightConstantSpeed) {
  const auto ref = straight(400);
  const double v = kmh_to_ms(25);
  auto set = generate_candidates(ref, cruising(10, v), SamplingSpec::option1());
  auto c = by_terminal(set.candidates, set.target);
  annotate_kinematics(c, ref, 0.25);
  for (const auto& p : c.points) {
    EXPECT_NEAR(p.c, 0, 1e-12);
    EXPECT_NEAR(p.a_x, 0, 1e-9);
    EXPECT_NEAR(p.a_y, 0, 1e-9);
    EXPECT_NEAR(p.v, v, 1e-9);
  }
}

TEST(Annotate, LateralAccelerationOnACircle) {
  // Ten meters per second around a 100 m circle.
  const auto ref = straight(400);
  CandidateTrajectory c;
  const double R = 100, v = 10, dt = 0.25;
  for (int i = 0; i <= 20; ++i) {
    TrajectoryPoint p;
    const double a = v * dt * i / R;
    p.t = dt * i;
    p.x = R * std::sin(a);
    p.y = R * (1 - std::cos(a));
    p.s = 10;
    p.s_d = v;
    c.points.push_back(p);
  }
  annotate_kinematics(c, ref, dt);
  for (std::size_t i = 0; i + 2 < c.points.size(); ++i) {
    EXPECT_NEAR(c.points[i].c, 0.01, 1e-6);
    EXPECT_NEAR(c.points[i].a_x, 1.0, 1e-4);
  }
}

TEST(Annotate, MatchesIndependentRecomputation) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 5; ++k) {
    const auto pc = oracle::random_planning_case(rng);
    auto set = generate_candidates(pc.ref, pc.current, SamplingSpec::option1());
    for (auto& c : set.candidates) {
      annotate_kinematics(c, pc.ref, 0.25);
      const auto kin = oracle::recompute_kinematics(c, pc.ref, 0.25);
      for (std::size_t i = 0; i < c.points.size(); ++i) {
        ASSERT_NEAR(c.points[i].c, kin.c[i], 1e-9);
        ASSERT_NEAR(c.points[i].v, kin.v[i], 1e-9);
        ASSERT_NEAR(c.points[i].a_y, kin.a_y[i], 1e-6);
        if (i + 1 < c.points.size()) {
          ASSERT_NEAR(c.points[i].a_y, (c.points[i + 1].v - c.points[i].v) / 0.25, 1e-3);
        }
      }
    }
  }
}

TEST(CheckConstraints, StationaryCandidateIsFeasible) {
  const auto ref = straight(50);
  CandidateTrajectory c;
  for (int i = 0; i <= 20; ++i) {
    TrajectoryPoint p;
    p.t = 0.25 * i;
    p.x = 5;
    p.s = 5;
    c.points.push_back(p);
  }
  annotate_kinematics(c, ref, 0.25);
  check_constraints(c, ConstraintSpec{}, {}, FieldWeights{});
  EXPECT_TRUE(c.feasible);
  EXPECT_FALSE(c.violation.has_value());
}

TEST(CheckConstraints, SaturatedObstacleRejectsOnSafety) {
  const auto ref = straight(400);
  auto set = generate_candidates(ref, cruising(10, kmh_to_ms(25)), SamplingSpec::option1());
  auto c = by_terminal(set.candidates, set.target);
  annotate_kinematics(c, ref, 0.25);
  ObstacleState o;
  o.position = {25, 0};
  o.K = 20;
  o.r_min = 2;
  o.r_max = 15;
  std::vector<ObstacleState> obs{o};
  check_constraints(c, ConstraintSpec{}, obs, FieldWeights{});
  EXPECT_FALSE(c.feasible);
  ASSERT_TRUE(c.violation.has_value());
  EXPECT_EQ(*c.violation, Constraint::kSafety);
  EXPECT_GT(c.points[c.violation_point].e, 10.0);
  const auto v = oracle::rescan(c, ConstraintSpec{}, obs, FieldWeights{});
  EXPECT_EQ(v.first, c.violation);
  EXPECT_EQ(v.first_point, c.violation_point);
}

TEST(EvaluateCost, ZeroWhenOnTarget) {
  const auto ref = straight(400);
  auto set = generate_candidates(ref, cruising(10, kmh_to_ms(25)), SamplingSpec::option1());
  auto c = by_terminal(set.candidates, set.target);
  annotate_kinematics(c, ref, 0.25);
  check_constraints(c, ConstraintSpec{}, {}, FieldWeights{});
  const auto cb = evaluate_cost(c, CostWeights{}, set.target, set.target);
  EXPECT_NEAR(cb.total, 0.0, 1e-9);
}

TEST(EvaluateCost, TerminalDeviationWeights) {
  CandidateTrajectory c;
  c.points.resize(1);
  FrenetState target;
  target.t = 5;
  target.s = 40;
  c.terminal = target;
  c.terminal.d = 1;
  c.terminal.s = 42;
  const auto cb = evaluate_cost(c, CostWeights{}, target, std::nullopt);
  EXPECT_DOUBLE_EQ(cb.j_t, 92.0);
  EXPECT_EQ(cb.j_c, 0.0);
  const auto with_prev = evaluate_cost(c, CostWeights{}, target, target);
  EXPECT_DOUBLE_EQ(with_prev.j_c, 1.5 * 1 + 0.2 * 4);
}

TEST(PlanStep, EmptyFieldPicksReferenceTarget) {
  LocalPlanner planner(straight(400), LocalPlannerConfig{});
  const auto res = planner.plan_step(cruising(10, kmh_to_ms(25)), {});
  EXPECT_NEAR(res.best.terminal.t, res.target.t, 1e-12);
  EXPECT_NEAR(res.best.terminal.s, res.target.s, 1e-9);
  EXPECT_EQ(res.best.terminal.d, 0.0);
  EXPECT_NEAR(res.best.cost.j_t, 0.0, 1e-12);
  EXPECT_EQ(res.best.cost.j_e, 0.0);
  for (const auto& c : res.candidates)
    if (c.feasible) {
      EXPECT_EQ(c.cost.j_c, 0.0);
    }
  ASSERT_TRUE(planner.previous_terminal().has_value());
  EXPECT_EQ(planner.previous_terminal()->s, res.best.terminal.s);
}

TEST(PlanStep, NoFeasibleTrajectoryCarriesCounts) {
  LocalPlanner planner(straight(400), LocalPlannerConfig{});
  ObstacleState o;
  o.position = {12, 0};
  o.K = 1000;
  o.r_min = 30;
  o.r_max = 60;
  try {
    planner.plan_step(cruising(10, kmh_to_ms(25)), std::vector<ObstacleState>{o});
    FAIL();
  } catch (const NoFeasibleTrajectory& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoFeasibleTrajectory);
    std::size_t total = 0;
    for (auto n : e.rejections()) total += n;
    EXPECT_EQ(total, 315u);
    EXPECT_GT(e.rejections()[static_cast<std::size_t>(Constraint::kSafety)], 200u);
  }
}

TEST(PlanStep, VerdictsAndWinnerMatchOracles) {
  const auto a = oracle::audit_planning_steps(99, 20);
  EXPECT_EQ(a.steps, 20u);
  EXPECT_GT(a.rejected, 0u);
  EXPECT_EQ(a.verdict_mismatches, 0u);
  EXPECT_EQ(a.rejected_without_point, 0u);
  EXPECT_EQ(a.kinematic_mismatches, 0u);
  EXPECT_EQ(a.winner_mismatches, 0u);
}

TEST(PlanStep, ParallelMatchesSerial) {
  std::mt19937_64 rng(5);
  const auto pc = oracle::random_planning_case(rng);
  LocalPlannerConfig serial, par;
  par.threads = 4;
  LocalPlanner a(pc.ref, serial), b(pc.ref, par);
  try {
    const auto ra = a.plan_step(pc.current, pc.obstacles);
    const auto rb = b.plan_step(pc.current, pc.obstacles);
    EXPECT_EQ(ra.best.id, rb.best.id);
    EXPECT_EQ(ra.best.cost.total, rb.best.cost.total);
  } catch (const NoFeasibleTrajectory&) {
    EXPECT_THROW(b.plan_step(pc.current, pc.obstacles), NoFeasibleTrajectory);
  }
}

TEST(PlanStep, ConsistencyWeightNeverIncreasesTerminalJump) {
  std::mt19937_64 rng(17);
  int compared = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto pc = oracle::random_planning_case(rng);
    const StateWeights base = CostWeights{}.w_c;
    double last = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double scale : {0.0, 0.5, 1.0, 2.0, 5.0, 20.0}) {
      LocalPlannerConfig cfg;
      for (std::size_t k = 0; k < 7; ++k) cfg.weights.w_c[k] = scale * base[k];
      LocalPlanner planner(pc.ref, cfg);
      FrenetState st = pc.current;
      try {
        const auto first = planner.plan_step(st, pc.obstacles);
        st.t += 0.25;
        st.s = first.best.longitudinal.value(0.25);
        st.s_d = first.best.longitudinal.d1(0.25);
        st.d = first.best.lateral.value(0.25);
        st.d_d = first.best.lateral.d1(0.25);
        const auto second = planner.plan_step(st, pc.obstacles);
        const double jump = oracle::quad_form(second.best.terminal, first.best.terminal, base);
        EXPECT_LE(jump, last + 1e-9) << "trial " << trial << " scale " << scale;
        last = jump;
      } catch (const NoFeasibleTrajectory&) {
        ok = false;
        break;
      }
    }
    compared += ok ? 1 : 0;
  }
  EXPECT_GT(compared, 0);
}
