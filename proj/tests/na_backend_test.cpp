#include <gtest/gtest.h>

#include <random>

#include "nazx/na_backend.hpp"
#include "nazx/oracle.hpp"
#include "test_support.hpp"

namespace nazx {
namespace {

Mat2 random_unitary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  Euler e{ang(rng), std::abs(ang(rng)), ang(rng)};
  return expi(ang(rng)) * euler_matrix(e);
}

/// min over global phase of the max-entry distance between a and b
double projective_residual(const Mat2& a, const Mat2& b) {
  Eigen::Index i = 0, j = 0;
  b.cwiseAbs().maxCoeff(&i, &j);
  const cplx c = a(i, j) / b(i, j);
  return (a - (c / std::abs(c)) * b).cwiseAbs().maxCoeff();
}

TEST(Euler, RoundTripsRandomAndSpecialMatrices) {
  std::mt19937_64 rng(1);
  std::vector<Mat2> cases;
  for (int i = 0; i < 200; ++i) cases.push_back(random_unitary(rng));
  for (auto k : {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::S, GateKind::T}) {
    cases.push_back(single_qubit_matrix(k));
  }
  cases.push_back(Mat2::Identity());
  for (const auto& u : cases) {
    const Euler e = zyz_decompose(u);
    EXPECT_GE(e.theta, 0.0);
    EXPECT_LE(e.theta, M_PI);
    EXPECT_LT(projective_residual(euler_matrix(e), u), 1e-10);
  }
  EXPECT_NEAR(zyz_decompose(single_qubit_matrix(GateKind::H)).theta, M_PI / 2, 1e-12);
  EXPECT_EQ(zyz_decompose(single_qubit_matrix(GateKind::X)).beta, 0.0);
}

TEST(Layerize, HadamardSandwich) {
  Circuit c(2);
  c.add(Gate::h(0)).add(Gate::ncp({0, 1}, Phase::pi())).add(Gate::h(0));
  auto lc = layerize(c);
  ASSERT_EQ(lc.singles.size(), 2u);
  ASSERT_EQ(lc.multis.size(), 1u);
  EXPECT_EQ(lc.singles[0].size(), 1u);
  EXPECT_TRUE(lc.singles[0].at(0).isApprox(single_qubit_matrix(GateKind::H)));
  EXPECT_EQ(lc.multis[0], (std::vector<Gate>{Gate::ncp({0, 1}, Phase::pi())}));
  EXPECT_TRUE(lc.singles[1].at(0).isApprox(single_qubit_matrix(GateKind::H)));
}

TEST(Layerize, EmptyCircuit) {
  EXPECT_TRUE(layerize(Circuit(3)).empty());
  auto s = schedule(Circuit(3));
  EXPECT_TRUE(s.ops.empty());
  EXPECT_EQ(s.total_time, 0.0);
}

TEST(Layerize, CommutingControlledPhasesShareALayer) {
  Circuit c(3);
  c.add(Gate::cz(0, 1)).add(Gate::ncp({1, 2}, Phase(1, 4))).add(Gate::cx(0, 2));
  auto lc = layerize(c);
  // cx(0,2) = H(2) cz H(2): the H on qubit 2 closes the first multi layer
  ASSERT_EQ(lc.multis.size(), 2u);
  EXPECT_EQ(lc.multis[0].size(), 2u);
  EXPECT_TRUE(equal_up_to_scalar(layered_unitary(lc), circuit_unitary(c), 1e-12));
}

TEST(Layerize, RandomCircuitsKeepUnitary) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    Circuit c = testkit::random_circuit(rng, 1 + trial % 6, 30);
    auto lc = layerize(c);
    if (!lc.empty()) {
      EXPECT_EQ(lc.singles.size(), lc.multis.size() + 1);
    }
    EXPECT_TRUE(equal_up_to_scalar(layered_unitary(lc), circuit_unitary(c), 1e-10));
  }
}

TEST(GreedyAssign, SmallAngleJoinsCoveringLayer) {
  Circuit c(4);
  c.add(Gate::h(0)).add(Gate::cz(0, 1)).add(Gate::rz(0, Phase(1, 3)));
  c.add(Gate::cz(0, 1)).add(Gate::h(0));
  c.add(Gate::cz(2, 3)).add(Gate::ry(2, Phase(1, 4)));
  auto lc = layerize(c);
  ASSERT_EQ(lc.singles.size(), 3u);
  ASSERT_TRUE(lc.singles[1].count(2));
  EXPECT_NEAR(sum_theta_max(lc), M_PI + M_PI / 4, 1e-12);
  auto g = greedy_assign(lc);
  EXPECT_TRUE(g.singles[2].count(2));
  EXPECT_NEAR(theta_max(g.singles[2]), M_PI / 2, 1e-12);
  EXPECT_NEAR(sum_theta_max(g), M_PI, 1e-12);
  EXPECT_TRUE(equal_up_to_scalar(layered_unitary(g), circuit_unitary(c), 1e-12));
}

TEST(GreedyAssign, SingleLayerUnchanged) {
  Circuit c(2);
  c.add(Gate::h(0)).add(Gate::ry(1, Phase(1, 3)));
  auto lc = layerize(c);
  auto g = greedy_assign(lc);
  ASSERT_EQ(g.singles.size(), 1u);
  EXPECT_TRUE(g.singles[0].at(0).isApprox(lc.singles[0].at(0)));
  EXPECT_TRUE(g.singles[0].at(1).isApprox(lc.singles[0].at(1)));
}

TEST(GreedyAssign, NeverIncreasesTotalAndKeepsUnitary) {
  std::mt19937_64 rng(3);
  int improved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Circuit c = testkit::random_circuit(rng, 2 + trial % 6, 40);
    auto lc = layerize(c);
    auto g = greedy_assign(lc);
    const double before = sum_theta_max(lc), after = sum_theta_max(g);
    EXPECT_LE(after, before + 1e-12);
    if (after < before - 1e-9) ++improved;
    EXPECT_TRUE(equal_up_to_scalar(layered_unitary(g), circuit_unitary(c), 1e-10));
  }
  EXPECT_GT(improved, 10);
}

TEST(Transversal, RyAndIdle) {
  SingleLayer l{{0, single_qubit_matrix(GateKind::Ry, Phase(1, 2))}};
  auto ops = transversal_decompose(l, 2);
  int gr = 0;
  for (const auto& op : ops) {
    if (const auto* g = std::get_if<GrOp>(&op)) {
      ++gr;
      EXPECT_NEAR(g->theta, M_PI / 4, 1e-15);
    }
  }
  EXPECT_EQ(gr, 2);
  // the middle Rz layer gives the idle qubit b = pi
  ASSERT_TRUE(std::holds_alternative<RzLayerOp>(ops[2]));
  EXPECT_NEAR(std::get<RzLayerOp>(ops[2]).angles.at(1), M_PI, 1e-12);
  EXPECT_LT(projective_residual(qubit_product(ops, 0), l.at(0)), 1e-9);
  EXPECT_LT(projective_residual(qubit_product(ops, 1), Mat2::Identity()), 1e-12);
}

TEST(Transversal, HadamardUsesQuarterPulses) {
  const Mat2 h = single_qubit_matrix(GateKind::H);
  auto ops = transversal_decompose({{0, h}}, 1);
  double gr = 0;
  for (const auto& op : ops) {
    if (const auto* g = std::get_if<GrOp>(&op)) gr += g->theta;
  }
  EXPECT_NEAR(gr, M_PI / 2, 1e-15);
  EXPECT_LT(projective_residual(qubit_product(ops, 0), h), 1e-9);
}

TEST(Transversal, DiagonalLayerIsOneRzLayer) {
  SingleLayer l{{0, single_qubit_matrix(GateKind::T)}, {2, single_qubit_matrix(GateKind::Z)}};
  auto ops = transversal_decompose(l, 3);
  ASSERT_EQ(ops.size(), 1u);
  const auto& r = std::get<RzLayerOp>(ops[0]);
  EXPECT_NEAR(r.angles.at(0), M_PI / 4, 1e-12);
  EXPECT_NEAR(r.angles.at(2), M_PI, 1e-12);
  EXPECT_FALSE(r.angles.count(1));
}

TEST(Transversal, RandomLayers) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> nq(1, 10);
  std::bernoulli_distribution used(0.6);
  double worst = 0, worst_idle = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = nq(rng);
    SingleLayer l;
    for (int q = 0; q < n; ++q) {
      if (used(rng)) l[q] = random_unitary(rng);
    }
    auto ops = transversal_decompose(l, n);
    double gr = 0;
    for (const auto& op : ops) {
      if (const auto* g = std::get_if<GrOp>(&op)) gr += g->theta;
    }
    EXPECT_NEAR(gr, theta_max(l), 1e-12);
    for (int q = 0; q < n; ++q) {
      auto it = l.find(q);
      if (it == l.end()) {
        worst_idle = std::max(worst_idle, projective_residual(qubit_product(ops, q),
                                                              Mat2::Identity()));
      } else {
        worst = std::max(worst, projective_residual(qubit_product(ops, q), it->second));
      }
    }
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_LT(worst_idle, 1e-12);
}

TEST(ExecutionTime, UnitConstants) {
  EXPECT_EQ(execution_time({GrOp{M_PI}}), 100e-6);
  EXPECT_EQ(execution_time({NcpOp{{0, 1}, Phase::pi()}}), 100e-9);
  EXPECT_EQ(execution_time({NcpOp{{0, 1, 2}, Phase::pi()}}), 400e-9);
  EXPECT_DOUBLE_EQ(execution_time({NcpOp{{0, 1, 2}, Phase(1, 2)}}), 200e-9);
  EXPECT_EQ(execution_time({RzLayerOp{{{0, M_PI}, {3, -M_PI / 2}}}}), 100e-9);
  EXPECT_EQ(execution_time({}), 0.0);
}

TEST(ExecutionTime, AdditiveAndOrderFree) {
  std::vector<NativeOp> ops{NcpOp{{0, 1}, Phase(1, 4)}, NcpOp{{0, 1, 2}, Phase(-3, 4)},
                            NcpOp{{1, 2}, Phase(1, 2)}};
  const double t = execution_time(ops);
  std::reverse(ops.begin(), ops.end());
  EXPECT_DOUBLE_EQ(execution_time(ops), t);
  EXPECT_DOUBLE_EQ(t, 25e-9 + 300e-9 + 50e-9);
  TimeConfig slow;
  slow.ncp_multi = 1e-6;
  EXPECT_DOUBLE_EQ(execution_time(ops, slow), 25e-9 + 750e-9 + 50e-9);
}

TEST(Schedule, SingleHadamard) {
  Circuit c(1);
  c.add(Gate::h(0));
  auto s = schedule(c);
  const auto counts = s.counts();
  EXPECT_EQ(counts.gr_pulses, 2);
  EXPECT_EQ(counts.gr_layers, 1);
  double gr_time = 0;
  for (const auto& op : s.ops) {
    if (std::holds_alternative<GrOp>(op)) gr_time += op_time(op);
  }
  EXPECT_NEAR(gr_time, 50e-6, 1e-18);
  EXPECT_TRUE(equal_up_to_scalar(schedule_unitary(s), circuit_unitary(c), 1e-9));
}

TEST(Schedule, RandomCircuitsKeepUnitary) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 80; ++trial) {
    Circuit c = testkit::random_circuit(rng, 1 + trial % 8, 40);
    auto s = schedule(c);
    EXPECT_EQ(s.total_time, execution_time(s.ops));
    EXPECT_TRUE(equal_up_to_scalar(schedule_unitary(s), circuit_unitary(c), 1e-9)) << trial;
  }
}

TEST(Schedule, JsonRoundTrip) {
  std::mt19937_64 rng(6);
  Circuit c = testkit::random_circuit(rng, 4, 30);
  auto s = schedule(c);
  auto j = s.to_json();
  auto back = Schedule::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.total_time, s.total_time);
  EXPECT_EQ(back.ops.size(), s.ops.size());
  double sum = 0;
  for (const auto& op : j["ops"]) sum += op["time"].get<double>();
  EXPECT_EQ(sum, j["total_time"].get<double>());
}

}  // namespace
}  // namespace nazx
