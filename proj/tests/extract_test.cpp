#include <gtest/gtest.h>

#include <random>

#include "nazx/extract.hpp"
#include "nazx/ingest.hpp"
#include "nazx/oracle.hpp"
#include "nazx/simplify.hpp"
#include "test_support.hpp"

namespace nazx {
namespace {

const ExtractionMode kModes[] = {ExtractionMode::default_mode(), ExtractionMode::no_insert(),
                                 ExtractionMode::with_insert()};

std::vector<SpiderId> outputs_of(const ZxDiagram& d) {
  std::vector<SpiderId> out;
  for (const auto& b : d.outputs()) out.push_back(b.spider);
  return out;
}

TEST(Extract, IdentityGivesEmptyCircuit) {
  for (const auto& m : kModes) {
    Circuit c = extract_circuit(identity_diagram(3), m);
    EXPECT_EQ(c.num_qubits(), 3);
    EXPECT_TRUE(c.gates().empty());
  }
}

TEST(Extract, TemplateBecomesOneControlledPhase) {
  ZxDiagram d = identity_diagram(3);
  instantiate_template(d, theorem1_template(3, Phase::pi()), outputs_of(d));
  for (const auto& m : {ExtractionMode::no_insert(), ExtractionMode::with_insert()}) {
    auto r = extract_with_stats(*std::make_unique<ZxDiagram>(d), m);
    int ncp = 0;
    for (const auto& g : r.circuit.gates()) {
      if (g.kind == GateKind::NCP) {
        ++ncp;
        EXPECT_EQ(g.qubits, (std::vector<int>{0, 1, 2}));
        EXPECT_EQ(g.angle, Phase::pi());
      } else {
        EXPECT_EQ(g.kind, GateKind::Rz);
      }
    }
    EXPECT_EQ(ncp, 1);
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Identity(8, 8);
    want(7, 7) = -1.0;
    EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(r.circuit), want, 1e-10));
  }
}

TEST(Extract, DefaultModeUsesBaseGateSet) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    Circuit c = testkit::random_circuit(rng, 4, 20);
    ZxDiagram d = ingest(c);
    full_simplify(d);
    Circuit out = extract_circuit(d, ExtractionMode::default_mode());
    for (const auto& g : out.gates()) {
      EXPECT_TRUE(g.kind == GateKind::H || g.kind == GateKind::Rz ||
                  g.kind == GateKind::CZ || g.kind == GateKind::CX)
          << g;
    }
    EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(out), circuit_unitary(c), 1e-8));
  }
}

TEST(Extract, RandomCircuitsRoundTripInEveryMode) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 8;
    Circuit c = testkit::random_circuit(rng, n, 5 + trial % 25);
    const auto u = circuit_unitary(c);
    ZxDiagram d = ingest(c);
    full_simplify(d);
    for (const auto& m : kModes) {
      Circuit out;
      ASSERT_NO_THROW(out = extract_circuit(d, m))
          << "trial " << trial << " mode " << mode_name(m.kind);
      EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(out), u, 1e-8))
          << "trial " << trial << " mode " << mode_name(m.kind);
    }
  }
}

TEST(Extract, UnsimplifiedDiagramsAlsoExtract) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    Circuit c = testkit::random_circuit(rng, 3, 12);
    ZxDiagram d = ingest(c);
    for (const auto& m : kModes) {
      EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(extract_circuit(d, m)),
                                     circuit_unitary(c), 1e-8));
    }
  }
}

TEST(Extract, MaxCtrlBoundsControlledPhaseSize) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    Circuit c(5);
    std::uniform_int_distribution<int> q(0, 4);
    for (int i = 0; i < 6; ++i) {
      c.add(Gate::ncp({0, 1, 2, 3, 4}, testkit::random_phase(rng)));
      c.add(Gate::h(q(rng)));
      c.add(Gate::single(GateKind::T, q(rng)));
    }
    ZxDiagram d = ingest(c);
    full_simplify(d);
    for (int max_ctrl : {1, 2, 3}) {
      for (auto m : {ExtractionMode::no_insert(max_ctrl),
                     ExtractionMode::with_insert(max_ctrl)}) {
        Circuit out = extract_circuit(d, m);
        for (const auto& g : out.gates()) {
          if (g.kind == GateKind::NCP) {
            EXPECT_LE(static_cast<int>(g.qubits.size()), max_ctrl + 1);
          }
        }
        EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(out), circuit_unitary(c), 1e-8));
      }
    }
  }
}

TEST(Extract, Deterministic) {
  std::mt19937_64 rng(3);
  Circuit c = testkit::random_circuit(rng, 5, 40);
  for (const auto& m : kModes) {
    ZxDiagram a = ingest(c), b = ingest(c);
    full_simplify(a);
    full_simplify(b);
    EXPECT_EQ(extract_circuit(a, m), extract_circuit(b, m));
  }
}

TEST(Extract, GflowCheckedAtEveryStep) {
  std::mt19937_64 rng(21);
  int checks = 0, insertions = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Circuit c = testkit::random_circuit(rng, 4, 20);
    ZxDiagram base = ingest(c);
    full_simplify(base);
    for (const auto& m : kModes) {
      ZxDiagram d = base;
      ExtractionResult r;
      ASSERT_NO_THROW(r = extract_with_stats(d, m, {true})) << trial;
      checks += r.stats.gflow_checks;
      insertions += r.stats.insertions;
    }
  }
  EXPECT_GT(checks, 200);
  EXPECT_GT(insertions, 0);
}

TEST(Extract, NoGflowIsRejected) {
  ZxDiagram d = identity_diagram(1);
  SpiderId o = d.outputs()[0].spider;
  SpiderId a = d.add_spider(Phase(1, 4));
  SpiderId b = d.add_spider(Phase(1, 8));
  d.add_edge(a, b);
  d.add_edge(a, o);
  d.add_edge(b, o);
  SpiderId lone = d.add_spider(Phase(1, 4));
  d.add_edge(lone, a);
  d.add_edge(lone, b);
  try {
    extract_circuit(d);
    if (find_gflow(LabeledOpenGraph::from_diagram(d))) GTEST_SKIP();
    FAIL() << "expected an error";
  } catch (const ExtractionError& e) {
    EXPECT_STREQ(e.what(), "diagram not extractable");
  }
}

TEST(PivotYzNeighbor, SingleGadgetBlockingOneQubit) {
  // in -- mid -- out with a one-leg gadget on the output spider
  ZxDiagram d;
  SpiderId in = d.add_spider(), out = d.add_spider(), mid = d.add_spider(Phase(1, 4));
  d.add_input(in);
  d.add_output(out);
  d.add_edge(in, mid);
  d.add_edge(mid, out);
  add_gadget(d, {out}, Phase(1, 8));
  const auto before = diagram_tensor(d);
  ZxDiagram p = d;
  pivot_yz_neighbor(p, SpiderId{3}, out);
  EXPECT_TRUE(find_gadgets(p).empty());
  EXPECT_TRUE(equal_up_to_scalar(diagram_tensor(p), before, 1e-10));
  EXPECT_TRUE(find_gflow(LabeledOpenGraph::from_diagram(p)));
  auto r = extract_with_stats(d, ExtractionMode::default_mode());
  EXPECT_GE(r.stats.yz_pivots, 1);
  EXPECT_TRUE(equal_up_to_scalar(circuit_unitary(r.circuit), before, 1e-10));
}

TEST(PivotYzNeighbor, RandomCasesPreserveTensor) {
  std::mt19937_64 rng(90);
  int done = 0;
  for (int trial = 0; trial < 40 && done < 20; ++trial) {
    Circuit c = testkit::random_circuit(rng, 3, 14);
    ZxDiagram d = ingest(c);
    full_simplify(d);
    std::optional<std::pair<SpiderId, SpiderId>> pick;
    for (const auto& o : d.outputs()) {
      if (!d.phase(o.spider).is_pauli()) continue;
      for (SpiderId w : d.neighbors(o.spider)) {
        if (is_gadget_root(d, w)) pick = {{w, o.spider}};
      }
    }
    if (!pick) continue;
    const auto before = diagram_tensor(d);
    pivot_yz_neighbor(d, pick->first, pick->second);
    EXPECT_TRUE(equal_up_to_scalar(diagram_tensor(d), before, 1e-10));
    EXPECT_TRUE(find_gflow(LabeledOpenGraph::from_diagram(d)));
    ++done;
  }
  EXPECT_GT(done, 3);
}

TEST(PivotYzNeighbor, Errors) {
  ZxDiagram d = identity_diagram(2);
  auto g = add_gadget(d, {d.outputs()[0].spider}, Phase(1, 4));
  EXPECT_THROW(pivot_yz_neighbor(d, g.root, d.outputs()[1].spider), DiagramError);
}

}  // namespace
}  // namespace nazx
