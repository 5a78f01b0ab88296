#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "feederflow/index_map.hpp"
#include "support/builders.hpp"

using namespace feederflow;
using namespace feederflow::testing;

TEST_CASE("phase sets order, index, and parse") {
  PhaseSet bc = PhaseSet::parse("cb");  // order in the string is ignored
  CHECK(bc.str() == "bc");
  CHECK(bc.size() == 2);
  CHECK(bc.index_of(Phase::B) == 0);
  CHECK(bc.index_of(Phase::C) == 1);
  CHECK(bc.index_of(Phase::A) == -1);
  CHECK(bc.subset_of(PhaseSet::abc()));
  CHECK_FALSE(PhaseSet::abc().subset_of(bc));
  CHECK_THROWS_AS(PhaseSet::parse("xd"), ValidationError);
  CHECK_THROWS_AS(PhaseSet::parse(""), ValidationError);
}

TEST_CASE("index map for a single three-phase bus") {
  Feeder f = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  PhaseIndexMap map = PhaseIndexMap::build(f);
  CHECK(map.size() == 3);
  CHECK(map.bus_offset(1) == 0);
  CHECK(map.bus_width(1) == 3);
  CHECK(map.index_of(1, Phase::A) == 0);
  CHECK(map.index_of(1, Phase::C) == 2);
  CHECK(map.index_of(0, Phase::A) == -1);  // slack excluded
}

TEST_CASE("index map sums phase counts over non-slack buses") {
  Feeder f = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  f.buses.push_back(make_bus("3", BusKind::Wye, PhaseSet::parse("bc")));
  f.edges.push_back(line_edge("L2", "2", "3", diagonal_line(PhaseSet::parse("bc"), cx{0.0, 0.1})));
  PhaseIndexMap map = PhaseIndexMap::build(f);
  CHECK(map.size() == 5);
  CHECK(map.bus_offset(2) == 3);
  CHECK(map.index_of(2, Phase::B) == 3);
  CHECK(map.index_of(2, Phase::A) == -1);
}

TEST_CASE("index map round trips through the inverse lookup") {
  Feeder f = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  f.buses.push_back(make_bus("3", BusKind::Wye, PhaseSet::parse("a")));
  f.edges.push_back(line_edge("L2", "2", "3", diagonal_line(PhaseSet::parse("a"), cx{0.0, 0.1})));
  f.buses.push_back(make_bus("4", BusKind::Delta, PhaseSet::parse("ac")));
  f.edges.push_back(line_edge("L3", "2", "4", diagonal_line(PhaseSet::parse("ac"), cx{0.0, 0.1})));
  PhaseIndexMap map = PhaseIndexMap::build(f);
  for (int j = 0; j < map.size(); ++j) {
    auto [bus, phase] = map.locate(j);
    CHECK(map.index_of(bus, phase) == j);
  }
}

TEST_CASE("build index rejects duplicate ids and missing slack") {
  Feeder f = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  f.buses.push_back(make_bus("2", BusKind::Wye, PhaseSet::abc()));
  CHECK_THROWS_AS(PhaseIndexMap::build(f), ValidationError);

  Feeder g = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  g.slack_id = "nope";
  CHECK_THROWS_AS(PhaseIndexMap::build(g), ValidationError);

  Feeder h = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  h.buses[0].kind = BusKind::Wye;  // no slack-kind bus left
  CHECK_THROWS_AS(PhaseIndexMap::build(h), ValidationError);
}

TEST_CASE("embed block zero-pads missing phases") {
  Mat block(2, 2);
  block << cx{1, 1}, cx{2, 0}, cx{2, 0}, cx{3, -1};
  Mat out = embed_block(block, PhaseSet::parse("bc"), PhaseSet::abc(), PhaseSet::abc());
  CHECK(out.rows() == 3);
  CHECK(out.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out(1, 1) == cx{1, 1});
  CHECK(out(1, 2) == cx{2, 0});
  CHECK(out(2, 2) == cx{3, -1});
}

TEST_CASE("embed block is the identity on full-phase blocks") {
  Mat block = Mat::Random(3, 3);
  Mat out = embed_block(block, PhaseSet::abc(), PhaseSet::abc(), PhaseSet::abc());
  CHECK(max_abs_diff(out, block) == 0.0);
}

TEST_CASE("embed block handles rectangular frames") {
  Mat block(1, 1);
  block << cx{5, 2};
  Mat out = embed_block(block, PhaseSet::parse("a"), PhaseSet::parse("ab"), PhaseSet::abc());
  CHECK(out.rows() == 2);
  CHECK(out.cols() == 3);
  CHECK(out(0, 0) == cx{5, 2});
  CHECK(out.cwiseAbs().sum() == doctest::Approx(std::abs(cx{5, 2})));
}

TEST_CASE("embed block rejects phase sets outside the frame") {
  Mat block = Mat::Zero(2, 2);
  CHECK_THROWS_AS(embed_block(block, PhaseSet::parse("bc"), PhaseSet::parse("ab"), PhaseSet::abc()),
                  ValidationError);
}

TEST_CASE("embed block preserves the Frobenius norm") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const PhaseSet sets[] = {PhaseSet::parse("a"), PhaseSet::parse("ab"), PhaseSet::parse("bc"),
                           PhaseSet::parse("ac"), PhaseSet::abc()};
  for (PhaseSet s : sets) {
    Mat block(s.size(), s.size());
    for (int r = 0; r < block.rows(); ++r)
      for (int c = 0; c < block.cols(); ++c) block(r, c) = cx{u(rng), u(rng)};
    Mat out = embed_block(block, s, PhaseSet::abc(), PhaseSet::abc());
    // Entries are copied bit-exactly, so the norm carries over.
    int r = 0;
    for (Phase pr : s) {
      int c = 0;
      for (Phase pc : s) {
        CHECK(out(static_cast<int>(pr), static_cast<int>(pc)) == block(r, c));
        ++c;
      }
      ++r;
    }
    CHECK(out.norm() == doctest::Approx(block.norm()).epsilon(1e-15));
  }
}

TEST_CASE("phase connectivity on a radial three-phase feeder") {
  Feeder f = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  f.buses.push_back(make_bus("3", BusKind::Wye, PhaseSet::abc()));
  f.edges.push_back(line_edge("L2", "2", "3", diagonal_line(PhaseSet::abc(), cx{0.0, 0.1})));
  auto reach = check_phase_connectivity(f);
  for (size_t b = 0; b < f.buses.size(); ++b)
    for (Phase p : kAllPhases) CHECK(reach[b][static_cast<int>(p)]);
}

TEST_CASE("phase connectivity spots a phase fed only through a two-phase lateral") {
  Feeder f = two_bus_feeder(diagonal_line(PhaseSet::abc(), cx{0.0, 0.1}));
  // Bus 3 declares phase c, but its only feed carries ab.
  f.buses.push_back(make_bus("3", BusKind::Wye, PhaseSet::abc()));
  f.edges.push_back(line_edge("L2", "2", "3", diagonal_line(PhaseSet::parse("ab"), cx{0.0, 0.1})));
  auto reach = check_phase_connectivity(f);
  CHECK(reach[2][0]);
  CHECK(reach[2][1]);
  CHECK_FALSE(reach[2][2]);
}

TEST_CASE("phase connectivity is monotone under edge additions") {
  std::mt19937 rng(123);
  std::uniform_int_distribution<int> pick_phases(1, 7);
  for (int trial = 0; trial < 25; ++trial) {
    Feeder f;
    f.slack_id = "s";
    f.v_slack = symmetrical_slack_voltage();
    f.buses.push_back(make_bus("s", BusKind::Slack, PhaseSet::abc()));
    const int n = 6;
    for (int b = 0; b < n; ++b)
      f.buses.push_back(make_bus("b" + std::to_string(b), BusKind::Wye, PhaseSet::abc()));
    auto random_phase_set = [&] {
      PhaseSet s;
      do {
        int mask = pick_phases(rng);
        s = PhaseSet{};
        for (Phase p : kAllPhases)
          if (mask & (1 << static_cast<int>(p))) s = s.unite(PhaseSet::of({p}));
      } while (s.empty());
      return s;
    };
    std::uniform_int_distribution<int> pick_bus(0, n);
    for (int e = 0; e < 6; ++e) {
      int a = pick_bus(rng), b = pick_bus(rng);
      if (a == b) continue;
      std::string ida = a == 0 ? "s" : "b" + std::to_string(a - 1);
      std::string idb = b == 0 ? "s" : "b" + std::to_string(b - 1);
      f.edges.push_back(line_edge("e" + std::to_string(e), ida, idb,
                                  diagonal_line(random_phase_set(), cx{0.0, 0.1})));
    }
    auto before = check_phase_connectivity(f);
    f.edges.push_back(line_edge("extra", "s", "b3", diagonal_line(random_phase_set(), cx{0.0, 0.1})));
    auto after = check_phase_connectivity(f);
    for (size_t b = 0; b < f.buses.size(); ++b)
      for (int p = 0; p < 3; ++p)
        if (before[b][p]) CHECK(after[b][p]);
  }
}
