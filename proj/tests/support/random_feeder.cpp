#include "support/random_feeder.hpp"

namespace feederflow::testing {

namespace {

using Dist = std::uniform_real_distribution<double>;
using IntDist = std::uniform_int_distribution<int>;

Eigen::MatrixXd random_spd(std::mt19937& rng, int n, double scale) {
  Dist u(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = u(rng);
  Eigen::MatrixXd m = a * a.transpose();
  m += n * Eigen::MatrixXd::Identity(n, n);
  return scale * m / m.cwiseAbs().maxCoeff();
}

PhaseSet random_subset(std::mt19937& rng, PhaseSet parent, bool allow_partial) {
  if (!allow_partial || parent.size() == 1) return parent;
  if (Dist(0.0, 1.0)(rng) < 0.6) return parent;
  PhaseSet out;
  while (out.empty()) {
    out = PhaseSet{};
    for (Phase p : parent)
      if (Dist(0.0, 1.0)(rng) < 0.6) out = out.unite(PhaseSet::of({p}));
  }
  return out;
}

cx random_yt(std::mt19937& rng) {
  // Leakage with positive resistance and positive reactance; satisfies both
  // Re[y_t] > 0 and Im[y_t] < 0.
  Dist r(0.005, 0.05), x(0.02, 0.15);
  return 1.0 / cx{r(rng), x(rng)};
}

}  // namespace

Mat random_line_impedance(std::mt19937& rng, int n) {
  Dist scale_r(0.02, 0.15), scale_x(0.05, 0.3);
  Eigen::MatrixXd re = random_spd(rng, n, scale_r(rng));
  Eigen::MatrixXd im = random_spd(rng, n, scale_x(rng));
  return re.cast<cx>() + cx{0.0, 1.0} * im.cast<cx>();
}

RegulatorSpec random_regulator(std::mt19937& rng, SvrConfig config, SvrType type, bool nonideal) {
  RegulatorSpec spec;
  spec.config = config;
  spec.type = type;
  spec.phases = PhaseSet::abc();
  IntDist tap(-16, 16);
  for (auto& t : spec.taps) t = tap(rng);
  if (nonideal) {
    Dist r(0.0005, 0.01), x(0.001, 0.02);
    for (auto& z : spec.z_r) z = cx{r(rng), x(rng)};
  }
  if (config == SvrConfig::OpenDelta) {  // arm slot b is structurally unused
    spec.taps[1] = 0;
    spec.z_r[1] = cx{};
  }
  spec.line.phases = PhaseSet::abc();
  spec.line.z = random_line_impedance(rng, 3);
  spec.line.y_shunt = Mat::Zero(3, 3);
  spec.internal_id = "svr_internal";
  return spec;
}

Feeder random_feeder(std::mt19937& rng, const RandomFeederOptions& options) {
  const bool reactive = options.mode == EpsilonMode::Reactive;
  Feeder f;
  f.name = "random";
  f.slack_id = "s";
  f.v_slack = symmetrical_slack_voltage();
  f.buses.push_back(Bus{"s", BusKind::Slack, PhaseSet::abc(), std::nullopt});

  const int n_buses = IntDist(options.min_buses, options.max_buses)(rng);
  Dist u(0.0, 1.0);

  auto make_line = [&](PhaseSet phases) {
    LineSpec line;
    line.phases = phases;
    line.z = random_line_impedance(rng, phases.size());
    const int n = phases.size();
    if (!reactive && options.allow_shunts && u(rng) < 0.5) {
      Eigen::MatrixXd b = random_spd(rng, n, Dist(1e-4, 2e-3)(rng));
      line.y_shunt = cx{0.0, 1.0} * b.cast<cx>();
    } else {
      line.y_shunt = Mat::Zero(n, n);
    }
    return line;
  };

  int edge_counter = 0;
  auto edge_id = [&] { return "e" + std::to_string(edge_counter++); };

  for (int i = 1; i < n_buses; ++i) {
    const int parent = IntDist(0, i - 1)(rng);
    const std::string parent_id = f.buses[static_cast<size_t>(parent)].id;
    const PhaseSet parent_phases = f.buses[static_cast<size_t>(parent)].phases;
    const std::string child_id = "b" + std::to_string(i);
    const bool parent_full = parent_phases == PhaseSet::abc();
    const double kind_roll = u(rng);

    if (!parent_full || kind_roll < 0.5) {
      PhaseSet child_phases = random_subset(rng, parent_phases, options.allow_missing_phases);
      f.buses.push_back(Bus{child_id, BusKind::Wye, child_phases, std::nullopt});
      Edge e{edge_id(), parent_id, child_id, child_phases, make_line(child_phases)};
      f.edges.push_back(std::move(e));
    } else if (kind_roll < 0.8) {
      static const XfmrConnection kTreeConnections[] = {
          XfmrConnection::WyeGWyeG,   XfmrConnection::WyeGWye,  XfmrConnection::WyeGDelta,
          XfmrConnection::WyeWye,     XfmrConnection::WyeDelta, XfmrConnection::DeltaDelta,
          XfmrConnection::OpenDeltaOpenDelta};
      TransformerSpec spec;
      spec.connection = kTreeConnections[IntDist(0, 6)(rng)];
      spec.y_t = random_yt(rng);
      f.buses.push_back(Bus{child_id, BusKind::Wye, PhaseSet::abc(), std::nullopt});
      f.edges.push_back(Edge{edge_id(), parent_id, child_id, PhaseSet::abc(), spec});
    } else {
      SvrConfig config = std::array{SvrConfig::Wye, SvrConfig::ClosedDelta,
                                    SvrConfig::OpenDelta}[IntDist(0, 2)(rng)];
      SvrType type = u(rng) < 0.5 ? SvrType::A : SvrType::B;
      const bool nonideal = !reactive && options.allow_nonideal_svr && u(rng) < 0.5;
      RegulatorSpec spec = random_regulator(rng, config, type, nonideal);
      PhaseSet phases = PhaseSet::abc();
      if (config == SvrConfig::Wye && options.allow_missing_phases) {
        phases = random_subset(rng, PhaseSet::abc(), true);
        spec.phases = phases;
        spec.line.phases = phases;
        spec.line.z = random_line_impedance(rng, phases.size());
        spec.line.y_shunt = Mat::Zero(phases.size(), phases.size());
        for (Phase p : PhaseSet::abc()) {
          if (phases.contains(p)) continue;
          spec.taps[static_cast<size_t>(p)] = 0;
          spec.z_r[static_cast<size_t>(p)] = cx{};
        }
      }
      spec.internal_id = child_id + "_sec";
      f.buses.push_back(Bus{child_id, BusKind::Wye, phases, std::nullopt});
      f.edges.push_back(Edge{edge_id(), parent_id, child_id, phases, spec});
    }
  }

  // Mesh extras, including the open-wye--open-delta category which only
  // appears between buses that are already fully phase-connected.
  if (options.allow_mesh) {
    const int extras = IntDist(0, 2)(rng);
    for (int k = 0; k < extras; ++k) {
      std::vector<int> full;
      for (size_t i = 0; i < f.buses.size(); ++i)
        if (f.buses[i].phases == PhaseSet::abc()) full.push_back(static_cast<int>(i));
      if (full.size() < 2) break;
      const int a = full[static_cast<size_t>(IntDist(0, static_cast<int>(full.size()) - 1)(rng))];
      int b = a;
      while (b == a) b = full[static_cast<size_t>(IntDist(0, static_cast<int>(full.size()) - 1)(rng))];
      const double roll = u(rng);
      if (roll < 0.4) {
        f.edges.push_back(Edge{edge_id(), f.buses[static_cast<size_t>(a)].id,
                               f.buses[static_cast<size_t>(b)].id, PhaseSet::abc(),
                               make_line(PhaseSet::abc())});
      } else if (roll < 0.7) {
        TransformerSpec spec;
        spec.connection = XfmrConnection::OpenWyeOpenDelta;
        spec.y_t = random_yt(rng);
        f.edges.push_back(Edge{edge_id(), f.buses[static_cast<size_t>(a)].id,
                               f.buses[static_cast<size_t>(b)].id,
                               PhaseSet::of({Phase::A, Phase::B}), spec});
      } else {
        TransformerSpec spec;
        spec.connection = XfmrConnection::DeltaDelta;
        spec.y_t = random_yt(rng);
        f.edges.push_back(Edge{edge_id(), f.buses[static_cast<size_t>(a)].id,
                               f.buses[static_cast<size_t>(b)].id, PhaseSet::abc(), spec});
      }
    }
  }

  if (options.with_loads) {
    for (size_t i = 1; i < f.buses.size(); ++i) {
      Bus& b = f.buses[i];
      if (u(rng) > 0.6) continue;
      Dist mag(0.0, 0.04), q(0.0, 0.5);
      const bool delta = b.phases.size() >= 2 && u(rng) < 0.3;
      if (delta) {
        b.kind = BusKind::Delta;
        DeltaZip zip;
        for (int k = 0; k < 3; ++k) {
          auto [p1, p2] = pair_phases(k);
          if (!b.phases.contains(p1) || !b.phases.contains(p2)) continue;
          zip.s[static_cast<size_t>(k)] = cx{mag(rng), mag(rng) * q(rng)};
          zip.i[static_cast<size_t>(k)] = std::conj(cx{mag(rng), mag(rng) * q(rng)}) / std::sqrt(3.0);
          zip.y[static_cast<size_t>(k)] = cx{mag(rng), -q(rng) * mag(rng)};
        }
        b.load = zip;
      } else {
        WyeZip zip;
        for (Phase p : b.phases) {
          const int k = static_cast<int>(p);
          zip.s[static_cast<size_t>(k)] = cx{mag(rng), mag(rng) * q(rng)};
          zip.i[static_cast<size_t>(k)] = std::conj(cx{mag(rng), mag(rng) * q(rng)});
          zip.y[static_cast<size_t>(k)] = cx{mag(rng), -q(rng) * mag(rng)};
        }
        b.load = zip;
      }
    }
  }

  f.validate();
  return f;
}

}  // namespace feederflow::testing
