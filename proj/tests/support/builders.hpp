#pragma once

#include <string>

#include "feederflow/model.hpp"

namespace feederflow::testing {

inline LineSpec diagonal_line(PhaseSet phases, cx z_diag, cx ys_diag = cx{}) {
  LineSpec line;
  line.phases = phases;
  const int n = phases.size();
  line.z = z_diag * Mat::Identity(n, n);
  line.y_shunt = ys_diag * Mat::Identity(n, n);
  return line;
}

inline Bus make_bus(std::string id, BusKind kind, PhaseSet phases) {
  return Bus{std::move(id), kind, phases, std::nullopt};
}

inline Edge line_edge(std::string id, std::string from, std::string to, LineSpec spec) {
  return Edge{std::move(id), std::move(from), std::move(to), spec.phases, std::move(spec)};
}

/// Slack "s" plus one three-phase wye bus "2" joined by a line.
inline Feeder two_bus_feeder(LineSpec line) {
  Feeder f;
  f.name = "two-bus";
  f.buses.push_back(make_bus("s", BusKind::Slack, PhaseSet::abc()));
  f.buses.push_back(make_bus("2", BusKind::Wye, line.phases));
  f.edges.push_back(line_edge("L1", "s", "2", std::move(line)));
  f.slack_id = "s";
  f.v_slack = symmetrical_slack_voltage();
  return f;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace feederflow::testing
