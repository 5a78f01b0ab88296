#include "feederflow/model.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <unordered_map>

namespace feederflow {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

void check_zip_support(const ZipLoad& load, const Bus& bus) {
  if (const auto* wye = std::get_if<WyeZip>(&load)) {
    require(bus.kind != BusKind::Delta, "bus " + bus.id + ": wye load on a delta bus");
    for (Phase p : kAllPhases) {
      int k = static_cast<int>(p);
      bool used = wye->s[k] != cx{} || wye->i[k] != cx{} || wye->y[k] != cx{};
      require(!used || bus.phases.contains(p),
              "bus " + bus.id + ": load on absent phase " + std::string(1, phase_char(p)));
    }
  } else {
    const auto& delta = std::get<DeltaZip>(load);
    require(bus.kind == BusKind::Delta, "bus " + bus.id + ": delta load on a non-delta bus");
    for (int k = 0; k < 3; ++k) {
      bool used = delta.s[k] != cx{} || delta.i[k] != cx{} || delta.y[k] != cx{};
      auto [p, q] = pair_phases(k);
      require(!used || (bus.phases.contains(p) && bus.phases.contains(q)),
              "bus " + bus.id + ": load on pair " + pair_name(k) + " with absent phase");
    }
  }
  // Re[y_L] >= 0 keeps the load admittance positive semidefinite.
  std::visit(
      [&](const auto& zip) {
        for (const cx& y : zip.y)
          require(y.real() >= 0.0, "bus " + bus.id + ": constant-impedance load with negative conductance");
      },
      load);
}

void check_element(const Edge& edge, const Bus& from, const Bus& to) {
  const std::string where = "edge " + edge.id;
  if (const auto* line = std::get_if<LineSpec>(&edge.element)) {
    require(line->phases == edge.phases, where + ": line phase set differs from edge phase set");
    int n = line->phases.size();
    require(line->z.rows() == n && line->z.cols() == n, where + ": Z dimension mismatch");
    require(line->y_shunt.rows() == n && line->y_shunt.cols() == n, where + ": Y_shunt dimension mismatch");
  } else if (const auto* xfmr = std::get_if<TransformerSpec>(&edge.element)) {
    require(xfmr->y_t != cx{}, where + ": transformer leakage admittance must be nonzero");
    if (xfmr->connection == XfmrConnection::OpenWyeOpenDelta) {
      require(edge.phases == PhaseSet::of({Phase::A, Phase::B}),
              where + ": open-wye--open-delta carries phases ab on the open-wye side");
      require(to.phases == PhaseSet::abc(), where + ": open-delta side requires three phases");
    } else {
      require(edge.phases == PhaseSet::abc(), where + ": transformer connection requires three phases");
      require(from.phases == PhaseSet::abc() && to.phases == PhaseSet::abc(),
              where + ": transformer endpoints require three phases");
    }
  } else {
    const auto& svr = std::get<RegulatorSpec>(edge.element);
    require(svr.phases == edge.phases, where + ": regulator phase set differs from edge phase set");
    require(svr.phases.subset_of(from.phases),
            where + ": regulator phases must be available at the primary bus");
    if (svr.config != SvrConfig::Wye)
      require(svr.phases == PhaseSet::abc(), where + ": delta regulator configurations require phases abc");
    for (int t : svr.taps)
      require(t >= -16 && t <= 16, where + ": tap out of range [-16, 16]");
    require(svr.line.phases.subset_of(svr.phases), where + ": regulator line phases exceed regulator phases");
    require(svr.line.phases.subset_of(to.phases), where + ": regulator line phases exceed far bus phases");
    int n = svr.line.phases.size();
    require(svr.line.z.rows() == n && svr.line.z.cols() == n, where + ": regulator line Z dimension mismatch");
    require(svr.line.y_shunt.rows() == n && svr.line.y_shunt.cols() == n,
            where + ": regulator line Y_shunt dimension mismatch");
    if (svr.config != SvrConfig::Wye)
      require(svr.line.phases == PhaseSet::abc(),
              where + ": delta regulator configurations require a three-phase line");
  }
}

}  // namespace

int Feeder::bus_position(const std::string& id) const {
  for (size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == id) return static_cast<int>(i);
  throw ValidationError("unknown bus id \"" + id + "\"");
}

void Feeder::validate() const {
  std::set<std::string> bus_ids;
  for (const Bus& b : buses) {
    require(!b.id.empty(), "bus with empty id");
    require(bus_ids.insert(b.id).second, "duplicate bus id \"" + b.id + "\"");
    require(!b.phases.empty(), "bus " + b.id + ": empty phase set");
    if (b.kind == BusKind::Delta)
      require(b.phases.size() >= 2, "bus " + b.id + ": delta bus requires at least two phases");
    if (b.load) check_zip_support(*b.load, b);
  }

  require(!slack_id.empty(), "slack bus not designated");
  require(bus_ids.count(slack_id) == 1, "slack bus \"" + slack_id + "\" not found");
  int n_slack = 0, n_non_slack = 0;
  for (const Bus& b : buses) {
    if (b.kind == BusKind::Slack) {
      ++n_slack;
      require(b.id == slack_id, "bus " + b.id + " marked slack but slack is \"" + slack_id + "\"");
      require(b.phases == PhaseSet::abc(), "slack bus requires all three phases");
      require(!b.load, "slack bus cannot carry a load");
    } else {
      ++n_non_slack;
    }
  }
  require(n_slack == 1, "exactly one slack bus required");
  require(n_non_slack >= 1, "feeder requires at least one non-slack bus");

  std::set<std::string> edge_ids;
  for (const Edge& e : edges) {
    require(!e.id.empty(), "edge with empty id");
    require(edge_ids.insert(e.id).second, "duplicate edge id \"" + e.id + "\"");
    require(e.from != e.to, "edge " + e.id + ": self loop");
    const Bus& from = bus(e.from);  // throws on dangling reference
    const Bus& to = bus(e.to);
    require(!e.phases.empty(), "edge " + e.id + ": empty phase set");
    require(e.phases.subset_of(from.phases) && e.phases.subset_of(to.phases),
            "edge " + e.id + ": phase set not a subset of both endpoints");
    check_element(e, from, to);
  }
}

Eigen::Vector3cd symmetrical_slack_voltage(double magnitude_pu) {
  const double th = 2.0 * std::numbers::pi / 3.0;
  return {magnitude_pu * std::polar(1.0, 0.0), magnitude_pu * std::polar(1.0, -th),
          magnitude_pu * std::polar(1.0, th)};
}

}  // namespace feederflow
