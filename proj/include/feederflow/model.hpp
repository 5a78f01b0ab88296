#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "feederflow/phase.hpp"

namespace feederflow {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Index of the unordered phase pair {p, q} among ab=0, bc=1, ca=2.
inline int pair_index(Phase p, Phase q) {
  if (p == q) throw ValidationError("phase pair requires two distinct phases");
  int m = static_cast<int>(p) + static_cast<int>(q);
  return m == 1 ? 0 : (m == 3 ? 1 : 2);  // a+b=1, b+c=3, c+a=2
}

inline const char* pair_name(int k) { return std::array<const char*, 3>{"ab", "bc", "ca"}[k]; }

/// Phases of pair k, in (lead, lag) order.
inline std::pair<Phase, Phase> pair_phases(int k) {
  switch (k) {
    case 0: return {Phase::A, Phase::B};
    case 1: return {Phase::B, Phase::C};
    default: return {Phase::C, Phase::A};
  }
}

/// Line-to-neutral ZIP load: arrays indexed by Phase. Entries for phases
/// outside the bus phase set must stay zero.
struct WyeZip {
  std::array<cx, 3> s{};  // constant-power portion, pu
  std::array<cx, 3> i{};  // constant-current portion, pu (rated current phasor)
  std::array<cx, 3> y{};  // constant-impedance portion, pu
  bool fixed_phasor_current = false;

  bool operator==(const WyeZip&) const = default;
};

/// Line-to-line ZIP load: arrays indexed by pair (ab, bc, ca).
struct DeltaZip {
  std::array<cx, 3> s{};
  std::array<cx, 3> i{};
  std::array<cx, 3> y{};
  bool fixed_phasor_current = false;

  bool operator==(const DeltaZip&) const = default;
};

using ZipLoad = std::variant<WyeZip, DeltaZip>;

enum class BusKind { Wye, Delta, Slack };

struct Bus {
  std::string id;
  BusKind kind = BusKind::Wye;
  PhaseSet phases;
  std::optional<ZipLoad> load;

  bool operator==(const Bus&) const = default;
};

/// Pi-model line over its own phase set: series impedance and total shunt
/// admittance, both |phases| x |phases| and symmetric.
struct LineSpec {
  PhaseSet phases;
  Mat z;
  Mat y_shunt;  // zero matrix when the line has no shunt data

  bool operator==(const LineSpec& o) const { return phases == o.phases && z == o.z && y_shunt == o.y_shunt; }
};

enum class XfmrConnection {
  WyeGWyeG,
  WyeGWye,
  WyeGDelta,
  WyeWye,
  WyeDelta,
  DeltaDelta,
  OpenDeltaOpenDelta,
  OpenWyeOpenDelta,
};

struct TransformerSpec {
  XfmrConnection connection = XfmrConnection::WyeGWyeG;
  cx y_t;           // per-unit leakage admittance
  cx eps_self{};    // shunt added to rank-deficient self blocks
  cx eps_mutual{};  // shunt added to rank-deficient mutual blocks

  bool operator==(const TransformerSpec&) const = default;
};

enum class SvrConfig { Wye, ClosedDelta, OpenDelta };
enum class SvrType { A, B };

/// Step-voltage regulator in series with its downstream line. The regulator
/// internal node is eliminated at build time; `line` is the line between the
/// internal node and the far endpoint. Arm k of taps/z_r sits at diagonal
/// position k of the gain matrices: wye arms are phases a,b,c; closed-delta
/// arms are ab,bc,ca; open-delta arms are ab (k=0) and cb (k=2).
struct RegulatorSpec {
  SvrConfig config = SvrConfig::Wye;
  SvrType type = SvrType::B;
  PhaseSet phases;  // phases of primary and internal node (identical)
  std::array<int, 3> taps{};
  std::array<cx, 3> z_r{};
  LineSpec line;
  std::string internal_id;  // label used when reporting the eliminated node

  bool operator==(const RegulatorSpec&) const = default;
};

using ElementSpec = std::variant<LineSpec, TransformerSpec, RegulatorSpec>;

struct Edge {
  std::string id;
  std::string from;
  std::string to;
  PhaseSet phases;
  ElementSpec element;

  bool operator==(const Edge&) const = default;

  bool is_line() const { return std::holds_alternative<LineSpec>(element); }
  bool is_transformer() const { return std::holds_alternative<TransformerSpec>(element); }
  bool is_svr() const { return std::holds_alternative<RegulatorSpec>(element); }
};

struct Feeder {
  std::string name;
  std::vector<Bus> buses;  // includes the slack bus
  std::vector<Edge> edges;
  std::string slack_id;
  Eigen::Vector3cd v_slack;

  bool operator==(const Feeder&) const = default;

  int bus_position(const std::string& id) const;  // throws ValidationError when unknown
  const Bus& bus(const std::string& id) const { return buses[static_cast<size_t>(bus_position(id))]; }
  int slack_position() const { return bus_position(slack_id); }

  /// Checks every structural invariant: unique ids, resolvable references,
  /// exactly one three-phase slack, per-edge phase subsets, delta buses with
  /// at least two phases, element dimensions, tap ranges.
  void validate() const;
};

/// Symmetric slack voltage 1, 1/_-120, 1/_+120 pu.
Eigen::Vector3cd symmetrical_slack_voltage(double magnitude_pu = 1.0);

}  // namespace feederflow
