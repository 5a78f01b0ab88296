#pragma once

#include <random>

#include "feederflow/series.hpp"

namespace feederflow::testing {

struct RandomFeederOptions {
  int min_buses = 5;
  int max_buses = 50;
  EpsilonMode mode = EpsilonMode::Resistive;
  bool allow_missing_phases = true;
  bool allow_nonideal_svr = true;
  bool with_loads = true;
  bool allow_shunts = true;
  bool allow_mesh = true;
};

/// Connected random feeder mixing every series-element category: lines with
/// and without missing phases, the eight transformer connections, and all
/// three regulator configurations of both types. Per-phase connectivity from
/// the slack holds by construction. In reactive mode lines carry no shunts
/// and regulators are ideal.
Feeder random_feeder(std::mt19937& rng, const RandomFeederOptions& options = {});

/// Random symmetric Z with positive definite real and imaginary parts,
/// scaled to distribution-line magnitudes.
Mat random_line_impedance(std::mt19937& rng, int n);

/// Random non-ideal regulator spec (for gain-matrix and node-elimination
/// identities), with a downstream line attached.
RegulatorSpec random_regulator(std::mt19937& rng, SvrConfig config, SvrType type,
                               bool nonideal = true);

}  // namespace feederflow::testing
