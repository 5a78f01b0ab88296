#pragma once

#include "feederflow/index_map.hpp"
#include "feederflow/model.hpp"

namespace feederflow {

/// The four block matrices of the generic series-element model for one edge
/// (n, m):
///   i_nm = self_from * v_n - mutual_from * v_m
///   i_mn = self_to   * v_m - mutual_to   * v_n
/// Rows/columns of missing phases are zero. By construction mutual_to is the
/// exact transpose of mutual_from for every element kind, and the self
/// blocks are exactly symmetric.
struct SeriesBlocks {
  PhaseSet from_phases;
  PhaseSet to_phases;
  Mat self_from;    // |omega_n| x |omega_n|
  Mat mutual_from;  // |omega_n| x |omega_m|
  Mat self_to;      // |omega_m| x |omega_m|
  Mat mutual_to;    // |omega_m| x |omega_n|
};

/// Controls the shunt regularization of rank-deficient transformer blocks
/// and the regulator model used when building edge admittances.
enum class EpsilonMode { Resistive, Reactive };

struct BuildOptions {
  EpsilonMode mode = EpsilonMode::Resistive;
  double epsilon_rel = 1e-6;  // per transformer: eps = epsilon_rel * |y_t|
  bool ideal_svr = false;     // force Z_R = 0 for all regulators

  /// eps_self / eps_mutual values for a transformer with the given leakage
  /// admittance: resistive mode adds (eps, eps/2), reactive adds
  /// (-j eps, -j eps/2).
  std::pair<cx, cx> epsilon_for(cx y_t) const;
};

/// Pi-model line blocks, embedded from the line phase set into the endpoint
/// frames. Validates symmetry of Z and Y_shunt (relative tolerance 1e-9,
/// then symmetrizes) and numerical invertibility of Z.
SeriesBlocks line_blocks(const LineSpec& spec, PhaseSet omega_n, PhaseSet omega_m);

/// The six admittance matrices common transformer connections are built
/// from. y2 * ones = 0 and y4 * ones = 0; only y1 and y5 have full rank.
struct TransformerMatrices {
  Eigen::Matrix3cd y1, y2, y3, y4;
  Eigen::Matrix2cd y5;
  Eigen::Matrix<cx, 2, 3> y6;
};

TransformerMatrices transformer_matrices(cx y_t);

/// Blocks for one of the eight standard connections, with eps_self /
/// eps_mutual added to the rank-deficient blocks of the connection.
SeriesBlocks transformer_blocks(const TransformerSpec& spec, PhaseSet omega_n, PhaseSet omega_m);

/// Effective regulator ratio for an integer tap in [-16, 16]:
/// type B: 1 - 0.00625 tap; type A: 1 + 0.00625 tap.
double regulator_ratio(int tap, SvrType type);

/// Voltage gain, current gain, and impedance matrix over the regulator phase
/// set. Satisfies a_v * a_i^T = I for every configuration and type.
struct SvrGains {
  Mat a_v;
  Mat a_i;
  Mat z_r;
};

SvrGains svr_gain_matrices(const RegulatorSpec& spec);

/// Blocks of the virtual edge (n, m) after eliminating the regulator
/// internal node. With Z_R = 0 (or ideal_svr) the non-ideal formulas reduce
/// exactly to the ideal ones.
SeriesBlocks svr_blocks(const RegulatorSpec& spec, PhaseSet omega_n, PhaseSet omega_m,
                        bool ideal_svr = false);

/// Dispatch on the edge element kind. Transformer epsilons are taken from
/// `options` (any eps values already present on the element are ignored).
SeriesBlocks edge_blocks(const Edge& edge, PhaseSet omega_n, PhaseSet omega_m,
                         const BuildOptions& options);

}  // namespace feederflow
