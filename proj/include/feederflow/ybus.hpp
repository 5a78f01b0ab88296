#pragma once

#include <Eigen/SparseCore>
#include <map>

#include "feederflow/loads.hpp"
#include "feederflow/series.hpp"

namespace feederflow {

/// Assembled bus admittance matrix, partitioned into the non-slack block Y,
/// the couplings to the slack bus Y_NS / Y_SN, and the slack self block
/// Y_SS. Y is stored block-sparse, keyed by (row bus, col bus) positions;
/// blocks are dense and at most 3x3.
struct YBusPartition {
  std::map<std::pair<int, int>, Mat> blocks;  // non-slack x non-slack
  std::map<int, Mat> ns_blocks;               // per bus: |omega_n| x 3
  std::map<int, Mat> sn_blocks;               // per bus: 3 x |omega_n|
  Eigen::Matrix3cd ss = Eigen::Matrix3cd::Zero();

  Mat dense_y(const PhaseIndexMap& index) const;
  Eigen::SparseMatrix<cx> sparse_y(const PhaseIndexMap& index) const;
  Mat dense_ns(const PhaseIndexMap& index) const;  // J x 3
  Mat dense_sn(const PhaseIndexMap& index) const;  // 3 x J

  /// max |Y - Y^T| over all entries.
  double symmetry_defect(const PhaseIndexMap& index) const;
};

YBusPartition assemble(const Feeder& feeder, const PhaseIndexMap& index,
                       const BuildOptions& options = {});

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Structural diagnostics: symmetry, definiteness of the regularized real
/// (or imaginary) part, singular-value based rank estimates of Y and
/// Y + Y_L, and a pass/fail ledger of the modeling assumptions the
/// invertibility theory rests on.
struct Diagnostics {
  EpsilonMode mode = EpsilonMode::Resistive;
  double symmetry_defect = 0.0;
  double definiteness_eig = 0.0;  // min eig of sym Re[Y] (resistive) or max eig of sym Im[Y] (reactive)
  double sigma_min_y = 0.0, sigma_max_y = 0.0;
  double sigma_min_yyl = 0.0, sigma_max_yyl = 0.0;
  int rank_y = 0, rank_yyl = 0, dimension = 0;
  std::vector<AssumptionCheck> ledger;
  bool structural_pass = false;

  const AssumptionCheck* find(const std::string& name) const;
};

/// Never throws: reports every defect it finds instead. `options` must be
/// the ones the partition was assembled with (the epsilon ledger rows
/// re-derive the per-transformer shunts from it).
Diagnostics check_invertibility(const Feeder& feeder, const PhaseIndexMap& index,
                                const YBusPartition& partition, const LoadAdmittance& load,
                                const BuildOptions& options);

}  // namespace feederflow
