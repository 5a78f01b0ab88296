#pragma once

#include <Eigen/SparseCore>

#include "feederflow/index_map.hpp"
#include "feederflow/model.hpp"

namespace feederflow {

/// Magnitude guard for voltage-dependent load evaluation (pu). Any guarded
/// magnitude below this aborts the iteration instead of emitting huge
/// currents.
inline constexpr double kVoltageGuard = 1e-4;

/// ZIP injection current at voltage v (over the bus phase set). Loads draw
/// current, so all contributions carry a leading minus sign. Throws
/// DivergenceError when a loaded phase (or loaded delta pair) sees a
/// magnitude below kVoltageGuard.
Vec injection_current(const ZipLoad& load, PhaseSet omega, const Vec& v);

/// Constant-power plus constant-current portions only; the constant-impedance
/// portion is folded into the admittance matrix by the solver.
Vec injection_current_pqi(const ZipLoad& load, PhaseSet omega, const Vec& v);

/// Constant-impedance block: diagonal for wye loads, Laplacian-style with
/// zero row sums for delta loads.
Mat load_admittance_block(const ZipLoad& load, PhaseSet omega);

/// Block diagonal of per-bus constant-impedance blocks, indexed like the
/// feeder bus list (slack slot left empty).
struct LoadAdmittance {
  std::vector<Mat> bus_blocks;

  Eigen::SparseMatrix<cx> to_sparse(const PhaseIndexMap& index) const;
  Mat to_dense(const PhaseIndexMap& index) const;
};

LoadAdmittance assemble_load_admittance(const Feeder& feeder, const PhaseIndexMap& index);

/// Constant-power plus constant-current injections for all non-slack buses,
/// stacked in index order.
Vec stacked_injection_pqi(const Feeder& feeder, const PhaseIndexMap& index, const Vec& v);

}  // namespace feederflow
