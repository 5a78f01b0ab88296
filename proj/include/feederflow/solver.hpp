#pragma once

#include <Eigen/SparseLU>
#include <map>
#include <memory>
#include <optional>

#include "feederflow/ybus.hpp"

namespace feederflow {

struct SolverConfig {
  double tol = 1e-9;           // max-abs complex voltage change between iterates, pu
  int max_iter = 100;
  double residual_tol = 1e-8;  // current-balance residual required to declare convergence
  std::optional<Vec> start;    // default: flat profile from the slack voltage
  BuildOptions build{};
};

struct SolverResult {
  Vec v;                      // converged (or best) voltages, index order
  int iterations = 0;
  double residual_inf = 0.0;  // kirchhoff balance residual at exit
  bool converged = false;
  Eigen::Vector3cd i_slack = Eigen::Vector3cd::Zero();
};

/// One-time LU factorization of Y + Y_L, reused across fixed-point
/// iterations and across solves. Solves apply one step of iterative
/// refinement: the regularized matrices sit close to singular and the
/// refinement suppresses solution noise along their small singular
/// directions.
class ZBusFactorization {
 public:
  /// Throws SingularMatrixError when the matrix is numerically singular,
  /// naming the likely cause.
  static ZBusFactorization factorize(const Eigen::SparseMatrix<cx>& y_plus_yl);

  Vec solve(const Vec& rhs) const;
  double condition_estimate() const { return condition_estimate_; }

 private:
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<cx>>> lu_;
  std::shared_ptr<Eigen::SparseMatrix<cx>> matrix_;
  double condition_estimate_ = 0.0;
};

/// Z-Bus fixed point: v <- Z (i_PQ(v) + i_I(v)) + w with Z = (Y + Y_L)^-1
/// and w = -Z Y_NS v_S, iterated from a flat start until the voltage change
/// drops below tol and the residual below residual_tol.
SolverResult solve(const Feeder& feeder, const SolverConfig& config = {});

/// Same fixed point on a pre-assembled system (shares the factorization).
SolverResult solve_assembled(const Feeder& feeder, const PhaseIndexMap& index,
                             const YBusPartition& partition, const LoadAdmittance& load,
                             const ZBusFactorization& factorization, const SolverConfig& config);

/// inf-norm of i_PQ(v) + i_I(v) - (Y + Y_L) v - Y_NS v_S.
double residual(const Feeder& feeder, const PhaseIndexMap& index, const YBusPartition& partition,
                const LoadAdmittance& load, const Vec& v);

/// Convenience: assembles with config.build before computing the residual.
double residual(const Feeder& feeder, const Vec& v, const SolverConfig& config = {});

/// One solve per relative epsilon (sorted descending); entry k reports the
/// max voltage-magnitude change between runs k and k-1, attributed to the
/// smaller epsilon. The first run produces no entry.
std::vector<std::pair<double, double>> epsilon_sweep(const Feeder& feeder,
                                                     const std::vector<double>& epsilon_rel,
                                                     const SolverConfig& base = {});

/// Voltages of the eliminated regulator internal nodes, recovered from a
/// solved voltage vector. Keyed by edge id.
std::map<std::string, Vec> recover_regulator_internal_voltages(const Feeder& feeder,
                                                               const PhaseIndexMap& index,
                                                               const Vec& v,
                                                               const BuildOptions& options = {});

}  // namespace feederflow
