#include "feederflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace feederflow {

namespace {

constexpr double kDivergenceCap = 10.0;  // pu
constexpr double kConditionLimit = 1e13;

Vec flat_start(const Feeder& feeder, const PhaseIndexMap& index) {
  Vec v(index.size());
  for (int j = 0; j < index.size(); ++j) {
    auto [bus, phase] = index.locate(j);
    (void)bus;
    v(j) = feeder.v_slack(static_cast<int>(phase));
  }
  return v;
}

struct AssembledSystem {
  Eigen::SparseMatrix<cx> y;
  Eigen::SparseMatrix<cx> yl;
  Mat ns;  // J x 3
  Mat sn;  // 3 x J
};

AssembledSystem materialize(const PhaseIndexMap& index, const YBusPartition& partition,
                            const LoadAdmittance& load) {
  return {partition.sparse_y(index), load.to_sparse(index), partition.dense_ns(index),
          partition.dense_sn(index)};
}

double residual_inf(const Feeder& feeder, const PhaseIndexMap& index, const AssembledSystem& sys,
                    const Vec& v) {
  const Vec lhs = stacked_injection_pqi(feeder, index, v);
  const Vec rhs = sys.y * v + sys.yl * v + sys.ns * feeder.v_slack;
  if (lhs.size() == 0) return 0.0;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace

ZBusFactorization ZBusFactorization::factorize(const Eigen::SparseMatrix<cx>& y_plus_yl) {
  ZBusFactorization f;
  f.lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<cx>>>();
  f.matrix_ = std::make_shared<Eigen::SparseMatrix<cx>>(y_plus_yl);
  f.matrix_->makeCompressed();
  const Eigen::SparseMatrix<cx>& m = *f.matrix_;
  f.lu_->compute(m);
  const char* cause =
      " (likely cause: an unregularized delta or ungrounded-wye transformer winding, or a phase "
      "disconnected from the slack bus)";
  if (f.lu_->info() != Eigen::Success)
    throw SingularMatrixError(std::string("LU factorization of Y + Y_L failed") + cause);

  // Condition estimate: a few power iterations on (A A^H)^-1 for sigma_min
  // and on A^H A for sigma_max. Deterministic start keeps solves replayable.
  const int n = static_cast<int>(m.rows());
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec x(n);
  for (int i = 0; i < n; ++i) x(i) = cx{u(rng), u(rng)};
  x.normalize();
  double inv_norm = 0.0;
  Vec xs = x;
  for (int it = 0; it < 4; ++it) {
    Vec ysol = f.lu_->solve(xs);
    Vec z = f.lu_->adjoint().solve(ysol);
    if (!z.allFinite()) throw SingularMatrixError(std::string("Y + Y_L numerically singular") + cause);
    inv_norm = z.norm();
    if (inv_norm == 0.0) break;
    xs = z / inv_norm;
  }
  double fwd_norm = 0.0;
  Vec xf = x;
  for (int it = 0; it < 4; ++it) {
    Vec ymv = m * xf;
    Vec z = m.adjoint() * ymv;
    fwd_norm = z.norm();
    if (fwd_norm == 0.0) break;
    xf = z / fwd_norm;
  }
  const double sigma_min = inv_norm > 0.0 ? 1.0 / std::sqrt(inv_norm) : 0.0;
  const double sigma_max = std::sqrt(fwd_norm);
  f.condition_estimate_ = sigma_min > 0.0 ? sigma_max / sigma_min : std::numeric_limits<double>::infinity();
  if (!(f.condition_estimate_ < kConditionLimit))
    throw SingularMatrixError("Y + Y_L numerically singular: condition estimate " +
                              std::to_string(f.condition_estimate_) + cause);
  return f;
}

Vec ZBusFactorization::solve(const Vec& rhs) const {
  Vec x = lu_->solve(rhs);
  const Vec residual = rhs - (*matrix_) * x;
  x += lu_->solve(residual);
  return x;
}

SolverResult solve_assembled(const Feeder& feeder, const PhaseIndexMap& index,
                             const YBusPartition& partition, const LoadAdmittance& load,
                             const ZBusFactorization& factorization, const SolverConfig& config) {
  if (config.tol <= 0.0 || config.max_iter < 1)
    throw ValidationError("solver config requires tol > 0 and max_iter >= 1");
  const AssembledSystem sys = materialize(index, partition, load);

  const Vec w = factorization.solve(Vec(-sys.ns * feeder.v_slack));
  Vec v = config.start ? *config.start : flat_start(feeder, index);
  if (v.size() != index.size()) throw ValidationError("start vector size does not match index");

  SolverResult result;
  result.converged = false;
  for (int t = 1; t <= config.max_iter; ++t) {
    const Vec rhs = stacked_injection_pqi(feeder, index, v);
    Vec next = factorization.solve(rhs) + w;
    const double vmax = next.size() ? next.cwiseAbs().maxCoeff() : 1.0;
    const double vmin = next.size() ? next.cwiseAbs().minCoeff() : 1.0;
    if (vmax > kDivergenceCap || vmin < kVoltageGuard)
      throw DivergenceError("iteration diverged: voltage magnitude outside [" +
                            std::to_string(kVoltageGuard) + ", 10] pu at iteration " +
                            std::to_string(t));
    const double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    result.iterations = t;
    if (change < config.tol) {
      result.residual_inf = residual_inf(feeder, index, sys, v);
      if (result.residual_inf < config.residual_tol) {
        result.converged = true;
        break;
      }
    }
  }
  result.v = v;
  if (!result.converged) result.residual_inf = residual_inf(feeder, index, sys, v);
  result.i_slack = sys.sn * v + partition.ss * feeder.v_slack;
  return result;
}

SolverResult solve(const Feeder& feeder, const SolverConfig& config) {
  const PhaseIndexMap index = PhaseIndexMap::build(feeder);
  const YBusPartition partition = assemble(feeder, index, config.build);
  const LoadAdmittance load = assemble_load_admittance(feeder, index);
  const ZBusFactorization f =
      ZBusFactorization::factorize(partition.sparse_y(index) + load.to_sparse(index));
  return solve_assembled(feeder, index, partition, load, f, config);
}

double residual(const Feeder& feeder, const PhaseIndexMap& index, const YBusPartition& partition,
                const LoadAdmittance& load, const Vec& v) {
  return residual_inf(feeder, index, materialize(index, partition, load), v);
}

double residual(const Feeder& feeder, const Vec& v, const SolverConfig& config) {
  const PhaseIndexMap index = PhaseIndexMap::build(feeder);
  const YBusPartition partition = assemble(feeder, index, config.build);
  const LoadAdmittance load = assemble_load_admittance(feeder, index);
  return residual(feeder, index, partition, load, v);
}

std::vector<std::pair<double, double>> epsilon_sweep(const Feeder& feeder,
                                                     const std::vector<double>& epsilon_rel,
                                                     const SolverConfig& base) {
  if (!std::is_sorted(epsilon_rel.begin(), epsilon_rel.end(), std::greater<double>()))
    throw ValidationError("epsilon sweep list must be sorted descending");
  std::vector<std::pair<double, double>> out;
  Eigen::VectorXd prev;
  for (double eps : epsilon_rel) {
    SolverConfig config = base;
    config.build.epsilon_rel = eps;
    const SolverResult r = solve(feeder, config);
    Eigen::VectorXd mag = r.v.cwiseAbs();
    if (prev.size()) out.emplace_back(eps, (mag - prev).cwiseAbs().maxCoeff());
    prev = std::move(mag);
  }
  return out;
}

std::map<std::string, Vec> recover_regulator_internal_voltages(const Feeder& feeder,
                                                               const PhaseIndexMap& index,
                                                               const Vec& v,
                                                               const BuildOptions& options) {
  std::map<std::string, Vec> out;
  const int slack = index.slack_position();
  auto voltage_at = [&](int bus) -> Vec {
    if (bus == slack) return feeder.v_slack;
    return v.segment(index.bus_offset(bus), index.bus_width(bus));
  };

  for (const Edge& e : feeder.edges) {
    if (!e.is_svr()) continue;
    const auto& spec = std::get<RegulatorSpec>(e.element);
    const int n = feeder.bus_position(e.from);
    const int m = feeder.bus_position(e.to);
    const Vec vn_full = voltage_at(n);
    const PhaseSet n_phases = feeder.buses[static_cast<size_t>(n)].phases;
    Vec vn(spec.phases.size());
    int r = 0;
    for (Phase p : spec.phases) vn(r++) = vn_full(n_phases.index_of(p));
    const Vec vm = voltage_at(m);
    const SeriesBlocks line =
        line_blocks(spec.line, spec.phases, feeder.buses[static_cast<size_t>(m)].phases);
    const SvrGains g = svr_gain_matrices(spec);
    const bool ideal = options.ideal_svr || g.z_r.cwiseAbs().maxCoeff() == 0.0;
    Vec i_line = line.self_from * (g.a_i.transpose() * vn) - line.mutual_from * vm;
    if (!ideal) {
      const Mat eye = Mat::Identity(spec.phases.size(), spec.phases.size());
      const Mat f = eye + line.self_from * g.a_i.transpose() * g.z_r * g.a_i;
      i_line = f.fullPivLu().solve(i_line);
      out[e.id] = g.a_i.transpose() * (vn - g.z_r * (g.a_i * i_line));
    } else {
      out[e.id] = g.a_i.transpose() * vn;
    }
  }
  return out;
}

}  // namespace feederflow
