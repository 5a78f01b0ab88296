#include "feederflow/ybus.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <deque>
#include <sstream>

namespace feederflow {

namespace {

void accumulate(std::map<std::pair<int, int>, Mat>& blocks, int r, int c, const Mat& add) {
  auto it = blocks.find({r, c});
  if (it == blocks.end())
    blocks.emplace(std::make_pair(r, c), add);
  else
    it->second += add;
}

void accumulate(std::map<int, Mat>& blocks, int k, const Mat& add) {
  auto it = blocks.find(k);
  if (it == blocks.end())
    blocks.emplace(k, add);
  else
    it->second += add;
}

}  // namespace

YBusPartition assemble(const Feeder& feeder, const PhaseIndexMap& index,
                       const BuildOptions& options) {
  YBusPartition part;
  const int slack = index.slack_position();

  for (const Edge& e : feeder.edges) {
    const int n = feeder.bus_position(e.from);
    const int m = feeder.bus_position(e.to);
    const SeriesBlocks b =
        edge_blocks(e, feeder.buses[static_cast<size_t>(n)].phases,
                    feeder.buses[static_cast<size_t>(m)].phases, options);

    if (n != slack) accumulate(part.blocks, n, n, b.self_from);
    else part.ss += b.self_from;
    if (m != slack) accumulate(part.blocks, m, m, b.self_to);
    else part.ss += b.self_to;

    if (n != slack && m != slack) {
      accumulate(part.blocks, n, m, -b.mutual_from);
      accumulate(part.blocks, m, n, -b.mutual_to);
    } else if (m == slack) {
      accumulate(part.ns_blocks, n, -b.mutual_from);
      accumulate(part.sn_blocks, n, -b.mutual_to);
    } else {  // n == slack
      accumulate(part.ns_blocks, m, -b.mutual_to);
      accumulate(part.sn_blocks, m, -b.mutual_from);
    }
  }

  for (int i = 0; i < index.bus_count(); ++i) {
    if (i == slack) continue;
    const int w = index.bus_width(i);
    if (!part.blocks.count({i, i})) part.blocks.emplace(std::make_pair(i, i), Mat::Zero(w, w));
  }
  return part;
}

Mat YBusPartition::dense_y(const PhaseIndexMap& index) const {
  Mat y = Mat::Zero(index.size(), index.size());
  for (const auto& [key, blk] : blocks)
    y.block(index.bus_offset(key.first), index.bus_offset(key.second), blk.rows(), blk.cols()) = blk;
  return y;
}

Eigen::SparseMatrix<cx> YBusPartition::sparse_y(const PhaseIndexMap& index) const {
  std::vector<Eigen::Triplet<cx>> t;
  for (const auto& [key, blk] : blocks) {
    const int r0 = index.bus_offset(key.first);
    const int c0 = index.bus_offset(key.second);
    for (int r = 0; r < blk.rows(); ++r)
      for (int c = 0; c < blk.cols(); ++c)
        if (blk(r, c) != cx{}) t.emplace_back(r0 + r, c0 + c, blk(r, c));
  }
  Eigen::SparseMatrix<cx> y(index.size(), index.size());
  y.setFromTriplets(t.begin(), t.end());
  return y;
}

Mat YBusPartition::dense_ns(const PhaseIndexMap& index) const {
  Mat y = Mat::Zero(index.size(), 3);
  for (const auto& [bus, blk] : ns_blocks) y.block(index.bus_offset(bus), 0, blk.rows(), 3) = blk;
  return y;
}

Mat YBusPartition::dense_sn(const PhaseIndexMap& index) const {
  Mat y = Mat::Zero(3, index.size());
  for (const auto& [bus, blk] : sn_blocks) y.block(0, index.bus_offset(bus), 3, blk.cols()) = blk;
  return y;
}

double YBusPartition::symmetry_defect(const PhaseIndexMap& index) const {
  const Mat y = dense_y(index);
  return (y - y.transpose()).cwiseAbs().maxCoeff();
}

const AssumptionCheck* Diagnostics::find(const std::string& name) const {
  for (const auto& c : ledger)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

constexpr double kPsdTol = 1e-12;

double min_eig_sym(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

double max_eig_sym(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().maxCoeff();
}

bool graph_connected(const Feeder& feeder) {
  const int n = static_cast<int>(feeder.buses.size());
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (const Edge& e : feeder.edges) {
    int a = feeder.bus_position(e.from), b = feeder.bus_position(e.to);
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  std::vector<bool> seen(static_cast<size_t>(n), false);
  std::deque<int> q{feeder.slack_position()};
  seen[static_cast<size_t>(feeder.slack_position())] = true;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[static_cast<size_t>(u)])
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = true;
        ++count;
        q.push_back(v);
      }
  }
  return count == n;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Diagnostics check_invertibility(const Feeder& feeder, const PhaseIndexMap& index,
                                const YBusPartition& partition, const LoadAdmittance& load,
                                const BuildOptions& options) {
  Diagnostics d;
  d.mode = options.mode;
  d.dimension = index.size();
  const bool resistive = options.mode == EpsilonMode::Resistive;

  auto add = [&](const std::string& name, bool pass, const std::string& detail, bool gates = true) {
    d.ledger.push_back({name, pass, detail});
    if (gates && !pass) d.structural_pass = false;
  };
  d.structural_pass = true;

  // Per-element assumptions.
  bool lines_ok = true, eps_ok = true, xfmr_ok = true, svr_ok = true;
  std::string line_detail, eps_detail, xfmr_detail, svr_detail;
  for (const Edge& e : feeder.edges) {
    const LineSpec* line = std::get_if<LineSpec>(&e.element);
    if (!line && e.is_svr()) line = &std::get<RegulatorSpec>(e.element).line;
    if (line) {
      Mat zinv = line->z.inverse();
      if (resistive) {
        if (min_eig_sym(zinv.real()) <= 0.0 || min_eig_sym(line->y_shunt.real()) < -kPsdTol) {
          lines_ok = false;
          line_detail = "edge " + e.id + " violates Re[Z^-1] > 0 or Re[Y_shunt] >= 0";
        }
      } else {
        if (max_eig_sym(zinv.imag()) >= 0.0) {
          lines_ok = false;
          line_detail = "edge " + e.id + " violates Im[Z^-1] < 0";
        }
        if (line->y_shunt.cwiseAbs().maxCoeff() > 0.0) {
          lines_ok = false;
          line_detail = "edge " + e.id + " has line shunts (reactive mode requires none)";
        }
      }
    }
    if (const auto* xfmr = std::get_if<TransformerSpec>(&e.element)) {
      if (resistive ? xfmr->y_t.real() <= 0.0 : xfmr->y_t.imag() >= 0.0) {
        xfmr_ok = false;
        xfmr_detail = "edge " + e.id + (resistive ? " has Re[y_t] <= 0" : " has Im[y_t] >= 0");
      }
      auto [ep, epp] = options.epsilon_for(xfmr->y_t);
      const double e1 = resistive ? ep.real() : -ep.imag();
      const double e2 = resistive ? epp.real() : -epp.imag();
      const bool needs_mutual_gap = xfmr->connection == XfmrConnection::WyeGWye ||
                                    xfmr->connection == XfmrConnection::WyeWye ||
                                    xfmr->connection == XfmrConnection::DeltaDelta ||
                                    xfmr->connection == XfmrConnection::OpenDeltaOpenDelta;
      const bool needs_self = needs_mutual_gap || xfmr->connection == XfmrConnection::WyeGDelta ||
                              xfmr->connection == XfmrConnection::WyeDelta ||
                              xfmr->connection == XfmrConnection::OpenWyeOpenDelta;
      if (needs_mutual_gap ? !(e1 > e2 && e2 >= 0.0) : (needs_self && !(e1 > 0.0))) {
        eps_ok = false;
        eps_detail = "edge " + e.id + " regularization does not satisfy eps' > eps'' >= 0";
      }
    }
    if (e.is_svr()) {
      const auto& svr = std::get<RegulatorSpec>(e.element);
      const SvrGains g = svr_gain_matrices(svr);
      const Mat eye = Mat::Identity(g.a_v.rows(), g.a_v.cols());
      if ((g.a_v * g.a_i.transpose() - eye).cwiseAbs().maxCoeff() > 1e-12) {
        svr_ok = false;
        svr_detail = "edge " + e.id + " gain identity A_v A_i^T = I fails";
      }
      for (const cx& z : svr.z_r)
        if (z.real() < 0.0) {
          svr_ok = false;
          svr_detail = "edge " + e.id + " regulator impedance has negative resistance";
        }
    }
  }
  add(resistive ? "A1a line definiteness" : "A1a'' line definiteness (reactive)", lines_ok,
      lines_ok ? "all lines satisfy the definiteness assumptions" : line_detail);
  add("A1 regularization placement", eps_ok, eps_ok ? "eps' > eps'' >= 0 wherever required" : eps_detail);
  add("A2 connected graph", graph_connected(feeder), "");
  add(resistive ? "A3 non-ideal transformers" : "A3'' inductive transformers", xfmr_ok,
      xfmr_ok ? "" : xfmr_detail);

  bool all_three_phase = true;
  for (const Bus& b : feeder.buses) all_three_phase &= b.phases == PhaseSet::abc();
  for (const Edge& e : feeder.edges) all_three_phase &= e.phases == PhaseSet::abc();
  add("A4 all elements three-phase", all_three_phase, "informational; A4' is the binding variant",
      /*gates=*/false);

  bool paths_ok = true;
  const auto reach = check_phase_connectivity(feeder);
  for (size_t i = 0; i < feeder.buses.size(); ++i)
    for (Phase p : feeder.buses[i].phases)
      if (!reach[i][static_cast<int>(p)]) paths_ok = false;
  add("A4' per-phase paths from slack", paths_ok,
      paths_ok ? "" : "some (bus, phase) has no phase-carrying path from the slack bus");
  add("SVR gain identity and impedances", svr_ok, svr_ok ? "" : svr_detail);

  // Matrix-level diagnostics.
  const Mat y = partition.dense_y(index);
  d.symmetry_defect = (y - y.transpose()).cwiseAbs().maxCoeff();
  add("Y symmetric", d.symmetry_defect < 1e-12, "max |Y - Y^T| = " + fmt(d.symmetry_defect));

  if (resistive) {
    d.definiteness_eig = min_eig_sym(y.real());
    add("Re[Y] positive definite", d.definiteness_eig > 0.0,
        "min eig of symmetrized Re[Y] = " + fmt(d.definiteness_eig));
  } else {
    d.definiteness_eig = max_eig_sym(y.imag());
    add("Im[Y] negative definite", d.definiteness_eig < 0.0,
        "max eig of symmetrized Im[Y] = " + fmt(d.definiteness_eig));
  }

  const Mat yl = load.to_dense(index);
  const double yl_sym = (yl - yl.transpose()).cwiseAbs().maxCoeff();
  const double yl_eig = min_eig_sym(yl.real());
  add("Y_L symmetric with Re[Y_L] PSD", yl_sym < 1e-12 && yl_eig >= -kPsdTol,
      "defect " + fmt(yl_sym) + ", min eig " + fmt(yl_eig));

  Eigen::BDCSVD<Mat> svd_y(y);
  d.sigma_max_y = svd_y.singularValues().size() ? svd_y.singularValues()(0) : 0.0;
  d.sigma_min_y = svd_y.singularValues().size() ? svd_y.singularValues()(svd_y.singularValues().size() - 1) : 0.0;
  d.rank_y = static_cast<int>((svd_y.singularValues().array() > d.sigma_max_y * 1e-10).count());

  Eigen::BDCSVD<Mat> svd_yl(Mat(y + yl));
  d.sigma_max_yyl = svd_yl.singularValues().size() ? svd_yl.singularValues()(0) : 0.0;
  d.sigma_min_yyl =
      svd_yl.singularValues().size() ? svd_yl.singularValues()(svd_yl.singularValues().size() - 1) : 0.0;
  d.rank_yyl = static_cast<int>((svd_yl.singularValues().array() > d.sigma_max_yyl * 1e-10).count());

  add("Y numerically full rank", d.rank_y == d.dimension,
      "rank " + std::to_string(d.rank_y) + " of " + std::to_string(d.dimension) +
          ", sigma_min/sigma_max = " + fmt(d.sigma_max_y > 0 ? d.sigma_min_y / d.sigma_max_y : 0.0));
  add("Y + Y_L numerically full rank", d.rank_yyl == d.dimension,
      "rank " + std::to_string(d.rank_yyl) + " of " + std::to_string(d.dimension));

  return d;
}

}  // namespace feederflow
