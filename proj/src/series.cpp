#include "feederflow/series.hpp"

#include <Eigen/LU>
#include <cmath>

namespace feederflow {

namespace {

constexpr double kSymmetryRelTol = 1e-9;
constexpr double kConditionGuard = 1e12;

/// Validates symmetry within a relative tolerance, then returns the exactly
/// symmetrized matrix. Data files carry rounded entries, so small defects
/// are averaged away rather than rejected.
Mat require_symmetric(const Mat& m, const std::string& what) {
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-30);
  const double defect = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (defect > kSymmetryRelTol * scale)
    throw ValidationError(what + ": asymmetry " + std::to_string(defect / scale) +
                          " exceeds relative tolerance 1e-9");
  return 0.5 * (m + Mat(m.transpose()));
}

Mat checked_inverse(const Mat& m, const std::string& what) {
  Eigen::FullPivLU<Mat> lu(m);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible())
    throw SingularMatrixError(what + ": matrix is numerically singular");
  Mat inv = lu.inverse();
  if (!inv.allFinite() || inv.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff() > kConditionGuard)
    throw SingularMatrixError(what + ": condition estimate exceeds 1e12");
  return inv;
}

Mat symmetrize(Mat m) { return 0.5 * (m + Mat(m.transpose())); }

double arm_ratio(const RegulatorSpec& spec, int arm) { return regulator_ratio(spec.taps[static_cast<size_t>(arm)], spec.type); }

}  // namespace

std::pair<cx, cx> BuildOptions::epsilon_for(cx y_t) const {
  const double eps = epsilon_rel * std::abs(y_t);
  if (mode == EpsilonMode::Resistive) return {cx{eps, 0.0}, cx{eps / 2.0, 0.0}};
  return {cx{0.0, -eps}, cx{0.0, -eps / 2.0}};
}

SeriesBlocks line_blocks(const LineSpec& spec, PhaseSet omega_n, PhaseSet omega_m) {
  if (!spec.phases.subset_of(omega_n) || !spec.phases.subset_of(omega_m))
    throw ValidationError("line phases not a subset of both endpoint phase sets");
  const Mat z = require_symmetric(spec.z, "line Z");
  const Mat ys = require_symmetric(spec.y_shunt, "line Y_shunt");
  Mat zinv = symmetrize(checked_inverse(z, "line Z"));
  Mat self = symmetrize(0.5 * ys + zinv);

  SeriesBlocks b;
  b.from_phases = omega_n;
  b.to_phases = omega_m;
  b.self_from = embed_block(self, spec.phases, omega_n, omega_n);
  b.self_to = embed_block(self, spec.phases, omega_m, omega_m);
  b.mutual_from = embed_block(zinv, spec.phases, omega_n, omega_m);
  b.mutual_to = b.mutual_from.transpose();
  return b;
}

TransformerMatrices transformer_matrices(cx y_t) {
  if (y_t == cx{}) throw ValidationError("transformer leakage admittance must be nonzero");
  TransformerMatrices m;
  m.y1 = y_t * Eigen::Matrix3cd::Identity();
  m.y2 << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  m.y2 *= y_t / 3.0;
  m.y3 << -1, 1, 0, 0, -1, 1, 1, 0, -1;
  m.y3 *= y_t / std::sqrt(3.0);
  m.y4 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  m.y4 *= y_t / 3.0;
  m.y5 = y_t * Eigen::Matrix2cd::Identity();
  m.y6 << -1, 1, 0, 0, -1, 1;
  m.y6 *= y_t / std::sqrt(3.0);
  return m;
}

SeriesBlocks transformer_blocks(const TransformerSpec& spec, PhaseSet omega_n, PhaseSet omega_m) {
  const TransformerMatrices m = transformer_matrices(spec.y_t);
  const Eigen::Matrix3cd eye = Eigen::Matrix3cd::Identity();
  const Eigen::Matrix3cd y2p = m.y2 + spec.eps_self * eye;
  const Eigen::Matrix3cd y2pp = m.y2 + spec.eps_mutual * eye;
  const Eigen::Matrix3cd y4p = m.y4 + spec.eps_self * eye;
  const Eigen::Matrix3cd y4pp = m.y4 + spec.eps_mutual * eye;

  SeriesBlocks b;
  b.from_phases = omega_n;
  b.to_phases = omega_m;

  if (spec.connection == XfmrConnection::OpenWyeOpenDelta) {
    const PhaseSet ab = PhaseSet::of({Phase::A, Phase::B});
    if (!ab.subset_of(omega_n) || omega_m != PhaseSet::abc())
      throw ValidationError("open-wye--open-delta requires phases ab on the open-wye side and abc opposite");
    b.self_from = embed_block(m.y5, ab, omega_n, omega_n);
    b.self_to = y4p;
    // y6 maps the three delta-side phases to the two open-wye phases.
    Mat mutual = Mat::Zero(omega_n.size(), 3);
    mutual.row(omega_n.index_of(Phase::A)) = -m.y6.row(0);
    mutual.row(omega_n.index_of(Phase::B)) = -m.y6.row(1);
    b.mutual_from = mutual;
    b.mutual_to = mutual.transpose();
    return b;
  }

  if (omega_n != PhaseSet::abc() || omega_m != PhaseSet::abc())
    throw ValidationError("transformer connection requires three phases at both endpoints");

  auto set = [&](const Eigen::Matrix3cd& self_n, const Eigen::Matrix3cd& mutual_n,
                 const Eigen::Matrix3cd& self_m) {
    b.self_from = self_n;
    b.mutual_from = mutual_n;
    b.self_to = self_m;
    b.mutual_to = mutual_n.transpose();
  };

  switch (spec.connection) {
    case XfmrConnection::WyeGWyeG: set(m.y1, m.y1, m.y1); break;
    case XfmrConnection::WyeGWye:
    case XfmrConnection::WyeWye:
    case XfmrConnection::DeltaDelta: set(y2p, y2pp, y2p); break;
    case XfmrConnection::WyeGDelta: set(m.y1, -m.y3, y2p); break;
    case XfmrConnection::WyeDelta: set(y2p, -m.y3, y2p); break;
    case XfmrConnection::OpenDeltaOpenDelta: set(y4p, y4pp, y4p); break;
    default: throw ValidationError("unknown transformer connection");
  }
  return b;
}

double regulator_ratio(int tap, SvrType type) {
  if (tap < -16 || tap > 16) throw ValidationError("regulator tap out of range [-16, 16]");
  const double step = 0.00625 * tap;
  return type == SvrType::B ? 1.0 - step : 1.0 + step;
}

SvrGains svr_gain_matrices(const RegulatorSpec& spec) {
  Eigen::Matrix3cd av = Eigen::Matrix3cd::Identity();
  Eigen::Matrix3cd ai = Eigen::Matrix3cd::Identity();
  Eigen::Matrix3cd zr = Eigen::Matrix3cd::Zero();

  switch (spec.config) {
    case SvrConfig::Wye: {
      for (int k = 0; k < 3; ++k) {
        const double a = arm_ratio(spec, k);
        av(k, k) = a;
        ai(k, k) = 1.0 / a;
        zr(k, k) = spec.z_r[static_cast<size_t>(k)];
      }
      break;
    }
    case SvrConfig::ClosedDelta: {
      const double aab = arm_ratio(spec, 0), abc = arm_ratio(spec, 1), aca = arm_ratio(spec, 2);
      av << aab, 1 - aab, 0, 0, abc, 1 - abc, 1 - aca, 0, aca;
      Eigen::Matrix3cd pre;
      pre << aab, 0, 1 - aca, 1 - aab, abc, 0, 0, 1 - abc, aca;
      ai = checked_inverse(pre, "closed-delta current gain pre-inverse");
      for (int k = 0; k < 3; ++k) zr(k, k) = spec.z_r[static_cast<size_t>(k)];
      break;
    }
    case SvrConfig::OpenDelta: {
      const double aab = arm_ratio(spec, 0), acb = arm_ratio(spec, 2);
      av << aab, 1 - aab, 0, 0, 1, 0, 0, 1 - acb, acb;
      ai << 1.0 / aab, 0, 0, 1 - 1.0 / aab, 1, 1 - 1.0 / acb, 0, 0, 1.0 / acb;
      zr(0, 0) = spec.z_r[0];
      zr(2, 2) = spec.z_r[2];
      break;
    }
  }

  if (spec.type == SvrType::A) {
    // Type A uses the inverse current gain; a_i^-1 = a_v^T, so the swap
    // stays exact and a_v a_i^T = I is preserved. The ratio sign is already
    // flipped by regulator_ratio.
    Eigen::Matrix3cd av_b = av;
    av = ai.transpose();
    ai = av_b.transpose();
  }

  SvrGains g;
  const int n = spec.phases.size();
  g.a_v = Mat::Zero(n, n);
  g.a_i = Mat::Zero(n, n);
  g.z_r = Mat::Zero(n, n);
  int r = 0;
  for (Phase pr : spec.phases) {
    int c = 0;
    for (Phase pc : spec.phases) {
      g.a_v(r, c) = av(static_cast<int>(pr), static_cast<int>(pc));
      g.a_i(r, c) = ai(static_cast<int>(pr), static_cast<int>(pc));
      g.z_r(r, c) = zr(static_cast<int>(pr), static_cast<int>(pc));
      ++c;
    }
    ++r;
  }
  return g;
}

SeriesBlocks svr_blocks(const RegulatorSpec& spec, PhaseSet omega_n, PhaseSet omega_m,
                        bool ideal_svr) {
  if (!spec.phases.subset_of(omega_n))
    throw ValidationError("regulator phases must be available at the primary bus");
  // Work in the regulator frame, then zero-pad the primary side into the bus
  // frame (same convention as lines with missing phases).
  const SeriesBlocks line = line_blocks(spec.line, spec.phases, omega_m);
  const SvrGains g = svr_gain_matrices(spec);

  const bool ideal = ideal_svr || g.z_r.cwiseAbs().maxCoeff() == 0.0;

  Mat self_n, mutual_n, self_m;
  if (ideal) {
    self_n = symmetrize(g.a_i * line.self_from * g.a_i.transpose());
    mutual_n = g.a_i * line.mutual_from;
    self_m = line.self_to;
  } else {
    const Mat eye = Mat::Identity(spec.phases.size(), spec.phases.size());
    const Mat atza = g.a_i.transpose() * g.z_r * g.a_i;
    const Mat f = eye + line.self_from * atza;
    Mat finv;
    try {
      finv = checked_inverse(f, "regulator F_R");
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError(
          "regulator F_R numerically singular: requires Re[Z] of the regulator line positive "
          "definite and nonnegative-resistance regulator impedances");
    }
    self_n = symmetrize(g.a_i * finv * line.self_from * g.a_i.transpose());
    mutual_n = g.a_i * finv * line.mutual_from;
    self_m = symmetrize(line.self_to - line.mutual_to * atza * finv * line.mutual_from);
  }

  SeriesBlocks b;
  b.from_phases = omega_n;
  b.to_phases = omega_m;
  b.self_from = embed_block(self_n, spec.phases, omega_n, omega_n);
  b.mutual_from = Mat::Zero(omega_n.size(), omega_m.size());
  for (Phase p : spec.phases)
    b.mutual_from.row(omega_n.index_of(p)) = mutual_n.row(spec.phases.index_of(p));
  b.self_to = self_m;
  b.mutual_to = b.mutual_from.transpose();
  return b;
}

SeriesBlocks edge_blocks(const Edge& edge, PhaseSet omega_n, PhaseSet omega_m,
                         const BuildOptions& options) {
  if (const auto* line = std::get_if<LineSpec>(&edge.element)) return line_blocks(*line, omega_n, omega_m);
  if (const auto* xfmr = std::get_if<TransformerSpec>(&edge.element)) {
    TransformerSpec spec = *xfmr;
    auto [eps_self, eps_mutual] = options.epsilon_for(spec.y_t);
    spec.eps_self = eps_self;
    spec.eps_mutual = eps_mutual;
    return transformer_blocks(spec, omega_n, omega_m);
  }
  return svr_blocks(std::get<RegulatorSpec>(edge.element), omega_n, omega_m, options.ideal_svr);
}

}  // namespace feederflow
