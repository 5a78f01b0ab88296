#include "feederflow/loads.hpp"

#include <cmath>

namespace feederflow {

namespace {

struct Portions {
  bool pq = true, current = true, impedance = true;
};

void guard_magnitude(double mag, const std::string& what) {
  if (mag <= kVoltageGuard)
    throw DivergenceError("voltage collapse guard: " + what + " magnitude " + std::to_string(mag) +
                          " pu below " + std::to_string(kVoltageGuard));
}

Vec wye_injection(const WyeZip& load, PhaseSet omega, const Vec& v, Portions which) {
  Vec i = Vec::Zero(omega.size());
  int r = 0;
  for (Phase p : omega) {
    const int k = static_cast<int>(p);
    const cx vp = v(r);
    if (which.pq && load.s[k] != cx{}) {
      guard_magnitude(std::abs(vp), "phase " + std::string(1, phase_char(p)) + " voltage");
      i(r) += -std::conj(load.s[k] / vp);
    }
    if (which.current && load.i[k] != cx{}) {
      if (load.fixed_phasor_current) {
        i(r) += load.i[k];
      } else {
        guard_magnitude(std::abs(vp), "phase " + std::string(1, phase_char(p)) + " voltage");
        i(r) += -(vp / std::abs(vp)) * load.i[k];
      }
    }
    if (which.impedance) i(r) += -load.y[k] * vp;
    ++r;
  }
  return i;
}

Vec delta_injection(const DeltaZip& load, PhaseSet omega, const Vec& v, Portions which) {
  Vec i = Vec::Zero(omega.size());
  for (int k = 0; k < 3; ++k) {
    auto [p, q] = pair_phases(k);
    if (!omega.contains(p) || !omega.contains(q)) continue;
    const int rp = omega.index_of(p);
    const int rq = omega.index_of(q);
    const cx d = v(rp) - v(rq);
    const bool loaded_pq = which.pq && load.s[k] != cx{};
    const bool loaded_i = which.current && load.i[k] != cx{} && !load.fixed_phasor_current;
    if (loaded_pq || loaded_i)
      guard_magnitude(std::abs(d), std::string("pair ") + pair_name(k) + " voltage");
    if (loaded_pq) {
      const cx c = std::conj(load.s[k] / d);
      i(rp) += -c;
      i(rq) += c;
    }
    if (which.current && load.i[k] != cx{}) {
      const cx c = load.fixed_phasor_current ? load.i[k] : -(d / std::abs(d)) * load.i[k];
      i(rp) += c;
      i(rq) += -c;
    }
    if (which.impedance && load.y[k] != cx{}) {
      const cx c = -load.y[k] * d;
      i(rp) += c;
      i(rq) += -c;
    }
  }
  return i;
}

Vec eval(const ZipLoad& load, PhaseSet omega, const Vec& v, Portions which) {
  if (v.size() != omega.size()) throw ValidationError("voltage vector size does not match phase set");
  if (const auto* wye = std::get_if<WyeZip>(&load)) return wye_injection(*wye, omega, v, which);
  return delta_injection(std::get<DeltaZip>(load), omega, v, which);
}

}  // namespace

Vec injection_current(const ZipLoad& load, PhaseSet omega, const Vec& v) {
  return eval(load, omega, v, Portions{});
}

Vec injection_current_pqi(const ZipLoad& load, PhaseSet omega, const Vec& v) {
  return eval(load, omega, v, Portions{.pq = true, .current = true, .impedance = false});
}

Mat load_admittance_block(const ZipLoad& load, PhaseSet omega) {
  Mat y = Mat::Zero(omega.size(), omega.size());
  if (const auto* wye = std::get_if<WyeZip>(&load)) {
    int r = 0;
    for (Phase p : omega) {
      y(r, r) = wye->y[static_cast<int>(p)];
      ++r;
    }
    return y;
  }
  const auto& delta = std::get<DeltaZip>(load);
  for (int k = 0; k < 3; ++k) {
    auto [p, q] = pair_phases(k);
    if (!omega.contains(p) || !omega.contains(q)) continue;
    const int rp = omega.index_of(p);
    const int rq = omega.index_of(q);
    y(rp, rp) += delta.y[k];
    y(rq, rq) += delta.y[k];
    y(rp, rq) -= delta.y[k];
    y(rq, rp) -= delta.y[k];
  }
  return y;
}

LoadAdmittance assemble_load_admittance(const Feeder& feeder, const PhaseIndexMap& index) {
  LoadAdmittance out;
  out.bus_blocks.resize(feeder.buses.size());
  for (size_t i = 0; i < feeder.buses.size(); ++i) {
    if (static_cast<int>(i) == index.slack_position()) continue;
    const Bus& b = feeder.buses[i];
    out.bus_blocks[i] = b.load ? load_admittance_block(*b.load, b.phases)
                               : Mat::Zero(b.phases.size(), b.phases.size());
  }
  return out;
}

Eigen::SparseMatrix<cx> LoadAdmittance::to_sparse(const PhaseIndexMap& index) const {
  std::vector<Eigen::Triplet<cx>> triplets;
  for (size_t i = 0; i < bus_blocks.size(); ++i) {
    const Mat& blk = bus_blocks[i];
    if (blk.size() == 0) continue;
    const int off = index.bus_offset(static_cast<int>(i));
    for (int r = 0; r < blk.rows(); ++r)
      for (int c = 0; c < blk.cols(); ++c)
        if (blk(r, c) != cx{}) triplets.emplace_back(off + r, off + c, blk(r, c));
  }
  Eigen::SparseMatrix<cx> m(index.size(), index.size());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Mat LoadAdmittance::to_dense(const PhaseIndexMap& index) const {
  Mat m = Mat::Zero(index.size(), index.size());
  for (size_t i = 0; i < bus_blocks.size(); ++i) {
    const Mat& blk = bus_blocks[i];
    if (blk.size() == 0) continue;
    const int off = index.bus_offset(static_cast<int>(i));
    m.block(off, off, blk.rows(), blk.cols()) = blk;
  }
  return m;
}

Vec stacked_injection_pqi(const Feeder& feeder, const PhaseIndexMap& index, const Vec& v) {
  Vec i = Vec::Zero(index.size());
  for (size_t b = 0; b < feeder.buses.size(); ++b) {
    if (static_cast<int>(b) == index.slack_position()) continue;
    const Bus& bus = feeder.buses[b];
    if (!bus.load) continue;
    const int off = index.bus_offset(static_cast<int>(b));
    const int w = index.bus_width(static_cast<int>(b));
    i.segment(off, w) = injection_current_pqi(*bus.load, bus.phases, v.segment(off, w));
  }
  return i;
}

}  // namespace feederflow
