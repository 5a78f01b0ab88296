#include "feederflow/index_map.hpp"

#include <deque>

namespace feederflow {

PhaseIndexMap PhaseIndexMap::build(const Feeder& feeder) {
  feeder.validate();
  PhaseIndexMap map;
  map.slack_pos_ = feeder.slack_position();
  map.offsets_.resize(feeder.buses.size(), -1);
  map.widths_.resize(feeder.buses.size(), 0);
  int next = 0;
  for (size_t i = 0; i < feeder.buses.size(); ++i) {
    const Bus& b = feeder.buses[i];
    if (static_cast<int>(i) == map.slack_pos_) continue;
    map.offsets_[i] = next;
    map.widths_[i] = b.phases.size();
    for (Phase p : b.phases) map.inverse_.emplace_back(static_cast<int>(i), p);
    next += b.phases.size();
  }
  map.total_ = next;
  return map;
}

int PhaseIndexMap::index_of(int bus_pos, Phase p) const {
  int off = offsets_[static_cast<size_t>(bus_pos)];
  if (off < 0) return -1;
  int j = off;
  for (int k = 0; k < widths_[static_cast<size_t>(bus_pos)]; ++k, ++j)
    if (inverse_[static_cast<size_t>(j)].second == p) return j;
  return -1;
}

std::pair<int, Phase> PhaseIndexMap::locate(int j) const {
  if (j < 0 || j >= total_) throw ValidationError("linear index out of range");
  return inverse_[static_cast<size_t>(j)];
}

Mat embed_block(const Mat& block, PhaseSet block_phases, PhaseSet row_set, PhaseSet col_set) {
  if (!block_phases.subset_of(row_set) || !block_phases.subset_of(col_set))
    throw ValidationError("block phase set not a subset of the target row/column sets");
  const int n = block_phases.size();
  if (block.rows() != n || block.cols() != n)
    throw ValidationError("block dimensions do not match its phase set");
  Mat out = Mat::Zero(row_set.size(), col_set.size());
  int r = 0;
  for (Phase pr : block_phases) {
    int c = 0;
    for (Phase pc : block_phases) {
      out(row_set.index_of(pr), col_set.index_of(pc)) = block(r, c);
      ++c;
    }
    ++r;
  }
  return out;
}

std::vector<std::array<bool, 3>> check_phase_connectivity(const Feeder& feeder) {
  const int n = static_cast<int>(feeder.buses.size());
  std::vector<std::array<bool, 3>> reach(static_cast<size_t>(n), {false, false, false});
  const int slack = feeder.slack_position();

  // Adjacency with per-edge phase sets; one BFS per phase.
  std::vector<std::vector<std::pair<int, PhaseSet>>> adj(static_cast<size_t>(n));
  for (const Edge& e : feeder.edges) {
    int a = feeder.bus_position(e.from);
    int b = feeder.bus_position(e.to);
    adj[static_cast<size_t>(a)].emplace_back(b, e.phases);
    adj[static_cast<size_t>(b)].emplace_back(a, e.phases);
  }

  for (Phase p : kAllPhases) {
    std::deque<int> queue{slack};
    std::vector<bool> seen(static_cast<size_t>(n), false);
    seen[static_cast<size_t>(slack)] = true;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (const auto& [v, phases] : adj[static_cast<size_t>(u)]) {
        if (!phases.contains(p) || seen[static_cast<size_t>(v)]) continue;
        seen[static_cast<size_t>(v)] = true;
        queue.push_back(v);
      }
    }
    for (int i = 0; i < n; ++i)
      reach[static_cast<size_t>(i)][static_cast<int>(p)] =
          seen[static_cast<size_t>(i)] && feeder.buses[static_cast<size_t>(i)].phases.contains(p);
  }
  return reach;
}

}  // namespace feederflow
