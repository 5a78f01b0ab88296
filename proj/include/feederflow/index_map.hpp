#pragma once

#include <span>
#include <utility>
#include <vector>

#include "feederflow/model.hpp"

namespace feederflow {

/// Bijection between (bus, phase) pairs of the non-slack buses and the
/// linear indices 0..J-1. Indices of one bus are contiguous and
/// phase-ordered; buses appear in feeder order.
class PhaseIndexMap {
 public:
  static PhaseIndexMap build(const Feeder& feeder);

  int size() const { return total_; }  // J

  /// Linear index of (bus position, phase); -1 when the phase is absent or
  /// the bus is the slack.
  int index_of(int bus_pos, Phase p) const;

  /// Inverse lookup: (bus position, phase) for linear index j.
  std::pair<int, Phase> locate(int j) const;

  int bus_offset(int bus_pos) const { return offsets_[static_cast<size_t>(bus_pos)]; }
  int bus_width(int bus_pos) const { return widths_[static_cast<size_t>(bus_pos)]; }

  int slack_position() const { return slack_pos_; }
  int bus_count() const { return static_cast<int>(offsets_.size()); }

 private:
  std::vector<int> offsets_;  // per bus position; -1 for the slack bus
  std::vector<int> widths_;
  std::vector<std::pair<int, Phase>> inverse_;
  int total_ = 0;
  int slack_pos_ = -1;
};

/// Zero-pads a block given over `block_phases` into the (row_set x col_set)
/// frame. Rows/columns of phases outside the block stay zero.
Mat embed_block(const Mat& block, PhaseSet block_phases, PhaseSet row_set, PhaseSet col_set);

/// Per-(bus, phase) flag: true iff a path of edges all carrying that phase
/// connects the slack bus to the bus. Indexed by bus position, then Phase.
std::vector<std::array<bool, 3>> check_phase_connectivity(const Feeder& feeder);

}  // namespace feederflow
