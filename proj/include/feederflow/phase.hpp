#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "feederflow/errors.hpp"

namespace feederflow {

/// One of the three phases. The total order a < b < c fixes every matrix
/// row/column layout in the library.
enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

constexpr std::array<Phase, 3> kAllPhases{Phase::A, Phase::B, Phase::C};

inline char phase_char(Phase p) { return "abc"[static_cast<int>(p)]; }

/// Ordered subset of {a, b, c}, iterated in phase order.
class PhaseSet {
 public:
  constexpr PhaseSet() = default;

  static constexpr PhaseSet abc() { return PhaseSet{0b111}; }

  static PhaseSet of(std::initializer_list<Phase> phases) {
    PhaseSet s;
    for (Phase p : phases) s.mask_ |= bit(p);
    return s;
  }

  /// Parses strings like "abc", "bc", "a". Order in the string is ignored.
  static PhaseSet parse(std::string_view text) {
    PhaseSet s;
    for (char c : text) {
      switch (c) {
        case 'a': s.mask_ |= bit(Phase::A); break;
        case 'b': s.mask_ |= bit(Phase::B); break;
        case 'c': s.mask_ |= bit(Phase::C); break;
        default:
          throw ValidationError("invalid phase character '" + std::string(1, c) +
                                "' in phase set \"" + std::string(text) + "\"");
      }
    }
    if (s.empty()) throw ValidationError("empty phase set");
    return s;
  }

  bool contains(Phase p) const { return mask_ & bit(p); }
  bool empty() const { return mask_ == 0; }
  int size() const { return (mask_ & 1) + ((mask_ >> 1) & 1) + ((mask_ >> 2) & 1); }

  bool subset_of(PhaseSet other) const { return (mask_ & ~other.mask_) == 0; }

  PhaseSet intersect(PhaseSet other) const { return PhaseSet{static_cast<std::uint8_t>(mask_ & other.mask_)}; }
  PhaseSet unite(PhaseSet other) const { return PhaseSet{static_cast<std::uint8_t>(mask_ | other.mask_)}; }

  /// Position of phase p within this set (0-based), or -1 when absent.
  int index_of(Phase p) const {
    if (!contains(p)) return -1;
    int idx = 0;
    for (Phase q : kAllPhases) {
      if (q == p) return idx;
      if (contains(q)) ++idx;
    }
    return -1;
  }

  /// Phase at position i (0-based, phase-ordered).
  Phase at(int i) const {
    int idx = 0;
    for (Phase q : kAllPhases) {
      if (contains(q)) {
        if (idx == i) return q;
        ++idx;
      }
    }
    throw ValidationError("phase index out of range");
  }

  std::string str() const {
    std::string s;
    for (Phase q : kAllPhases)
      if (contains(q)) s += phase_char(q);
    return s;
  }

  bool operator==(const PhaseSet&) const = default;

  class iterator {
   public:
    iterator(std::uint8_t mask, int pos) : mask_(mask), pos_(pos) { advance(); }
    Phase operator*() const { return static_cast<Phase>(pos_); }
    iterator& operator++() {
      ++pos_;
      advance();
      return *this;
    }
    bool operator!=(const iterator& o) const { return pos_ != o.pos_; }

   private:
    void advance() {
      while (pos_ < 3 && !(mask_ & (1u << pos_))) ++pos_;
    }
    std::uint8_t mask_;
    int pos_;
  };

  iterator begin() const { return iterator(mask_, 0); }
  iterator end() const { return iterator(mask_, 3); }

 private:
  constexpr explicit PhaseSet(std::uint8_t mask) : mask_(mask) {}
  static constexpr std::uint8_t bit(Phase p) { return static_cast<std::uint8_t>(1u << static_cast<int>(p)); }
  std::uint8_t mask_ = 0;
};

}  // namespace feederflow
