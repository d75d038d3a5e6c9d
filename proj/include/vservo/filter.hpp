#pragma once

#include <cstddef>
#include <vector>

#include "vservo/geometry.hpp"

namespace vservo {

/// Output of the moving average: filtered direction and orientation.
struct FilteredCommand {
  Vec2 r;
  double phi = 0.0;
};

/// Fixed-size ring of normalized commands, zero-filled on construction.
///
/// The mean is taken over all N slots, including the zeros that have not
/// been overwritten yet, so the first N outputs ramp up from zero.
class MovingAverageFilter {
 public:
  struct Slot {
    Vec2 r;
    double phi = 0.0;
    constexpr bool operator==(const Slot&) const = default;
  };

  explicit MovingAverageFilter(std::size_t capacity = 5);

  /// Overwrites the oldest slot.
  void push(const NormalizedCommand& cmd);
  void push(const Slot& slot);

  FilteredCommand mean() const;

  /// Refill every slot with zeros.
  void reset();

  std::size_t capacity() const { return slots_.size(); }
  std::size_t write_index() const { return write_index_; }

  /// Slots from oldest to newest.
  std::vector<Slot> ordered() const;

 private:
  std::vector<Slot> slots_;
  std::size_t write_index_ = 0;
};

}  // namespace vservo
