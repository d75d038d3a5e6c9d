#include "vservo/filter.hpp"

#include <cmath>

#include "vservo/error.hpp"

namespace vservo {

MovingAverageFilter::MovingAverageFilter(std::size_t capacity) {
  if (capacity == 0) throw InvalidArgument("filter capacity must be at least 1");
  slots_.assign(capacity, Slot{});
}

void MovingAverageFilter::push(const NormalizedCommand& cmd) {
  push(Slot{cmd.r_n, cmd.phi_n});
}

void MovingAverageFilter::push(const Slot& slot) {
  if (!std::isfinite(slot.r.x) || !std::isfinite(slot.r.y) || !std::isfinite(slot.phi)) {
    throw InvalidArgument("filter input must be finite");
  }
  slots_[write_index_] = slot;
  write_index_ = (write_index_ + 1) % slots_.size();
}

FilteredCommand MovingAverageFilter::mean() const {
  const double inv = 1.0 / static_cast<double>(slots_.size());
  FilteredCommand out;
  for (const auto& s : slots_) {
    out.r.x += inv * s.r.x;
    out.r.y += inv * s.r.y;
    out.phi += inv * s.phi;
  }
  return out;
}

void MovingAverageFilter::reset() {
  slots_.assign(slots_.size(), Slot{});
  write_index_ = 0;
}

std::vector<MovingAverageFilter::Slot> MovingAverageFilter::ordered() const {
  std::vector<Slot> out;
  out.reserve(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    out.push_back(slots_[(write_index_ + i) % slots_.size()]);
  }
  return out;
}

}  // namespace vservo
