#pragma once

#include <vector>

#include "rotor/model.hpp"

namespace rotor {

enum class SegmentShape { constant, linear, smoothstep };

// One piece of a drive schedule. Durations are in seconds; the drive
// interpolates from start to end according to shape.
struct Segment {
  double duration = 0.0;
  SegmentShape shape = SegmentShape::constant;
  DrivePoint start;
  DrivePoint end;
};

struct DriveSchedule {
  std::vector<Segment> segments;

  double total_duration() const;
};

// Drive at fractional position u in [0, 1] within a segment.
DrivePoint interpolate(const Segment& seg, double u);

}  // namespace rotor
