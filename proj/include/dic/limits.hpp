#pragma once

#include <string>
#include <vector>

namespace dic {

enum class LimitGait { Trot, Pronk };

// Maximum longitudinal distance between successive foot placements at cycle
// frequency f and body velocity v: v/f for pronking, v/(2f) for trotting.
double maxStride(LimitGait gait, double f, double v);

// Upper bound on the probability of crossing a randomly placed gap of width
// h blind at constant velocity; decays linearly from 1 at h=0 to 0 at the
// max stride, clamped to [0, 1].
double blindBound(LimitGait gait, double f, double v, double h);

// Same bound with local foothold adaptation of up to delta per foot: the
// effective gap width shrinks by 2*delta. (The pronk coefficient mirrors the
// blind case.)
double fpaBound(LimitGait gait, double f, double v, double h, double delta);

struct StrideTableRow {
  double f, v;
  double trot_cm, pronk_cm;
};

// The four (f, v) combinations of the reference stride-limit table.
std::vector<StrideTableRow> strideLimitTable();

std::string formatStrideLimitTable();

}  // namespace dic
