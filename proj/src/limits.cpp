#include "dic/limits.hpp"

#include <algorithm>
#include <cstdio>

namespace dic {

double maxStride(LimitGait gait, double f, double v) {
  return gait == LimitGait::Pronk ? v / f : v / (2.0 * f);
}

double blindBound(LimitGait gait, double f, double v, double h) {
  const double coef = gait == LimitGait::Trot ? 2.0 * f : f;
  return std::clamp(1.0 - coef * h / v, 0.0, 1.0);
}

double fpaBound(LimitGait gait, double f, double v, double h, double delta) {
  const double coef = gait == LimitGait::Trot ? 2.0 * f : f;
  const double h_eff = std::max(0.0, h - 2.0 * delta);
  return std::clamp(1.0 - coef * h_eff / v, 0.0, 1.0);
}

std::vector<StrideTableRow> strideLimitTable() {
  std::vector<StrideTableRow> rows;
  for (double f : {3.0, 4.0}) {
    for (double v : {0.5, 1.0}) {
      rows.push_back({f, v, 100.0 * maxStride(LimitGait::Trot, f, v),
                      100.0 * maxStride(LimitGait::Pronk, f, v)});
    }
  }
  return rows;
}

std::string formatStrideLimitTable() {
  std::string out;
  char buf[128];
  out += "cycle_freq_hz  body_velocity_mps  trot_cm  pronk_cm\n";
  for (const auto& r : strideLimitTable()) {
    std::snprintf(buf, sizeof(buf), "%-13.0f  %-17.1f  %-7.1f  %-8.1f\n", r.f, r.v,
                  r.trot_cm, r.pronk_cm);
    out += buf;
  }
  return out;
}

}  // namespace dic
