#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dic/types.hpp"

namespace dic {

// Terrain varies only along x: flat segments at height zero separated by
// bottomless gaps. Segment kinds strictly alternate and both ends are flat.
struct GapWorld {
  enum class Kind { Flat, Gap };
  struct Segment {
    Kind kind;
    double width;
  };

  std::vector<Segment> segments;
  double origin_x = 0.0;
  uint64_t seed = 0;

  struct Interval {
    double left, right;
  };

  double totalWidth() const;
  double endX() const { return origin_x + totalWidth(); }
  // Gap intervals (left, right) in world coordinates, ascending.
  const std::vector<Interval>& gapIntervals() const { return gaps_; }
  size_t gapCount() const { return gaps_.size(); }

  // Call after filling segments manually; generateGapWorld does it for you.
  void finalize();

  std::vector<Interval> gaps_;  // cached by finalize()
};

inline constexpr double kGapWidthMin = 0.04;  // m

// Deterministic world from a seed: n_gaps gaps of width U[W_min, W_max]
// separated by flats of width U[0.5, 2.0]; the leading flat is also drawn
// from U[0.5, 2.0] so gap phase is randomized, the trailing flat is a fixed
// 2 m run-out. Throws InvalidWidthError if w_max < W_min.
GapWorld generateGapWorld(uint64_t seed, double w_max, int n_gaps);

// Same layout with gap widths drawn from U[w_min, w_max]; w_min == w_max
// gives fixed-width gaps (evaluation cells).
GapWorld generateGapWorldRange(uint64_t seed, double w_min, double w_max, int n_gaps);

struct HeightQuery {
  bool is_gap;
  double height;  // 0 on flat; meaningless over a gap
};

// Piecewise classification; flats are closed, gap interiors open. Points
// outside the world are flat (infinite aprons).
HeightQuery heightAt(const GapWorld& world, double x, double y);

// True iff [x - margin, x + margin] intersects no gap interior.
bool isSafeFoothold(const GapWorld& world, double x, double y, double margin);

// Row-major depth image, meters. Invalid pixels (no terrain return) keep the
// max-range value and valid=false.
struct DepthImage {
  int width = 0, height = 0;
  std::vector<double> data;
  std::vector<uint8_t> valid;

  double& at(int row, int col) { return data[static_cast<size_t>(row) * width + col]; }
  double at(int row, int col) const { return data[static_cast<size_t>(row) * width + col]; }
  bool validAt(int row, int col) const {
    return valid[static_cast<size_t>(row) * width + col] != 0;
  }
};

struct CameraIntrinsics {
  int width = 480, height = 360;
  double fx = 252.0, fy = 324.0;  // from 87 x 58 deg FOV at 480x360
  double cx = 240.0, cy = 180.0;
  double max_range = 10.0;  // m

  static CameraIntrinsics fromFov(int w, int h, double fov_x_deg, double fov_y_deg);
};

struct CameraPose {
  Vec3 position{0.19, 0.0, 0.28};  // world frame
  double pitch_down = 0.5236;      // rad, rotation of the optical axis below +x
  double yaw = 0.0;
};

// Per-pixel ray/heightfield intersection distance along the ray. Rays that
// hit a gap interior or leave the terrain are marked invalid with the
// max-range value stored.
DepthImage renderDepth(const GapWorld& world, const CameraPose& pose,
                       const CameraIntrinsics& intr);

// 480x360 -> nearest-neighbor downsample to 160x120, crop 20 left columns,
// clip to [0.1, 1.0] m, fill invalid pixels from the nearest valid pixel in
// the same row (1.0 if a row is entirely invalid). Throws BadShapeError on
// any other input shape.
DepthImage preprocessDepth(const DepthImage& raw);

inline constexpr double kDepthClipNear = 0.1;  // m
inline constexpr double kDepthClipFar = 1.0;   // m

// Body-centered elevation grid; cells over a gap carry the sentinel depth.
struct HeightmapWindow {
  static constexpr int kCellsX = 48;
  static constexpr int kCellsY = 15;
  static constexpr double kGapSentinel = -1.0;

  double pitch = 0.025;    // m per cell
  double origin_x = 0.0;   // world x of the first cell center
  double origin_y = 0.0;   // world y of the first cell center
  std::vector<double> cells;  // kCellsX * kCellsY, x-major

  double at(int ix, int iy) const { return cells[static_cast<size_t>(ix) * kCellsY + iy]; }
  double cellCenterX(int ix) const { return origin_x + ix * pitch; }
  bool isGapCell(int ix, int iy) const { return at(ix, iy) <= kGapSentinel + 0.5; }

  // Gap intervals implied by the sentinel cells of the center row, grown by
  // half a cell on each side (the edge can sit anywhere within the cell).
  std::vector<GapWorld::Interval> hazardIntervals() const;
};

// Sample the grid around the body; x_offset places the window start relative
// to the body (negative = slightly behind).
HeightmapWindow sampleHeightmap(const GapWorld& world, double body_x, double body_y,
                                double pitch = 0.025, double x_offset = -0.15);

// --- serialization ---

// 16-bit binary PGM in millimeters; invalid pixels are written as 0.
void writeDepthPgm(const DepthImage& img, const std::string& path);
DepthImage readDepthPgm(const std::string& path);

void writeWorldYaml(const GapWorld& world, const std::string& path);
GapWorld readWorldYaml(const std::string& path);

void writeHeightmapCsv(const HeightmapWindow& hm, const std::string& path);

}  // namespace dic
