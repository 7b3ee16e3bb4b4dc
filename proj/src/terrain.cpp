#include "dic/terrain.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "dic/errors.hpp"

namespace dic {

double GapWorld::totalWidth() const {
  double w = 0.0;
  for (const auto& s : segments) w += s.width;
  return w;
}

void GapWorld::finalize() {
  gaps_.clear();
  double x = origin_x;
  for (const auto& s : segments) {
    if (s.kind == Kind::Gap) gaps_.push_back({x, x + s.width});
    x += s.width;
  }
}

GapWorld generateGapWorld(uint64_t seed, double w_max, int n_gaps) {
  return generateGapWorldRange(seed, kGapWidthMin, w_max, n_gaps);
}

GapWorld generateGapWorldRange(uint64_t seed, double w_min, double w_max, int n_gaps) {
  if (w_max < w_min || w_min < 0.0)
    throw InvalidWidthError("invalid gap width range");

  GapWorld world;
  world.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> flat_dist(0.5, 2.0);
  std::uniform_real_distribution<double> gap_dist(w_min, w_max);

  if (n_gaps <= 0) {
    world.segments.push_back({GapWorld::Kind::Flat, 4.0});
    world.finalize();
    return world;
  }

  world.segments.push_back({GapWorld::Kind::Flat, flat_dist(rng)});
  for (int i = 0; i < n_gaps; ++i) {
    world.segments.push_back({GapWorld::Kind::Gap, gap_dist(rng)});
    if (i + 1 < n_gaps)
      world.segments.push_back({GapWorld::Kind::Flat, flat_dist(rng)});
  }
  world.segments.push_back({GapWorld::Kind::Flat, 2.0});
  world.finalize();
  return world;
}

HeightQuery heightAt(const GapWorld& world, double x, double /*y*/) {
  // Flats are closed intervals, gap interiors open.
  for (const auto& g : world.gapIntervals()) {
    if (x > g.left && x < g.right) return {true, 0.0};
    if (g.left > x) break;
  }
  return {false, 0.0};
}

bool isSafeFoothold(const GapWorld& world, double x, double y, double margin) {
  (void)y;
  for (const auto& g : world.gapIntervals()) {
    if (x + margin > g.left && x - margin < g.right) return false;
    if (g.left > x + margin) break;
  }
  return true;
}

CameraIntrinsics CameraIntrinsics::fromFov(int w, int h, double fov_x_deg, double fov_y_deg) {
  CameraIntrinsics intr;
  intr.width = w;
  intr.height = h;
  intr.fx = 0.5 * w / std::tan(0.5 * fov_x_deg * M_PI / 180.0);
  intr.fy = 0.5 * h / std::tan(0.5 * fov_y_deg * M_PI / 180.0);
  intr.cx = 0.5 * w;
  intr.cy = 0.5 * h;
  return intr;
}

DepthImage renderDepth(const GapWorld& world, const CameraPose& pose,
                       const CameraIntrinsics& intr) {
  DepthImage img;
  img.width = intr.width;
  img.height = intr.height;
  img.data.assign(static_cast<size_t>(intr.width) * intr.height, intr.max_range);
  img.valid.assign(static_cast<size_t>(intr.width) * intr.height, 0);

  // Camera frame: z along the optical axis, x to image right, y to image
  // down. The optical axis is +x pitched down, yawed by pose.yaw.
  const double cp = std::cos(pose.pitch_down), sp = std::sin(pose.pitch_down);
  const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
  const Vec3 fwd(cp * cy, cp * sy, -sp);
  const Vec3 right(sy, -cy, 0.0);
  const Vec3 down = fwd.cross(right);

  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const double xr = (u - intr.cx) / intr.fx;
      const double yr = (v - intr.cy) / intr.fy;
      Vec3 dir = (fwd + xr * right + yr * down).normalized();
      const size_t idx = static_cast<size_t>(v) * intr.width + u;
      if (dir[2] >= -1e-12) continue;  // never reaches the plane
      const double t = -pose.position[2] / dir[2];
      if (t > intr.max_range) continue;
      const Vec3 hit = pose.position + t * dir;
      if (heightAt(world, hit[0], hit[1]).is_gap) continue;  // bottomless
      img.data[idx] = t;
      img.valid[idx] = 1;
    }
  }
  return img;
}

DepthImage preprocessDepth(const DepthImage& raw) {
  if (raw.width != 480 || raw.height != 360)
    throw BadShapeError("preprocessDepth expects a 480x360 input image");

  // Nearest-neighbor 3x downsample (pixel-center mapping), then crop the 20
  // left columns of the 160x120 result.
  constexpr int kDsW = 160, kDsH = 120, kCrop = 20;
  DepthImage out;
  out.width = kDsW - kCrop;
  out.height = kDsH;
  out.data.resize(static_cast<size_t>(out.width) * out.height);
  out.valid.assign(static_cast<size_t>(out.width) * out.height, 1);

  std::vector<double> row(kDsW);
  std::vector<uint8_t> rowvalid(kDsW);
  for (int r = 0; r < kDsH; ++r) {
    for (int c = 0; c < kDsW; ++c) {
      row[c] = raw.at(3 * r + 1, 3 * c + 1);
      rowvalid[c] = raw.validAt(3 * r + 1, 3 * c + 1) ? 1 : 0;
    }
    // Fill holes from the nearest valid pixel in the same row.
    for (int c = kCrop; c < kDsW; ++c) {
      double val = row[c];
      if (!rowvalid[c]) {
        bool found = false;
        for (int d = 1; d < kDsW && !found; ++d) {
          if (c - d >= 0 && rowvalid[c - d]) {
            val = row[c - d];
            found = true;
          } else if (c + d < kDsW && rowvalid[c + d]) {
            val = row[c + d];
            found = true;
          }
        }
        if (!found) val = kDepthClipFar;
      }
      out.at(r, c - kCrop) = std::clamp(val, kDepthClipNear, kDepthClipFar);
    }
  }
  return out;
}

std::vector<GapWorld::Interval> HeightmapWindow::hazardIntervals() const {
  std::vector<GapWorld::Interval> out;
  const int mid = kCellsY / 2;
  int run_start = -1;
  for (int ix = 0; ix <= kCellsX; ++ix) {
    const bool gap = ix < kCellsX && isGapCell(ix, mid);
    if (gap && run_start < 0) run_start = ix;
    if (!gap && run_start >= 0) {
      out.push_back({cellCenterX(run_start) - 0.5 * pitch,
                     cellCenterX(ix - 1) + 0.5 * pitch});
      run_start = -1;
    }
  }
  return out;
}

HeightmapWindow sampleHeightmap(const GapWorld& world, double body_x, double body_y,
                                double pitch, double x_offset) {
  HeightmapWindow hm;
  hm.pitch = pitch;
  // Snap the window to the world grid so edge quantization is stable as the
  // body moves.
  hm.origin_x = (std::floor((body_x + x_offset) / pitch) + 0.5) * pitch;
  hm.origin_y = body_y - 0.5 * (HeightmapWindow::kCellsY - 1) * pitch;
  hm.cells.resize(static_cast<size_t>(HeightmapWindow::kCellsX) * HeightmapWindow::kCellsY);
  for (int ix = 0; ix < HeightmapWindow::kCellsX; ++ix) {
    const double x = hm.origin_x + ix * pitch;
    const HeightQuery q = heightAt(world, x, body_y);
    const double v = q.is_gap ? HeightmapWindow::kGapSentinel : q.height;
    for (int iy = 0; iy < HeightmapWindow::kCellsY; ++iy)
      hm.cells[static_cast<size_t>(ix) * HeightmapWindow::kCellsY + iy] = v;
  }
  return hm;
}

void writeDepthPgm(const DepthImage& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << "P5\n" << img.width << " " << img.height << "\n65535\n";
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      uint16_t mm = 0;
      if (img.validAt(r, c)) {
        const double v = std::clamp(img.at(r, c) * 1000.0, 0.0, 65535.0);
        mm = static_cast<uint16_t>(std::lround(v));
      }
      const uint8_t hi = static_cast<uint8_t>(mm >> 8), lo = static_cast<uint8_t>(mm & 0xff);
      f.put(static_cast<char>(hi));
      f.put(static_cast<char>(lo));
    }
  }
}

DepthImage readDepthPgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  f >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 65535) throw BadShapeError("not a 16-bit binary PGM");
  f.get();
  DepthImage img;
  img.width = w;
  img.height = h;
  img.data.resize(static_cast<size_t>(w) * h);
  img.valid.resize(static_cast<size_t>(w) * h);
  for (size_t i = 0; i < img.data.size(); ++i) {
    const int hi = f.get(), lo = f.get();
    if (hi < 0 || lo < 0) throw BadShapeError("truncated PGM");
    const uint16_t mm = static_cast<uint16_t>((hi << 8) | lo);
    img.data[i] = mm / 1000.0;
    img.valid[i] = mm > 0 ? 1 : 0;
  }
  return img;
}

void writeWorldYaml(const GapWorld& world, const std::string& path) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "world" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "origin_x" << YAML::Value << world.origin_x;
  out << YAML::Key << "seed" << YAML::Value << world.seed;
  out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : world.segments) {
    out << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value
        << (s.kind == GapWorld::Kind::Flat ? "flat" : "gap");
    out << YAML::Key << "width" << YAML::Value << s.width;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap << YAML::EndMap;
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << out.c_str() << "\n";
}

GapWorld readWorldYaml(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const std::exception& e) {
    throw Error("failed to load world '" + path + "': " + e.what());
  }
  const YAML::Node w = root["world"];
  if (!w) throw Error("world file missing 'world' section");
  GapWorld world;
  world.origin_x = w["origin_x"] ? w["origin_x"].as<double>() : 0.0;
  world.seed = w["seed"] ? w["seed"].as<uint64_t>() : 0;
  for (const auto& s : w["segments"]) {
    const std::string kind = s["kind"].as<std::string>();
    world.segments.push_back({kind == "gap" ? GapWorld::Kind::Gap : GapWorld::Kind::Flat,
                              s["width"].as<double>()});
  }
  world.finalize();
  return world;
}

void writeHeightmapCsv(const HeightmapWindow& hm, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.precision(9);
  f << "x";
  for (int iy = 0; iy < HeightmapWindow::kCellsY; ++iy)
    f << ",y" << iy;
  f << "\n";
  for (int ix = 0; ix < HeightmapWindow::kCellsX; ++ix) {
    f << hm.cellCenterX(ix);
    for (int iy = 0; iy < HeightmapWindow::kCellsY; ++iy) f << "," << hm.at(ix, iy);
    f << "\n";
  }
}

}  // namespace dic
