#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dic/limits.hpp"
#include "dic/policies.hpp"
#include "dic/sim.hpp"

namespace dic {

struct PolicySpec {
  enum class Kind { Blind, Fpa, Planner, Pmtg, External };
  Kind kind = Kind::Blind;
  double v_cmd = 1.0;
  double fpa_delta = 0.04;
  double fpa_grid = 0.005;
  double fpa_margin = 0.01;
  PlannerParams planner;
  double pmtg_freq = 2.7778;
  std::string external_path;
};

std::unique_ptr<Policy> makePolicy(const PolicySpec& spec, const RobotModel& model,
                                   const GaitMode& mode, const WtgConfig& wtg);

struct EvalConfig {
  PolicySpec policy;
  GaitMode mode;
  std::vector<double> widths;  // evaluated gap widths, m (fixed per cell)
  int episodes = 1000;
  int gaps_per_world = 6;
  uint64_t seed = 1;
  int workers = 1;
  RobotModel model;
  RolloutConfig rollout;
};

struct EpisodeRecord {
  int width_idx = 0;
  int episode_idx = 0;
  double width = 0.0;
  uint64_t seed = 0;
  EpisodeStatus status = EpisodeStatus::Running;
  double distance = 0.0;
  int attempts = 0;
  int crossings = 0;
  double reward = 0.0;
  long steps = 0;
};

struct CurveRow {
  double width = 0.0;
  long attempts = 0;
  long crossings = 0;
  double rate = 0.0;
  double stderr_ = 0.0;  // sqrt(p (1-p) / n)
};

struct SuccessCurve {
  std::vector<CurveRow> rows;
};

// Per-gap-width crossing statistics; a crossing attempt is one gap
// encountered before termination. Worlds are regenerated per episode with
// per-episode seeds so gap phase is random and results do not depend on the
// worker count.
SuccessCurve evaluate(const EvalConfig& cfg, std::vector<EpisodeRecord>* records = nullptr);

CurveRow aggregateRows(const std::vector<EpisodeRecord>& records, int width_idx,
                       double width);

struct BoundReportRow {
  double width = 0.0;
  double rate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  bool pass = false;  // rate <= bound + 3 stderr
};

struct BoundReport {
  std::vector<BoundReportRow> rows;
};

BoundReport compareToBounds(const SuccessCurve& curve,
                            const std::function<double(double)>& bound_of_width);

void writeCurveCsv(const SuccessCurve& curve, const std::string& path);
void writeRecords(const std::vector<EpisodeRecord>& records, const std::string& path);
void writeBoundReportCsv(const BoundReport& report, const std::string& path);

// Shared defaults so the CLI and tests agree on the stack configuration.
RolloutConfig defaultRolloutConfig(const GaitMode& mode);

}  // namespace dic
