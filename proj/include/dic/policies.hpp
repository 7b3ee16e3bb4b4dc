#pragma once

#include <deque>
#include <istream>
#include <memory>
#include <optional>

#include "dic/gait.hpp"
#include "dic/model.hpp"
#include "dic/terrain.hpp"
#include "dic/types.hpp"
#include "dic/wtg.hpp"

namespace dic {

// What a high-level policy sees each step: the 34-dim proprioceptive state,
// a terrain observation (heightmap and/or preprocessed depth), the previous
// action and the cyclic timing scalar. body_position and step are carried
// for geometry bookkeeping (the heightmap stores absolute coordinates).
struct Observation {
  double height = 0.0;
  Vec3 orientation = Vec3::Zero();  // rpy
  Vec3 lin_vel = Vec3::Zero();
  Vec3 ang_vel = Vec3::Zero();
  Vec12 q = Vec12::Zero();
  Vec12 qd = Vec12::Zero();
  double phase = 0.0;  // (t mod d) / d
  long step = 0;
  Action prev_action;
  Vec3 body_position = Vec3::Zero();
  std::optional<HeightmapWindow> heightmap;
  std::optional<DepthImage> depth;

  // height(1) + orientation(3) + lin vel(3) + ang vel(3) + q(12) + qd(12).
  Eigen::Matrix<double, 34, 1> proprioVector() const;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Action act(const Observation& obs) = 0;
  virtual void reset() {}
  virtual bool wantsHeightmap() const { return false; }
  virtual bool wantsDepth() const { return false; }
  // FPA-style policies adjust footholds with privileged terrain access.
  virtual FootholdAdapter footholdAdapter(const GapWorld& /*world*/) const {
    return nullptr;
  }
};

// Constant-velocity policy, terrain-independent. For variable gaits the
// bits mimic the corresponding fixed cycle (horizon tells which future step
// the bits will apply to).
class BlindPolicy : public Policy {
 public:
  BlindPolicy(double v_cmd, GaitMode mode, int horizon = 10)
      : v_cmd_(v_cmd), mode_(mode), horizon_(horizon) {}
  Action act(const Observation& obs) override;

 private:
  double v_cmd_;
  GaitMode mode_;
  int horizon_;
};

// Nearest safe foothold on the x-grid within +-delta_max; ties prefer the
// smaller displacement, then negative x. Returns the nominal point unchanged
// with ok=false when no safe point exists within the budget.
struct FpaResult {
  Vec2 point;
  bool ok;
};
FpaResult fpaAdaptFoothold(const Vec2& nominal, const GapWorld& world, double delta_max,
                           double grid, double margin = 0.01);

// Blind constant velocity plus local foothold adaptation with privileged
// access to the true terrain.
class FpaPolicy : public Policy {
 public:
  FpaPolicy(double v_cmd, GaitMode mode, double delta_max, double grid = 0.005,
            double margin = 0.01)
      : blind_(v_cmd, mode), delta_max_(delta_max), grid_(grid), margin_(margin) {}
  Action act(const Observation& obs) override { return blind_.act(obs); }
  FootholdAdapter footholdAdapter(const GapWorld& world) const override;

 private:
  BlindPolicy blind_;
  double delta_max_, grid_, margin_;
};

struct PlannerParams {
  double v_min = 0.4, v_max = 2.0, v_step = 0.2;  // candidate forward speeds
  std::array<double, 3> vz_candidates{0.0, 0.5, 1.0};
  int lookahead_cycles = 3;
  double v_nominal = 1.0;
  double margin_cap = 0.05;       // m, margins above this are equally good
  double w_speed = 0.005;         // penalty per m/s deviation from nominal
  double w_vz = 0.01;             // penalty per m/s of commanded vertical speed
  double height_restore_gain = 1.0;
  bool use_yaw = false;           // yaw candidates disabled by default
};

// Scripted receding-horizon planner: enumerates velocity candidates,
// predicts Raibert touchdown positions over the lookahead (accounting for
// the H-step command latency through its own action history), scores each
// candidate by the minimum foothold safety margin against the heightmap
// hazards minus a velocity penalty, and takes the argmax (ties -> lower
// speed). Falls back to a full stop when every candidate predicts a gap
// touchdown.
class PlannerPolicy : public Policy {
 public:
  PlannerPolicy(const RobotModel& model, GaitMode mode, WtgConfig wtg,
                PlannerParams params);

  Action act(const Observation& obs) override;
  void reset() override;
  bool wantsHeightmap() const override { return true; }

  // Minimum predicted margin of the given candidate under the current
  // observation (the planner's own forward model; used by tests).
  double predictedMargin(const Observation& obs, double vx) const;
  bool lastWasFallback() const { return last_fallback_; }

 private:
  double scanMargin(const Observation& obs, double vx,
                    const std::vector<GapWorld::Interval>& hazards) const;

  RobotModel model_;
  GaitMode mode_;
  WtgConfig wtg_;
  PlannerParams params_;
  std::deque<double> vx_history_;  // last H-1 commanded forward speeds
  bool last_fallback_ = false;
};

// Cyclic trajectory-generator foot positions in the hip frame: x sweeps
// d*cos(phi), z lifts through two cubic segments of height h above the
// -0.28 m stance plane.
std::array<Vec3, 4> pmtgTg(const Vec4& phases, double h = 0.17, double d = 0.08);

// The trajectory generator run open-loop as a policy: phases advance at the
// configured frequency, contacts follow the stance plane of the generator
// and the forward command matches the generator's stance sweep rate.
class PmtgPolicy : public Policy {
 public:
  PmtgPolicy(double freq_hz, double dt_hl, double h = 0.17, double d = 0.08);
  Action act(const Observation& obs) override;
  void reset() override;

 private:
  double freq_, dt_, h_, d_;
  Vec4 phases_;
};

// Reads one action per line from a stream: "vx vy vz yaw [bits...]".
// Emits zero actions after EOF.
class ExternalPolicy : public Policy {
 public:
  ExternalPolicy(std::istream& in, GaitMode mode) : in_(in), mode_(mode) {}
  Action act(const Observation& obs) override;

 private:
  std::istream& in_;
  GaitMode mode_;
};

// Assemble the observation for one high-level step.
Observation observe(const WholeBodyState& X, const Vec12& q, const Vec12& qd,
                    const GapWorld& world, long t, const GaitMode& mode,
                    const Action& prev_action, bool want_heightmap, bool want_depth,
                    double heightmap_pitch = 0.025);

// Joint state consistent with the current feet (IK with workspace
// saturation); qd from damped differential IK of the relative foot motion.
void jointStateFromFeet(const RobotModel& model, const WholeBodyState& X, Vec12* q,
                        Vec12* qd);

}  // namespace dic
