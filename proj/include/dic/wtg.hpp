#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "dic/gait.hpp"
#include "dic/model.hpp"
#include "dic/types.hpp"

namespace dic {

// The whole-body state X: body pose/velocity/acceleration (6 each, rpy
// angles, world angular velocity), four feet with derivatives (12 each,
// world frame) and the 4-bit contact state.
struct WholeBodyState {
  Vec6 body_pose = Vec6::Zero();  // x y z roll pitch yaw
  Vec6 body_vel = Vec6::Zero();   // vx vy vz wx wy wz
  Vec6 body_acc = Vec6::Zero();
  std::array<Vec3, 4> foot_pos{};
  std::array<Vec3, 4> foot_vel{};
  std::array<Vec3, 4> foot_acc{};
  ContactState contact;

  double yaw() const { return body_pose[5]; }
  Vec3 position() const { return body_pose.head<3>(); }
  Vec3 rpy() const { return body_pose.tail<3>(); }
};

// High-level action: commanded body velocity, yaw rate and the contact bits
// required by the gait mode (none for fixed gaits).
struct Action {
  Vec3 v_cmd = Vec3::Zero();
  double yaw_rate = 0.0;
  std::optional<ContactBits> contacts;
};

struct WtgConfig {
  double dt = 0.036;              // s, high-level step
  int horizon = 10;               // H
  double swing_clearance = 0.08;  // m
  double raibert_gain = 0.03;     // s
  Vec3 v_max{2.5, 1.0, 3.0};      // actuator-safe velocity box (abs)
};

// Raibert symmetry foothold offset from the hip ground-projection:
// (dt_stance / 2) * v + k * (v - v_cmd), per horizontal axis.
Vec2 raibertFoothold(const Vec2& v, const Vec2& v_cmd, double dt_stance, double k_gain);

// Quadratic Bezier swing: control points p_start, midpoint + 2*clearance z,
// p_end. Returns position/velocity/acceleration at phase in [0,1]; rates are
// scaled by the swing duration.
void swingTrajectory(const Vec3& p_start, const Vec3& p_end, double phase,
                     double clearance, double duration, Vec3* pos, Vec3* vel,
                     Vec3* acc);

// Hook for foothold adjustment (FPA); maps a nominal world-frame xy target
// to the adjusted one.
using FootholdAdapter = std::function<Vec2(const Vec2& nominal)>;

// Incremental whole-body trajectory generator. Holds a ring of H+1 states
// for steps [t, t+H]; extend() appends the state at t+H from the action at
// t. Entries are append-only: once written they are never rewritten.
class TrajectoryGenerator {
 public:
  TrajectoryGenerator(const RobotModel& model, GaitMode mode, WtgConfig cfg);

  // Fill steps [t0, t0+H-1] with a standing state at the given pose.
  void reset(const Vec3& body_position, double yaw, long t0);

  // Append the state for step t+H; requires t == next expected step.
  const WholeBodyState& extend(const Action& action, long t);

  const WholeBodyState& at(long step) const;
  long frontStep() const { return front_step_; }
  long backStep() const { return front_step_ + static_cast<long>(states_.size()) - 1; }

  // Measured body velocity used as the Raibert "v" term; defaults to the
  // desired velocity when never set.
  void setMeasuredVelocity(const Vec3& v) { measured_velocity_ = v; }
  void setFootholdAdapter(FootholdAdapter adapter) { adapter_ = std::move(adapter); }

  const GaitMode& mode() const { return mode_; }
  const WtgConfig& config() const { return cfg_; }

  // Nominal stance duration used for the Raibert offset (half cycle).
  double stanceDuration() const { return 0.5 * mode_.cycle_steps * cfg_.dt; }

  void dumpCsv(const std::string& path) const;

 private:
  struct SwingState {
    bool active = false;
    long anchor_step = 0;  // last stance step before liftoff
    int duration_steps = 1;  // steps from anchor to touchdown
    Vec3 start = Vec3::Zero();
    Vec3 target = Vec3::Zero();
  };

  Vec3 predictFoothold(int leg, long touchdown_step, long now_step,
                       const WholeBodyState& now, const Action& action) const;

  RobotModel model_;
  GaitMode mode_;
  WtgConfig cfg_;
  std::deque<WholeBodyState> states_;
  long front_step_ = 0;
  std::array<SwingState, 4> swing_{};
  std::optional<Vec3> measured_velocity_;
  FootholdAdapter adapter_;
};

}  // namespace dic
