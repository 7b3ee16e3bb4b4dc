#pragma once

#include "dic/model.hpp"
#include "dic/types.hpp"
#include "dic/wtg.hpp"

namespace dic {

// Per-joint command consumed by the PD-plus-feedforward layer.
struct JointCommand {
  Vec12 q_des = Vec12::Zero();
  Vec12 qd_des = Vec12::Zero();
  Vec12 tau_ff = Vec12::Zero();
  Vec12 kp = Vec12::Zero();
  Vec12 kd = Vec12::Zero();
};

struct WbicConfig {
  double kp_stance = 40.0;
  double kp_swing = 60.0;
  double kd = 1.0;
  double pinv_damping = 0.01;  // damped least squares near singularities
};

// Joint torques commanding the reaction of the desired ground force:
// tau = J(q)' R_world_to_body (-f_des), clamped to the torque limit.
Vec3 stanceTorques(const RobotModel& model, const Vec3& f_des_world, const Vec3& q_leg,
                   const Vec3& body_rpy, int leg);

// IK position command plus damped differential IK velocity command for a
// swing foot. World-frame target and velocity; throws UnreachableError when
// the target is outside the workspace.
void swingCommand(const RobotModel& model, const Vec3& p_foot_world,
                  const Vec3& pd_foot_world, int leg, const Vec6& body_pose,
                  const Vec6& body_vel, double pinv_damping, Vec3* q_des, Vec3* qd_des);

// tau = kp (q_des - q) + kd (qd_des - qd) + tau_ff, clamped per joint.
Vec12 jointPd(const JointCommand& cmd, const Vec12& q, const Vec12& qd,
              double torque_limit);

// Full command for one control tick: stance legs get feedforward reaction
// torques at their measured posture; swing legs track the desired foot
// states (targets saturated into the workspace first).
JointCommand wholeBodyCommand(const RobotModel& model, const WbicConfig& cfg,
                              const WholeBodyState& desired, const WholeBodyState& measured,
                              const std::array<Vec3, 4>& grf, const Vec12& q_measured);

}  // namespace dic
