#include "dic/wbic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dic/errors.hpp"
#include "dic/rotation.hpp"

namespace dic {

Vec3 stanceTorques(const RobotModel& model, const Vec3& f_des_world, const Vec3& q_leg,
                   const Vec3& body_rpy, int leg) {
  const Mat3 J = footJacobian(model, q_leg, leg);
  const Mat3 R = rpyRotation(body_rpy);
  const Vec3 tau = J.transpose() * (R.transpose() * (-f_des_world));
  return tau.cwiseMax(-model.torque_limit).cwiseMin(model.torque_limit);
}

void swingCommand(const RobotModel& model, const Vec3& p_foot_world,
                  const Vec3& pd_foot_world, int leg, const Vec6& body_pose,
                  const Vec6& body_vel, double pinv_damping, Vec3* q_des, Vec3* qd_des) {
  const Mat3 R = rpyRotation(body_pose.tail<3>());
  const Vec3 body_pos = body_pose.head<3>();
  const Vec3 hip = model.hipOffsets()[static_cast<size_t>(leg)];
  const Vec3 p_hip = R.transpose() * (p_foot_world - body_pos) - hip;
  const Vec3 q = inverseKinematics(model, p_hip, leg);
  if (q_des) *q_des = q;
  if (!qd_des) return;

  // Foot velocity relative to the moving body, in the body frame.
  const Vec3 omega = body_vel.tail<3>();
  const Vec3 v_rel_world =
      pd_foot_world - body_vel.head<3>() - omega.cross(p_foot_world - body_pos);
  const Vec3 v_hip = R.transpose() * v_rel_world;

  const Mat3 J = footJacobian(model, q, leg);
  const double lam2 = pinv_damping * pinv_damping;
  const Mat3 JJt = J * J.transpose() + lam2 * Mat3::Identity();
  *qd_des = J.transpose() * JJt.ldlt().solve(v_hip);
}

Vec12 jointPd(const JointCommand& cmd, const Vec12& q, const Vec12& qd,
              double torque_limit) {
  Vec12 tau = cmd.kp.cwiseProduct(cmd.q_des - q) + cmd.kd.cwiseProduct(cmd.qd_des - qd) +
              cmd.tau_ff;
  return tau.cwiseMax(-torque_limit).cwiseMin(torque_limit);
}

JointCommand wholeBodyCommand(const RobotModel& model, const WbicConfig& cfg,
                              const WholeBodyState& desired, const WholeBodyState& measured,
                              const std::array<Vec3, 4>& grf, const Vec12& q_measured) {
  JointCommand cmd;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const size_t li = static_cast<size_t>(leg);
    const long base = 3 * leg;
    if (desired.contact[leg]) {
      const Vec3 q = q_measured.segment<3>(base);
      cmd.q_des.segment<3>(base) = q;
      cmd.qd_des.segment<3>(base).setZero();
      cmd.tau_ff.segment<3>(base) =
          stanceTorques(model, grf[li], q, measured.rpy(), leg);
      cmd.kp.segment<3>(base).setConstant(cfg.kp_stance);
    } else {
      const Mat3 R = rpyRotation(measured.rpy());
      const Vec3 hip = model.hipOffsets()[li];
      Vec3 p_hip = R.transpose() * (desired.foot_pos[li] - measured.position()) - hip;
      p_hip = clampToWorkspace(model, p_hip, leg);
      const Vec3 p_world = measured.position() + R * (p_hip + hip);
      Vec3 q, qd;
      swingCommand(model, p_world, desired.foot_vel[li], leg, measured.body_pose,
                   measured.body_vel, cfg.pinv_damping, &q, &qd);
      cmd.q_des.segment<3>(base) = q;
      cmd.qd_des.segment<3>(base) = qd;
      cmd.tau_ff.segment<3>(base).setZero();
      cmd.kp.segment<3>(base).setConstant(cfg.kp_swing);
    }
  }
  cmd.kd.setConstant(cfg.kd);
  return cmd;
}

}  // namespace dic
