#pragma once

#include <array>

#include "dic/types.hpp"

namespace dic {

class ConfigTree;

// Physical parameters of a Mini-Cheetah-class quadruped. Gross dimensions
// (mass 9 kg, 28 cm standing height, 38 cm body) follow the hardware; link
// lengths and hip offsets are nominal defaults and may be overridden from
// config. Legs are 3-DoF serial chains: abduction about x, hip and knee
// about y, knee-backward convention (knee angle negative in stance).
struct RobotModel {
  double mass = 9.0;                            // kg
  Vec3 body_inertia_diag{0.011, 0.036, 0.043};  // kg m^2, body frame diagonal
  double body_length = 0.38;                    // m, hip-to-hip along x
  double body_width = 0.22;                     // m, hip-to-hip along y
  double standing_height = 0.28;                // m
  double abduction_offset = 0.062;              // m
  double upper_link = 0.209;                    // m
  double lower_link = 0.195;                    // m
  double friction_coefficient = 0.4;
  double max_normal_force = 120.0;  // N
  double knee_min = -2.6;           // rad
  double knee_max = -0.3;           // rad
  double torque_limit = 17.0;       // N m

  // Hip positions in the body frame, ordered LF, RF, LR, RR.
  std::array<Vec3, 4> hipOffsets() const {
    const double hx = 0.5 * body_length;
    const double hy = 0.5 * body_width;
    return {Vec3(hx, hy, 0.0), Vec3(hx, -hy, 0.0), Vec3(-hx, hy, 0.0), Vec3(-hx, -hy, 0.0)};
  }

  double legReachMax() const { return upper_link + lower_link; }
  double legReachMin() const { return std::abs(upper_link - lower_link); }

  // Throws ConfigError if a physical invariant is violated.
  void validate() const;

  static RobotModel fromConfig(const ConfigTree& cfg);
};

struct LegJointState {
  Vec3 q{Vec3::Zero()};   // abduction, hip, knee (rad)
  Vec3 qd{Vec3::Zero()};  // rad/s
};

// Foot position in the hip frame (axes parallel to body frame, origin at the
// abduction axis). Total function of q.
Vec3 forwardKinematics(const RobotModel& model, const Vec3& q, int leg);

// Analytic inverse kinematics, knee-backward branch. Throws UnreachableError
// if the target lies outside the workspace annulus.
Vec3 inverseKinematics(const RobotModel& model, const Vec3& p_foot, int leg);

// 3x3 Jacobian of forwardKinematics: foot velocity = J * qd.
Mat3 footJacobian(const RobotModel& model, const Vec3& q, int leg);

// True if the hip-frame point is inside the reachable workspace.
bool isReachable(const RobotModel& model, const Vec3& p_foot, int leg);

// Nearest reachable point to p_foot (used to saturate swing targets).
Vec3 clampToWorkspace(const RobotModel& model, const Vec3& p_foot, int leg);

}  // namespace dic
