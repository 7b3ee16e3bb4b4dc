#include "dic/model.hpp"

#include <cmath>

#include "dic/config.hpp"
#include "dic/errors.hpp"

namespace dic {

void RobotModel::validate() const {
  if (mass <= 0.0) throw ConfigError("robot mass must be positive");
  if ((body_inertia_diag.array() <= 0.0).any())
    throw ConfigError("body inertia diagonal must be positive");
  if (abduction_offset <= 0.0 || upper_link <= 0.0 || lower_link <= 0.0)
    throw ConfigError("link lengths must be positive");
  if (friction_coefficient <= 0.0) throw ConfigError("friction coefficient must be positive");
  if (max_normal_force <= 0.0) throw ConfigError("max normal force must be positive");
  if (knee_min >= knee_max) throw ConfigError("knee range is empty");
}

Vec3 forwardKinematics(const RobotModel& model, const Vec3& q, int leg) {
  const double d = model.abduction_offset * legSideSign(leg);
  const double l2 = model.upper_link;
  const double l3 = model.lower_link;

  const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
  const double s2 = std::sin(q[1]), c2 = std::cos(q[1]);
  const double s23 = std::sin(q[1] + q[2]), c23 = std::cos(q[1] + q[2]);

  // Planar 2R chain in the leg plane, rotated about x by the abduction angle.
  const double px = l3 * s23 + l2 * s2;
  const double zl = -(l3 * c23 + l2 * c2);
  return Vec3(px, d * c1 - s1 * zl, d * s1 + c1 * zl);
}

Mat3 footJacobian(const RobotModel& model, const Vec3& q, int leg) {
  const double d = model.abduction_offset * legSideSign(leg);
  const double l2 = model.upper_link;
  const double l3 = model.lower_link;

  const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
  const double s2 = std::sin(q[1]), c2 = std::cos(q[1]);
  const double s23 = std::sin(q[1] + q[2]), c23 = std::cos(q[1] + q[2]);

  Mat3 J;
  J(0, 0) = 0.0;
  J(0, 1) = l3 * c23 + l2 * c2;
  J(0, 2) = l3 * c23;
  J(1, 0) = -d * s1 + c1 * (l3 * c23 + l2 * c2);
  J(1, 1) = -s1 * (l3 * s23 + l2 * s2);
  J(1, 2) = -s1 * l3 * s23;
  J(2, 0) = d * c1 + s1 * (l3 * c23 + l2 * c2);
  J(2, 1) = c1 * (l3 * s23 + l2 * s2);
  J(2, 2) = c1 * l3 * s23;
  return J;
}

bool isReachable(const RobotModel& model, const Vec3& p, int leg) {
  (void)leg;
  const double d = model.abduction_offset;
  const double r2 = p[1] * p[1] + p[2] * p[2];
  if (r2 < d * d) return false;
  const double rho2 = p[0] * p[0] + (r2 - d * d);
  const double rmax = model.legReachMax();
  const double rmin = model.legReachMin();
  return rho2 <= rmax * rmax && rho2 >= rmin * rmin;
}

Vec3 inverseKinematics(const RobotModel& model, const Vec3& p, int leg) {
  const double d = model.abduction_offset * legSideSign(leg);
  const double l2 = model.upper_link;
  const double l3 = model.lower_link;

  const double r = std::hypot(p[1], p[2]);
  if (r < std::abs(d)) throw UnreachableError("foot target inside abduction cylinder");

  // Abduction angle: rotate the target into the leg plane so its y-component
  // equals the abduction offset; pick the branch with the foot below the hip.
  const double phi = std::atan2(p[2], p[1]);
  const double gamma = std::acos(std::min(1.0, std::max(-1.0, d / r)));
  double q0 = phi + gamma;
  double zl = -std::sin(q0) * p[1] + std::cos(q0) * p[2];
  if (zl > 0.0) {
    q0 = phi - gamma;
    zl = -std::sin(q0) * p[1] + std::cos(q0) * p[2];
  }
  // Wrap to [-pi, pi].
  if (q0 > M_PI) q0 -= 2.0 * M_PI;
  if (q0 < -M_PI) q0 += 2.0 * M_PI;

  // Planar 2R subproblem in the leg plane: target (x', z'), z' <= 0 nominal.
  const double xp = p[0];
  const double rho2 = xp * xp + zl * zl;
  const double rmax = model.legReachMax();
  const double rmin = model.legReachMin();
  if (rho2 > rmax * rmax * (1.0 + 1e-12) || rho2 < rmin * rmin * (1.0 - 1e-12))
    throw UnreachableError("foot target outside workspace annulus");

  double ck = (rho2 - l2 * l2 - l3 * l3) / (2.0 * l2 * l3);
  ck = std::min(1.0, std::max(-1.0, ck));
  const double q2 = -std::acos(ck);  // knee-backward branch
  const double q1 =
      std::atan2(xp, -zl) - std::atan2(l3 * std::sin(q2), l2 + l3 * std::cos(q2));
  return Vec3(q0, q1, q2);
}

Vec3 clampToWorkspace(const RobotModel& model, const Vec3& p, int leg) {
  (void)leg;
  const double d = model.abduction_offset;
  Vec3 out = p;
  double r = std::hypot(out[1], out[2]);
  if (r < d * 1.001) {
    // Push the lateral component out of the abduction cylinder, downward.
    const double need = d * 1.001;
    if (r < 1e-9) {
      out[2] = -std::sqrt(need * need);
    } else {
      out[1] *= need / r;
      out[2] *= need / r;
    }
    r = need;
  }
  const double planar2 = out[0] * out[0] + (r * r - d * d);
  const double planar = std::sqrt(std::max(planar2, 0.0));
  const double rmax = model.legReachMax() * 0.9995;
  const double rmin = model.legReachMin() * 1.0005;
  double scale = 1.0;
  if (planar > rmax)
    scale = rmax / planar;
  else if (planar < rmin && planar > 1e-12)
    scale = rmin / planar;
  if (scale != 1.0) {
    // Scale the in-plane radius while keeping the abduction offset component.
    const double inplane = std::sqrt(std::max(r * r - d * d, 0.0)) * scale;
    const double newr = std::sqrt(inplane * inplane + d * d);
    out[0] *= scale;
    if (r > 1e-12) {
      out[1] *= newr / r;
      out[2] *= newr / r;
    }
  }
  return out;
}

RobotModel RobotModel::fromConfig(const ConfigTree& cfg) {
  RobotModel m;
  m.mass = cfg.getDouble("robot.mass", m.mass);
  m.body_inertia_diag[0] = cfg.getDouble("robot.inertia_xx", m.body_inertia_diag[0]);
  m.body_inertia_diag[1] = cfg.getDouble("robot.inertia_yy", m.body_inertia_diag[1]);
  m.body_inertia_diag[2] = cfg.getDouble("robot.inertia_zz", m.body_inertia_diag[2]);
  m.body_length = cfg.getDouble("robot.body_length", m.body_length);
  m.body_width = cfg.getDouble("robot.body_width", m.body_width);
  m.standing_height = cfg.getDouble("robot.standing_height", m.standing_height);
  m.abduction_offset = cfg.getDouble("robot.abduction_offset", m.abduction_offset);
  m.upper_link = cfg.getDouble("robot.upper_link", m.upper_link);
  m.lower_link = cfg.getDouble("robot.lower_link", m.lower_link);
  m.friction_coefficient = cfg.getDouble("robot.friction", m.friction_coefficient);
  m.max_normal_force = cfg.getDouble("robot.max_normal_force", m.max_normal_force);
  m.knee_min = cfg.getDouble("robot.knee_min", m.knee_min);
  m.knee_max = cfg.getDouble("robot.knee_max", m.knee_max);
  m.torque_limit = cfg.getDouble("robot.torque_limit", m.torque_limit);
  m.validate();
  return m;
}

}  // namespace dic
