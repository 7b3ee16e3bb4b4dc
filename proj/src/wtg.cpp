#include "dic/wtg.hpp"

#include <cmath>
#include <fstream>

#include "dic/errors.hpp"

namespace dic {

Vec2 raibertFoothold(const Vec2& v, const Vec2& v_cmd, double dt_stance, double k_gain) {
  return 0.5 * dt_stance * v + k_gain * (v - v_cmd);
}

void swingTrajectory(const Vec3& p_start, const Vec3& p_end, double phase,
                     double clearance, double duration, Vec3* pos, Vec3* vel,
                     Vec3* acc) {
  const Vec3 mid = 0.5 * (p_start + p_end) + Vec3(0, 0, 2.0 * clearance);
  const double s = phase, u = 1.0 - phase;
  if (pos) *pos = u * u * p_start + 2.0 * u * s * mid + s * s * p_end;
  const double inv_t = duration > 0.0 ? 1.0 / duration : 0.0;
  if (vel) *vel = (2.0 * u * (mid - p_start) + 2.0 * s * (p_end - mid)) * inv_t;
  if (acc) *acc = 2.0 * (p_end - 2.0 * mid + p_start) * inv_t * inv_t;
}

TrajectoryGenerator::TrajectoryGenerator(const RobotModel& model, GaitMode mode,
                                         WtgConfig cfg)
    : model_(model), mode_(mode), cfg_(cfg) {}

void TrajectoryGenerator::reset(const Vec3& body_position, double yaw, long t0) {
  states_.clear();
  front_step_ = t0;
  WholeBodyState s;
  s.body_pose << body_position[0], body_position[1], body_position[2], 0, 0, yaw;
  s.contact = ContactState::all(true);
  const auto hips = model_.hipOffsets();
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3& h = hips[static_cast<size_t>(leg)];
    s.foot_pos[static_cast<size_t>(leg)] =
        Vec3(body_position[0] + cy * h[0] - sy * h[1],
             body_position[1] + sy * h[0] + cy * h[1], 0.0);
  }
  for (int i = 0; i < cfg_.horizon; ++i) states_.push_back(s);
  swing_ = {};
}

const WholeBodyState& TrajectoryGenerator::at(long step) const {
  const long idx = step - front_step_;
  if (idx < 0 || idx >= static_cast<long>(states_.size()))
    throw Error("trajectory step out of window");
  return states_[static_cast<size_t>(idx)];
}

Vec3 TrajectoryGenerator::predictFoothold(int leg, long touchdown_step, long now_step,
                                          const WholeBodyState& now,
                                          const Action& action) const {
  const double dt_ahead = (touchdown_step - now_step) * cfg_.dt;
  const double yaw_td = now.yaw() + action.yaw_rate * dt_ahead;
  const Vec2 body_td = now.position().head<2>() + action.v_cmd.head<2>() * dt_ahead;

  const Vec3& hip = model_.hipOffsets()[static_cast<size_t>(leg)];
  const double cy = std::cos(yaw_td), sy = std::sin(yaw_td);
  const Vec2 hip_proj(body_td[0] + cy * hip[0] - sy * hip[1],
                      body_td[1] + sy * hip[0] + cy * hip[1]);

  const Vec2 v_meas = measured_velocity_ ? measured_velocity_->head<2>()
                                         : Vec2(action.v_cmd.head<2>());
  const Vec2 offset = raibertFoothold(v_meas, action.v_cmd.head<2>(), stanceDuration(),
                                      cfg_.raibert_gain);
  Vec2 target = hip_proj + offset;
  if (adapter_) target = adapter_(target);
  return Vec3(target[0], target[1], 0.0);
}

const WholeBodyState& TrajectoryGenerator::extend(const Action& action, long t) {
  if (states_.empty()) throw Error("trajectory generator not reset");
  const long new_step = t + cfg_.horizon;
  if (new_step != backStep() + 1) throw Error("extend called out of order");

  if (std::abs(action.v_cmd[0]) > cfg_.v_max[0] ||
      std::abs(action.v_cmd[1]) > cfg_.v_max[1] ||
      std::abs(action.v_cmd[2]) > cfg_.v_max[2])
    throw ActionOutOfBoundsError("commanded velocity outside the safe box");

  const WholeBodyState& prev = states_.back();
  WholeBodyState next;
  next.body_vel << action.v_cmd[0], action.v_cmd[1], action.v_cmd[2], 0.0, 0.0,
      action.yaw_rate;
  next.body_pose = prev.body_pose + cfg_.dt * next.body_vel;
  next.body_acc = (next.body_vel - prev.body_vel) / cfg_.dt;
  next.contact = contactAt(mode_, new_step, action.contacts);

  for (int leg = 0; leg < kNumLegs; ++leg) {
    const size_t li = static_cast<size_t>(leg);
    const bool was = prev.contact[leg];
    const bool is = next.contact[leg];
    SwingState& sw = swing_[li];

    if (was && is) {  // stance hold
      next.foot_pos[li] = prev.foot_pos[li];
      next.foot_vel[li].setZero();
      next.foot_acc[li].setZero();
      continue;
    }

    if (was && !is) {  // liftoff
      sw.active = true;
      sw.anchor_step = new_step - 1;
      sw.start = prev.foot_pos[li];
      int n;
      if (mode_.isFixed()) {
        n = stepsToNextStance(mode_, new_step - 1, leg);
      } else {
        n = std::max(1, mode_.cycle_steps / 2);  // nominal for held bits
      }
      sw.duration_steps = std::max(1, n);
      sw.target = predictFoothold(leg, sw.anchor_step + sw.duration_steps, new_step,
                                  next, action);
    }

    if (!sw.active) {
      // Contact flickered on without a recorded liftoff (variable gaits from
      // a standing prefill); treat as stance at the previous position.
      next.foot_pos[li] = prev.foot_pos[li];
      next.foot_vel[li].setZero();
      next.foot_acc[li].setZero();
      continue;
    }

    if (!is) {  // swing sample
      // Re-resolve the provisional target from the latest command.
      long touchdown = sw.anchor_step + sw.duration_steps;
      if (touchdown <= new_step) {
        // Overdue (variable gait holding flight); keep the foot at the
        // Bezier end and stretch the nominal duration.
        sw.duration_steps = static_cast<int>(new_step - sw.anchor_step) + 1;
        touchdown = sw.anchor_step + sw.duration_steps;
      }
      sw.target = predictFoothold(leg, touchdown, new_step, next, action);
      const double phase =
          static_cast<double>(new_step - sw.anchor_step) / sw.duration_steps;
      swingTrajectory(sw.start, sw.target, std::min(phase, 1.0), cfg_.swing_clearance,
                      sw.duration_steps * cfg_.dt, &next.foot_pos[li],
                      &next.foot_vel[li], &next.foot_acc[li]);
    } else {  // touchdown: resolve the final target exactly
      sw.target = predictFoothold(leg, new_step, new_step, next, action);
      next.foot_pos[li] = sw.target;
      next.foot_vel[li].setZero();
      next.foot_acc[li].setZero();
      sw.active = false;
    }
  }

  states_.push_back(next);
  if (states_.size() > static_cast<size_t>(cfg_.horizon) + 1) {
    states_.pop_front();
    ++front_step_;
  }
  return states_.back();
}

void TrajectoryGenerator::dumpCsv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.precision(12);
  f << "step";
  const char* groups[] = {"pose", "vel", "acc"};
  const char* axes6[] = {"x", "y", "z", "rx", "ry", "rz"};
  for (const char* g : groups)
    for (const char* a : axes6) f << ",body_" << g << "_" << a;
  const char* legs[] = {"lf", "rf", "lr", "rr"};
  const char* axes3[] = {"x", "y", "z"};
  for (const char* g : {"pos", "vel", "acc"})
    for (const char* l : legs)
      for (const char* a : axes3) f << ",foot_" << g << "_" << l << "_" << a;
  for (const char* l : legs) f << ",contact_" << l;
  f << "\n";
  for (long s = frontStep(); s <= backStep(); ++s) {
    const WholeBodyState& x = at(s);
    f << s;
    for (int i = 0; i < 6; ++i) f << "," << x.body_pose[i];
    for (int i = 0; i < 6; ++i) f << "," << x.body_vel[i];
    for (int i = 0; i < 6; ++i) f << "," << x.body_acc[i];
    for (const auto& arr : {x.foot_pos, x.foot_vel, x.foot_acc})
      for (const auto& p : arr)
        for (int i = 0; i < 3; ++i) f << "," << p[i];
    for (int leg = 0; leg < 4; ++leg) f << "," << (x.contact[leg] ? 1 : 0);
    f << "\n";
  }
}

}  // namespace dic
