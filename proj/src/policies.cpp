#include "dic/policies.hpp"

#include <cmath>
#include <sstream>

#include "dic/rotation.hpp"
#include "dic/wbic.hpp"

namespace dic {

Eigen::Matrix<double, 34, 1> Observation::proprioVector() const {
  Eigen::Matrix<double, 34, 1> s;
  s << height, orientation, lin_vel, ang_vel, q, qd;
  return s;
}

Action BlindPolicy::act(const Observation& obs) {
  Action a;
  a.v_cmd = Vec3(v_cmd_, 0.0, 0.0);
  a.yaw_rate = 0.0;
  if (mode_.kind == GaitKind::VariablePronk) {
    const GaitMode pronk{GaitKind::FixedPronk, mode_.cycle_steps};
    a.contacts = ContactBits::one(contactAt(pronk, obs.step + horizon_)[0]);
  } else if (mode_.kind == GaitKind::Unconstrained) {
    const GaitMode trot{GaitKind::FixedTrot, mode_.cycle_steps};
    const ContactState c = contactAt(trot, obs.step + horizon_);
    a.contacts = ContactBits::four(c[0], c[1], c[2], c[3]);
  }
  return a;
}

FpaResult fpaAdaptFoothold(const Vec2& nominal, const GapWorld& world, double delta_max,
                           double grid, double margin) {
  if (isSafeFoothold(world, nominal[0], nominal[1], margin)) return {nominal, true};
  const int kmax = static_cast<int>(std::floor(delta_max / grid + 1e-9));
  for (int k = 1; k <= kmax; ++k) {
    for (double sign : {-1.0, 1.0}) {
      const double x = nominal[0] + sign * k * grid;
      if (isSafeFoothold(world, x, nominal[1], margin)) return {Vec2(x, nominal[1]), true};
    }
  }
  return {nominal, false};
}

FootholdAdapter FpaPolicy::footholdAdapter(const GapWorld& world) const {
  const double dmax = delta_max_, grid = grid_, margin = margin_;
  const GapWorld* w = &world;
  return [w, dmax, grid, margin](const Vec2& nominal) {
    return fpaAdaptFoothold(nominal, *w, dmax, grid, margin).point;
  };
}

PlannerPolicy::PlannerPolicy(const RobotModel& model, GaitMode mode, WtgConfig wtg,
                             PlannerParams params)
    : model_(model), mode_(mode), wtg_(wtg), params_(params) {
  reset();
}

void PlannerPolicy::reset() {
  vx_history_.assign(static_cast<size_t>(std::max(0, wtg_.horizon - 1)), 0.0);
  last_fallback_ = false;
}

double PlannerPolicy::scanMargin(const Observation& obs, double vx,
                                 const std::vector<GapWorld::Interval>& hazards) const {
  const int H = wtg_.horizon;
  const long t = obs.step;
  const double dt = wtg_.dt;
  const double dt_stance = 0.5 * mode_.cycle_steps * dt;
  const double raibert = 0.5 * dt_stance * vx;
  const long lookahead = t + H + static_cast<long>(params_.lookahead_cycles) *
                                     mode_.cycle_steps;

  // Heightmap coverage: beyond the window the terrain is unknown-safe.
  double known_right = 1e9;
  if (obs.heightmap)
    known_right = obs.heightmap->origin_x +
                  (HeightmapWindow::kCellsX - 0.5) * obs.heightmap->pitch;

  const auto hips = model_.hipOffsets();
  double min_margin = params_.margin_cap;

  for (int leg = 0; leg < kNumLegs; ++leg) {
    for (long tt = t + H; tt <= lookahead; ++tt) {
      if (!(contactAt(mode_, tt)[leg] && !contactAt(mode_, tt - 1)[leg])) continue;

      // Body advance from now to tt: committed actions cover steps up to
      // t+H-1 (history), the candidate covers the rest.
      double advance = 0.0;
      for (long s = t + 1; s <= tt; ++s) {
        const long u = s - H;  // action that set the velocity of step s
        if (u <= t - 1) {
          const long hist_idx =
              static_cast<long>(vx_history_.size()) - 1 - (t - 1 - u);
          advance += (hist_idx >= 0) ? vx_history_[static_cast<size_t>(hist_idx)] * dt
                                     : 0.0;
        } else {
          advance += vx * dt;
        }
      }

      const double foot_x = obs.body_position[0] + advance +
                            hips[static_cast<size_t>(leg)][0] + raibert;
      if (foot_x > known_right) continue;  // unknown terrain, treated safe

      double margin = params_.margin_cap;
      for (const auto& hz : hazards) {
        double m;
        if (foot_x <= hz.left)
          m = hz.left - foot_x;
        else if (foot_x >= hz.right)
          m = foot_x - hz.right;
        else
          m = -std::min(foot_x - hz.left, hz.right - foot_x);
        margin = std::min(margin, m);
      }
      min_margin = std::min(min_margin, std::min(margin, params_.margin_cap));
    }
  }
  return min_margin;
}

double PlannerPolicy::predictedMargin(const Observation& obs, double vx) const {
  const std::vector<GapWorld::Interval> hazards =
      obs.heightmap ? obs.heightmap->hazardIntervals()
                    : std::vector<GapWorld::Interval>{};
  return scanMargin(obs, vx, hazards);
}

Action PlannerPolicy::act(const Observation& obs) {
  const std::vector<GapWorld::Interval> hazards =
      obs.heightmap ? obs.heightmap->hazardIntervals()
                    : std::vector<GapWorld::Interval>{};

  double best_score = -1e18;
  double best_vx = 0.0, best_vz = 0.0;
  bool any_safe = false;

  for (double vx = params_.v_min; vx <= params_.v_max + 1e-9; vx += params_.v_step) {
    const double margin = scanMargin(obs, vx, hazards);
    for (double vz : params_.vz_candidates) {
      const double score = margin - params_.w_speed * std::abs(vx - params_.v_nominal) -
                           params_.w_vz * vz;
      if (margin >= 0.0) any_safe = true;
      if (score > best_score + 1e-12) {
        best_score = score;
        best_vx = vx;
        best_vz = vz;
      }
    }
  }

  Action a;
  if (!any_safe) {
    // Every candidate predicts a gap touchdown: decelerate to a stop.
    last_fallback_ = true;
    a.v_cmd.setZero();
  } else {
    last_fallback_ = false;
    a.v_cmd = Vec3(best_vx, 0.0, best_vz);
  }
  // Gentle height restoration keeps the desired trajectory near the nominal
  // standing height after vertical excursions.
  const double restore =
      params_.height_restore_gain * (model_.standing_height - obs.height);
  a.v_cmd[2] = std::clamp(a.v_cmd[2] + std::clamp(restore, -0.2, 0.2), -wtg_.v_max[2],
                          wtg_.v_max[2]);
  a.yaw_rate = 0.0;

  vx_history_.push_back(a.v_cmd[0]);
  while (vx_history_.size() > static_cast<size_t>(std::max(0, wtg_.horizon - 1)))
    vx_history_.pop_front();
  return a;
}

std::array<Vec3, 4> pmtgTg(const Vec4& phases, double h, double d) {
  std::array<Vec3, 4> feet;
  for (int i = 0; i < 4; ++i) {
    double phi = std::fmod(phases[i], 2.0 * M_PI);
    if (phi < 0.0) phi += 2.0 * M_PI;
    const double k = 2.0 * (phi - M_PI) / M_PI;
    const double px = d * std::cos(phi);
    double pz;
    if (k >= 0.0 && k <= 1.0) {
      pz = h * (-2.0 * k * k * k + 3.0 * k * k) - 0.28;
    } else if (k > 1.0 && k <= 2.0) {
      pz = h * (2.0 * k * k * k - 9.0 * k * k + 12.0 * k - 4.0) - 0.28;
    } else {
      pz = -0.28;
    }
    feet[static_cast<size_t>(i)] = Vec3(px, 0.0, pz);
  }
  return feet;
}

PmtgPolicy::PmtgPolicy(double freq_hz, double dt_hl, double h, double d)
    : freq_(freq_hz), dt_(dt_hl), h_(h), d_(d) {
  reset();
}

void PmtgPolicy::reset() { phases_ = Vec4(0.0, M_PI, 0.0, M_PI); }

Action PmtgPolicy::act(const Observation& /*obs*/) {
  const std::array<Vec3, 4> feet = pmtgTg(phases_, h_, d_);
  Action a;
  // Contact whenever the generator holds the foot on the stance plane.
  bool bits[4];
  for (int i = 0; i < 4; ++i) bits[i] = feet[static_cast<size_t>(i)][2] <= -0.28 + 1e-9;
  a.contacts = ContactBits::four(bits[0], bits[1], bits[2], bits[3]);

  // Stance feet sweep x at d*sin(phi)*omega; command the matching body speed.
  const double omega = 2.0 * M_PI * freq_;
  double phi0 = std::fmod(phases_[0], M_PI);
  if (phi0 < 0.0) phi0 += M_PI;
  a.v_cmd = Vec3(d_ * std::sin(phi0) * omega, 0.0, 0.0);
  a.yaw_rate = 0.0;

  phases_ += Vec4::Constant(omega * dt_);
  for (int i = 0; i < 4; ++i) phases_[i] = std::fmod(phases_[i], 2.0 * M_PI);
  return a;
}

Action ExternalPolicy::act(const Observation& /*obs*/) {
  Action a;
  std::string line;
  if (!std::getline(in_, line)) return a;
  std::istringstream iss(line);
  iss >> a.v_cmd[0] >> a.v_cmd[1] >> a.v_cmd[2] >> a.yaw_rate;
  if (mode_.kind == GaitKind::VariablePronk) {
    int b = 0;
    iss >> b;
    a.contacts = ContactBits::one(b != 0);
  } else if (mode_.kind == GaitKind::Unconstrained) {
    int b[4] = {1, 1, 1, 1};
    iss >> b[0] >> b[1] >> b[2] >> b[3];
    a.contacts = ContactBits::four(b[0] != 0, b[1] != 0, b[2] != 0, b[3] != 0);
  }
  return a;
}

void jointStateFromFeet(const RobotModel& model, const WholeBodyState& X, Vec12* q,
                        Vec12* qd) {
  const Mat3 R = rpyRotation(X.rpy());
  const Vec3 omega = X.body_vel.tail<3>();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const size_t li = static_cast<size_t>(leg);
    const Vec3 hip = model.hipOffsets()[li];
    Vec3 p_hip = R.transpose() * (X.foot_pos[li] - X.position()) - hip;
    p_hip = clampToWorkspace(model, p_hip, leg);
    const Vec3 qi = inverseKinematics(model, p_hip, leg);
    if (q) q->segment<3>(3 * leg) = qi;
    if (qd) {
      const Vec3 v_rel =
          X.foot_vel[li] - X.body_vel.head<3>() - omega.cross(X.foot_pos[li] - X.position());
      const Mat3 J = footJacobian(model, qi, leg);
      const Mat3 JJt = J * J.transpose() + 1e-4 * Mat3::Identity();
      qd->segment<3>(3 * leg) = J.transpose() * JJt.ldlt().solve(R.transpose() * v_rel);
    }
  }
}

Observation observe(const WholeBodyState& X, const Vec12& q, const Vec12& qd,
                    const GapWorld& world, long t, const GaitMode& mode,
                    const Action& prev_action, bool want_heightmap, bool want_depth,
                    double heightmap_pitch) {
  Observation obs;
  obs.height = X.body_pose[2];
  obs.orientation = X.rpy();
  obs.lin_vel = X.body_vel.head<3>();
  obs.ang_vel = X.body_vel.tail<3>();
  obs.q = q;
  obs.qd = qd;
  obs.phase = static_cast<double>(t % mode.cycle_steps) / mode.cycle_steps;
  obs.step = t;
  obs.prev_action = prev_action;
  obs.body_position = X.position();
  if (want_heightmap)
    obs.heightmap =
        sampleHeightmap(world, X.body_pose[0], X.body_pose[1], heightmap_pitch);
  if (want_depth) {
    CameraPose cam;
    cam.position = X.position() + rpyRotation(X.rpy()) * Vec3(0.19, 0.0, 0.0);
    cam.pitch_down = 0.5236 + X.body_pose[4];
    cam.yaw = X.yaw();
    obs.depth = preprocessDepth(renderDepth(world, cam, CameraIntrinsics{}));
  }
  return obs;
}

}  // namespace dic
