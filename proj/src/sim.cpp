#include "dic/sim.hpp"

#include <cmath>
#include <fstream>

#include "dic/errors.hpp"
#include "dic/rotation.hpp"

namespace dic {

const char* statusName(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::Running: return "running";
    case EpisodeStatus::Fell: return "fell";
    case EpisodeStatus::Tipped: return "tipped";
    case EpisodeStatus::SteppedInGap: return "stepped_in_gap";
    case EpisodeStatus::TimedOut: return "timed_out";
    case EpisodeStatus::ReachedEnd: return "reached_end";
  }
  return "unknown";
}

Simulator::Simulator(const RobotModel& model, const SimConfig& cfg, const GapWorld& world)
    : model_(model), cfg_(cfg), world_(world) {
  inertia_inv_body_ = model.body_inertia_diag.cwiseInverse().asDiagonal();
}

SimState Simulator::initialState() const {
  SimState s;
  s.X.body_pose << cfg_.start_x, 0.0, model_.standing_height, 0.0, 0.0, 0.0;
  s.X.contact = ContactState::all(true);
  const auto hips = model_.hipOffsets();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const size_t li = static_cast<size_t>(leg);
    s.X.foot_pos[li] = Vec3(cfg_.start_x + hips[li][0], hips[li][1], 0.0);
    s.anchors[li] = s.X.foot_pos[li];
  }
  return s;
}

void Simulator::step(SimState& s, const std::array<Vec3, 4>& grf,
                     const std::array<Vec3, 4>& swing_pos,
                     const std::array<Vec3, 4>& swing_vel, double dt) const {
  const Mat3 Rz = yawRotation(s.X.yaw());
  const Mat3 Iw_inv = Rz * inertia_inv_body_ * Rz.transpose();

  Vec3 force_sum = Vec3::Zero();
  Vec3 torque_sum = Vec3::Zero();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const size_t li = static_cast<size_t>(leg);
    if (!s.X.contact[leg]) continue;
    Vec3 f = grf[li];
    const Vec3 fp = projectFrictionPyramid(f, model_.friction_coefficient,
                                           model_.max_normal_force);
    if ((fp - f).lpNorm<Eigen::Infinity>() > 1e-9) {
      f = fp;
      ++s.friction_clamps;
    }
    force_sum += f;
    torque_sum += (s.X.foot_pos[li] - s.X.position()).cross(f);
  }

  // Semi-implicit Euler: velocities first, then positions with the new
  // velocities.
  const Vec3 lin_acc = force_sum / model_.mass + Vec3(0.0, 0.0, -kGravity);
  const Vec3 ang_acc = Iw_inv * torque_sum;
  s.X.body_vel.head<3>() += dt * lin_acc;
  s.X.body_vel.tail<3>() += dt * ang_acc;
  s.X.body_acc.head<3>() = lin_acc;
  s.X.body_acc.tail<3>() = ang_acc;
  s.X.body_pose.head<3>() += dt * s.X.body_vel.head<3>();
  s.X.body_pose.tail<3>() += dt * (Rz.transpose() * s.X.body_vel.tail<3>());

  for (int leg = 0; leg < kNumLegs; ++leg) {
    const size_t li = static_cast<size_t>(leg);
    if (s.X.contact[leg]) {
      s.X.foot_pos[li] = *s.anchors[li];
      s.X.foot_vel[li].setZero();
    } else {
      s.X.foot_pos[li] = swing_pos[li];
      s.X.foot_vel[li] = swing_vel[li];
    }
  }
  s.time += dt;
}

void Simulator::applyContactSchedule(SimState& s, const ContactState& c) const {
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const size_t li = static_cast<size_t>(leg);
    const bool was = s.X.contact[leg];
    const bool now = c[leg];
    if (!was && now) {
      const double x = s.X.foot_pos[li][0];
      const double y = s.X.foot_pos[li][1];
      if (heightAt(world_, x, y).is_gap) {
        s.gap_fault = true;
        const auto& gaps = world_.gapIntervals();
        for (size_t g = 0; g < gaps.size(); ++g) {
          if (x > gaps[g].left && x < gaps[g].right) {
            s.faulted_gap = static_cast<int>(g);
            break;
          }
        }
      }
      s.anchors[li] = Vec3(x, y, 0.0);
      s.X.foot_pos[li] = *s.anchors[li];
      s.X.foot_vel[li].setZero();
    } else if (was && !now) {
      s.anchors[li].reset();
    }
  }
  s.X.contact = c;
}

EpisodeStatus Simulator::checkTermination(const SimState& s) const {
  if (s.X.body_pose[2] < cfg_.min_height) return EpisodeStatus::Fell;
  if (std::abs(s.X.body_pose[3]) > cfg_.max_tilt ||
      std::abs(s.X.body_pose[4]) > cfg_.max_tilt)
    return EpisodeStatus::Tipped;
  if (s.gap_fault) return EpisodeStatus::SteppedInGap;
  if (s.hl_step >= cfg_.max_steps) return EpisodeStatus::TimedOut;
  const auto& gaps = world_.gapIntervals();
  const double end_x =
      gaps.empty() ? world_.endX() - 1.0 : gaps.back().right + 0.5;
  if (s.X.body_pose[0] >= end_x) return EpisodeStatus::ReachedEnd;
  return EpisodeStatus::Running;
}

double reward(const WholeBodyState& prev, const WholeBodyState& cur, const Vec12& qd,
              const RewardConfig& cfg) {
  const double dx = cur.body_pose[0] - prev.body_pose[0];
  const double speed = cur.body_vel.head<3>().norm();
  return cfg.c1 * dx - cfg.c2 * std::max(0.0, speed - cfg.v_thresh) -
         cfg.c3 * std::abs(cur.body_pose[3]) - cfg.c4 * std::abs(cur.body_pose[4]) -
         cfg.c5 * std::abs(cur.body_pose[5]) - cfg.c6 * qd.lpNorm<1>();
}

EpisodeResult rollout(Policy& policy, const GapWorld& world, const RobotModel& model,
                      const RolloutConfig& cfg) {
  Simulator sim(model, cfg.sim, world);
  SimState s = sim.initialState();

  TrajectoryGenerator wtg(model, cfg.mode, cfg.wtg);
  wtg.reset(s.X.position(), 0.0, 0);
  if (FootholdAdapter adapter = policy.footholdAdapter(world))
    wtg.setFootholdAdapter(std::move(adapter));
  policy.reset();

  MpcController mpc(model, cfg.mpc_weights, cfg.wtg.dt, cfg.sim.dt);
  SolverOptions mpc_opts;
  mpc_opts.tol = cfg.mpc_tol;
  mpc_opts.max_iter = cfg.mpc_max_iter;

  EpisodeResult result;
  result.max_x = s.X.body_pose[0];
  const double start_x = s.X.body_pose[0];

  Vec12 q = Vec12::Zero(), qd = Vec12::Zero();
  jointStateFromFeet(model, s.X, &q, &qd);
  Action prev_action;

  for (long t = 0; t < cfg.sim.max_steps; ++t) {
    s.status = sim.checkTermination(s);
    if (s.status != EpisodeStatus::Running) break;

    const Observation obs =
        observe(s.X, q, qd, world, t, cfg.mode, prev_action, policy.wantsHeightmap(),
                policy.wantsDepth(), cfg.heightmap_pitch);
    const Action action = policy.act(obs);

    wtg.setMeasuredVelocity(s.X.body_vel.head<3>());
    wtg.extend(action, t);
    const TrajectoryWindow window = makeWindow(wtg);
    const GRFPlan plan = mpc.solve(window, s.X, mpc_opts);
    result.mpc_iterations += plan.stats.iterations;

    const WholeBodyState prevX = s.X;
    const WholeBodyState& des0 = window.states[0];
    const WholeBodyState& des1 = window.states[1];

    JointCommand cmd;
    std::array<Vec3, 4> swing_pos, swing_vel;
    for (int sub = 0; sub < cfg.sim.substeps; ++sub) {
      const double u = static_cast<double>(sub + 1) / cfg.sim.substeps;
      for (int leg = 0; leg < kNumLegs; ++leg) {
        const size_t li = static_cast<size_t>(leg);
        swing_pos[li] = (1.0 - u) * des0.foot_pos[li] + u * des1.foot_pos[li];
        swing_vel[li] = (1.0 - u) * des0.foot_vel[li] + u * des1.foot_vel[li];
      }
      if (sub % cfg.sim.wbic_every == 0) {
        WholeBodyState desired = des1;
        desired.contact = s.X.contact;
        for (int leg = 0; leg < kNumLegs; ++leg) {
          const size_t li = static_cast<size_t>(leg);
          desired.foot_pos[li] = swing_pos[li];
          desired.foot_vel[li] = swing_vel[li];
        }
        cmd = wholeBodyCommand(model, cfg.wbic, desired, s.X, plan.forces[0], q);
      }
      sim.step(s, plan.forces[0], swing_pos, swing_vel, cfg.sim.dt);
    }

    sim.applyContactSchedule(s, wtg.at(t + 1).contact);
    s.hl_step = t + 1;

    jointStateFromFeet(model, s.X, &q, &qd);
    const double r = reward(prevX, s.X, qd, cfg.reward);
    result.cumulative_reward += r;
    result.max_x = std::max(result.max_x, s.X.body_pose[0]);
    result.steps = t + 1;
    prev_action = action;

    if (cfg.log_trajectory) {
      TrajectoryLogRow row;
      row.time = s.time;
      row.body_pose = s.X.body_pose;
      row.body_vel = s.X.body_vel;
      row.foot_pos = s.X.foot_pos;
      row.contact = s.X.contact;
      row.grf = plan.forces[0];
      row.reward = r;
      result.trajectory.push_back(row);
    }
  }

  if (s.status == EpisodeStatus::Running) s.status = sim.checkTermination(s);
  result.status = s.status;
  result.distance = s.X.body_pose[0] - start_x;
  countGapOutcomes(world, result.max_x, s.faulted_gap, &result.gaps_attempted,
                   &result.gaps_crossed);
  return result;
}

void countGapOutcomes(const GapWorld& world, double max_x, int faulted_gap,
                      int* attempted, int* crossed, double attempt_radius) {
  int att = 0, crs = 0;
  const auto& gaps = world.gapIntervals();
  for (size_t g = 0; g < gaps.size(); ++g) {
    const bool approached = max_x >= gaps[g].left - attempt_radius ||
                            static_cast<int>(g) == faulted_gap;
    if (approached) ++att;
    if (max_x > gaps[g].right && static_cast<int>(g) != faulted_gap) ++crs;
  }
  if (attempted) *attempted = att;
  if (crossed) *crossed = crs;
}

void writeTrajectoryCsv(const std::vector<TrajectoryLogRow>& rows,
                        const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.precision(12);
  f << "time,x,y,z,roll,pitch,yaw,vx,vy,vz,wx,wy,wz";
  const char* legs[] = {"lf", "rf", "lr", "rr"};
  for (const char* l : legs) f << ",foot_" << l << "_x,foot_" << l << "_y,foot_" << l << "_z";
  for (const char* l : legs) f << ",contact_" << l;
  for (const char* l : legs) f << ",grf_" << l << "_x,grf_" << l << "_y,grf_" << l << "_z";
  f << ",reward\n";
  for (const auto& row : rows) {
    f << row.time;
    for (int i = 0; i < 6; ++i) f << "," << row.body_pose[i];
    for (int i = 0; i < 6; ++i) f << "," << row.body_vel[i];
    for (const auto& p : row.foot_pos)
      for (int i = 0; i < 3; ++i) f << "," << p[i];
    for (int leg = 0; leg < 4; ++leg) f << "," << (row.contact[leg] ? 1 : 0);
    for (const auto& g : row.grf)
      for (int i = 0; i < 3; ++i) f << "," << g[i];
    f << "," << row.reward << "\n";
  }
}

}  // namespace dic
