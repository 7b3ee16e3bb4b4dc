#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dic/gait.hpp"
#include "dic/grf_mpc.hpp"
#include "dic/model.hpp"
#include "dic/policies.hpp"
#include "dic/terrain.hpp"
#include "dic/wbic.hpp"
#include "dic/wtg.hpp"

namespace dic {

enum class EpisodeStatus { Running, Fell, Tipped, SteppedInGap, TimedOut, ReachedEnd };

const char* statusName(EpisodeStatus s);

struct SimConfig {
  double dt = 0.001;          // s, integration step
  int substeps = 36;          // per high-level step (dt_hl = substeps * dt)
  int wbic_every = 2;         // WBIC cadence in sim steps (500 Hz)
  double min_height = 0.20;   // m, below this the episode counts as a fall
  double max_tilt = 0.7;      // rad, roll or pitch beyond this tips the episode
  long max_steps = 500;       // high-level steps (25 s)
  double start_x = 0.24;      // m into the leading flat
};

// Reduced-order state: the whole-body state plus pin anchors for stance feet
// and the episode bookkeeping flags.
struct SimState {
  WholeBodyState X;
  double time = 0.0;
  long hl_step = 0;
  std::array<std::optional<Vec3>, 4> anchors;
  bool gap_fault = false;       // a foot was placed in a gap
  int faulted_gap = -1;         // index of that gap
  long friction_clamps = 0;     // defensive clamp events (fault injection)
  EpisodeStatus status = EpisodeStatus::Running;
};

// Centroidal rigid-body integrator: commanded GRFs act on the body, legs are
// massless, stance feet are kinematically pinned, swing feet follow their
// commanded curves.
class Simulator {
 public:
  Simulator(const RobotModel& model, const SimConfig& cfg, const GapWorld& world);

  SimState initialState() const;

  // One semi-implicit integration step of dt seconds under zero-order-hold
  // forces; swing feet are teleported to the given samples.
  void step(SimState& s, const std::array<Vec3, 4>& grf,
            const std::array<Vec3, 4>& swing_pos, const std::array<Vec3, 4>& swing_vel,
            double dt) const;

  // Contact transition at a high-level boundary: pins feet entering stance
  // (checking the terrain under them), releases feet entering swing.
  void applyContactSchedule(SimState& s, const ContactState& c) const;

  // First matching termination rule: fall, tip, gap step, timeout, end.
  EpisodeStatus checkTermination(const SimState& s) const;

  const SimConfig& config() const { return cfg_; }
  const GapWorld& world() const { return world_; }

 private:
  RobotModel model_;
  SimConfig cfg_;
  const GapWorld& world_;
  Mat3 inertia_inv_body_;
};

struct RewardConfig {
  double c1 = 1.0, c2 = 0.5, c3 = 0.02, c4 = 0.05, c5 = 0.15, c6 = 0.03;
  double v_thresh = 1.0;  // m/s
};

// Forward progress minus speed, attitude and joint-velocity penalties; the
// joint-velocity norm is L1.
double reward(const WholeBodyState& prev, const WholeBodyState& cur, const Vec12& qd,
              const RewardConfig& cfg = {});

struct TrajectoryLogRow {
  double time;
  Vec6 body_pose, body_vel;
  std::array<Vec3, 4> foot_pos;
  ContactState contact;
  std::array<Vec3, 4> grf;
  double reward;
};

struct EpisodeResult {
  EpisodeStatus status = EpisodeStatus::Running;
  double distance = 0.0;
  double max_x = 0.0;
  int gaps_crossed = 0;
  int gaps_attempted = 0;
  double cumulative_reward = 0.0;
  long steps = 0;
  long mpc_iterations = 0;
  std::vector<TrajectoryLogRow> trajectory;  // filled when logging is on
};

struct RolloutConfig {
  GaitMode mode;
  WtgConfig wtg;
  MpcWeights mpc_weights;
  double mpc_tol = 1e-5;
  int mpc_max_iter = 500;
  WbicConfig wbic;
  SimConfig sim;
  RewardConfig reward;
  double heightmap_pitch = 0.025;
  bool log_trajectory = false;
};

// The full control loop: observe, act, extend the trajectory, solve the
// force MPC, run WBIC and the 1 kHz simulator, apply the contact schedule,
// score the reward, check termination. Deterministic for fixed inputs.
EpisodeResult rollout(Policy& policy, const GapWorld& world, const RobotModel& model,
                      const RolloutConfig& cfg);

void writeTrajectoryCsv(const std::vector<TrajectoryLogRow>& rows,
                        const std::string& path);

// How far into the world the body got: gaps crossed and gaps approached
// (within the attempt radius of the left edge or faulted directly).
void countGapOutcomes(const GapWorld& world, double max_x, int faulted_gap,
                      int* attempted, int* crossed, double attempt_radius = 0.35);

}  // namespace dic
