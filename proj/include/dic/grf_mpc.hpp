#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "dic/model.hpp"
#include "dic/wtg.hpp"

namespace dic {

// Tracking weights for the linearized single-rigid-body MPC. The gravity
// state carries no weight; force regularization is centered on an equal
// gravity share across the stance feet of each step.
struct MpcWeights {
  Vec3 w_orientation{1.0, 1.0, 1.0};
  Vec3 w_position{1.0, 1.0, 50.0};
  Vec3 w_angvel{0.1, 0.1, 0.1};
  Vec3 w_linvel{1.0, 1.0, 1.0};
  double w_force = 1e-6;
};

struct SolveStats {
  int iterations = 0;
  double kkt_residual = 0.0;
  double objective = 0.0;
  bool converged = true;
};

// Per-foot, per-step world-frame ground reaction forces over the horizon.
// Swing feet carry exactly zero force; stance forces satisfy the friction
// pyramid and normal-force box exactly.
struct GRFPlan {
  long base_step = 0;
  int horizon = 0;
  std::vector<std::array<Vec3, 4>> forces;
  SolveStats stats;

  const Vec3& force(int step, int leg) const {
    return forces[static_cast<size_t>(step)][static_cast<size_t>(leg)];
  }
};

// H+1 desired states for steps [base_step, base_step + H].
struct TrajectoryWindow {
  long base_step = 0;
  std::vector<WholeBodyState> states;

  int horizon() const { return static_cast<int>(states.size()) - 1; }
};

TrajectoryWindow makeWindow(const TrajectoryGenerator& traj);

// Condensed QP over the stacked stance forces: minimize
//   sum_k (x_k - x_k^des)' Q (x_k - x_k^des) + w_f ||F - F_ref||^2
// subject to per-foot friction pyramid and normal-force box rows
// (l <= A F <= u, five rows per stance foot-step).
struct QpProblem {
  Eigen::MatrixXd P;  // symmetric PSD
  Eigen::VectorXd q;
  double cost_offset = 0.0;  // constant tracking term
  Eigen::MatrixXd A;
  Eigen::VectorXd lower, upper;

  struct VarRef {
    int step;
    int leg;
  };
  std::vector<VarRef> vars;  // one entry per 3-vector force block
  int horizon = 0;
  long base_step = 0;
  double mu = 0.4;
  double f_max = 120.0;
  Eigen::VectorXd f_ref;

  int numVars() const { return static_cast<int>(P.rows()); }
  bool checkPsd() const;  // attempted LDLT factorization
  double objective(const Eigen::VectorXd& f) const;
  bool feasible(const Eigen::VectorXd& f, double tol = 1e-9) const;
};

// Euclidean projection onto {0 <= f_z <= f_max, |f_x| <= mu f_z,
// |f_y| <= mu f_z}. Exact (1-D convex minimization over f_z); idempotent.
Vec3 projectFrictionPyramid(const Vec3& f, double mu, double f_max);

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 20000;
  std::vector<std::array<double, 3>>* trace = nullptr;  // (iter, residual, objective)
};

// Build the explicit condensed QP (tests, diagnostics, oracle input).
QpProblem buildQp(const TrajectoryWindow& window, const WholeBodyState& x0,
                  const RobotModel& model, const MpcWeights& weights,
                  double dt_hl = 0.036, double dt_sim = 0.001);

// Monotone projected-gradient solve of an explicit QpProblem.
GRFPlan solveQp(const QpProblem& qp, double tol = 1e-6, int max_iter = 20000);
GRFPlan solveQp(const QpProblem& qp, const SolverOptions& opts);

// Receding-horizon controller: same math as buildQp/solveQp but with
// structure-exploiting matrix-free gradients and a warm start shifted from
// the previous plan. One instance per control loop.
class MpcController {
 public:
  MpcController(const RobotModel& model, MpcWeights weights, double dt_hl = 0.036,
                double dt_sim = 0.001);

  GRFPlan solve(const TrajectoryWindow& window, const WholeBodyState& x0,
                const SolverOptions& opts = {});

  void resetWarmStart() { warm_.clear(); }

 private:
  RobotModel model_;
  MpcWeights weights_;
  double dt_hl_, dt_sim_;
  std::map<long, std::array<Vec3, 4>> warm_;
};

}  // namespace dic
