#include "dic/grf_mpc.hpp"

#include <algorithm>
#include <cmath>

#include "dic/errors.hpp"

namespace dic {
namespace {

using Vec13 = Eigen::Matrix<double, 13, 1>;
using Eigen::VectorXd;

Mat3 yawRotation(double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Mat3 R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

Mat3 crossMatrix(const Vec3& v) {
  Mat3 M;
  M << 0, -v[2], v[1], v[2], 0, -v[0], -v[1], v[0], 0;
  return M;
}

// One horizon step of the linearized single-rigid-body model, discretized to
// match the simulator's semi-implicit 1 kHz integration under zero-order-hold
// forces: velocity advances by dt, position accumulates dt*(dt+dt_sim)/2 of
// the acceleration.
struct Stage {
  Mat3 Rz, RzT, Iw_inv;
  ContactState contact;
  std::array<Vec3, 4> r{};
  double f_ref_z = 0.0;
  int n_stance = 0;
  int var_offset = 0;
};

struct ProblemData {
  int H = 0;
  double dt = 0.036, c2 = 0.0, mass = 9.0, mu = 0.4, f_max = 120.0, w_force = 1e-6;
  Vec13 Qdiag = Vec13::Zero();
  std::vector<Stage> stages;
  std::vector<Vec13> err_base;  // xhat_k - xdes_k for k = 1..H
  std::vector<QpProblem::VarRef> vars;
  VectorXd f_ref;
  int n_vars = 0;
  long base_step = 0;

  // State layout: [rpy(3), pos(3), angvel(3), linvel(3), gravity(1)].
  Vec13 applyA(const Stage& st, const Vec13& x) const {
    Vec13 out = x;
    out.segment<3>(0) += dt * (st.RzT * x.segment<3>(6));
    out.segment<3>(3) += dt * x.segment<3>(9);
    out[3 + 2] -= c2 * x[12];
    out[9 + 2] -= dt * x[12];
    return out;
  }

  void addB(const Stage& st, const double* f, Vec13& x) const {
    for (int i = 0; i < st.n_stance; ++i) {
      const int leg = stanceLeg(st, i);
      const Vec3 fi(f[3 * i], f[3 * i + 1], f[3 * i + 2]);
      const Vec3 tau = st.r[static_cast<size_t>(leg)].cross(fi);
      const Vec3 wdot = st.Iw_inv * tau;
      x.segment<3>(6) += dt * wdot;
      x.segment<3>(0) += c2 * (st.RzT * wdot);
      x.segment<3>(9) += (dt / mass) * fi;
      x.segment<3>(3) += (c2 / mass) * fi;
    }
  }

  Vec13 applyAT(const Stage& st, const Vec13& lam) const {
    Vec13 out = lam;
    out.segment<3>(6) += dt * (st.Rz * lam.segment<3>(0));
    out.segment<3>(9) += dt * lam.segment<3>(3);
    out[12] += -c2 * lam[5] - dt * lam[11];
    return out;
  }

  void applyBT(const Stage& st, const Vec13& lam, double* g) const {
    const Vec3 lw = st.Iw_inv * lam.segment<3>(6);
    const Vec3 lth = st.Iw_inv * (st.Rz * lam.segment<3>(0));
    for (int i = 0; i < st.n_stance; ++i) {
      const int leg = stanceLeg(st, i);
      const Mat3 rx = crossMatrix(st.r[static_cast<size_t>(leg)]);
      Vec3 gi = (dt / mass) * lam.segment<3>(9) + (c2 / mass) * lam.segment<3>(3);
      gi -= dt * (rx * lw);
      gi -= c2 * (rx * lth);
      for (int a = 0; a < 3; ++a) g[3 * i + a] += gi[a];
    }
  }

  int stanceLeg(const Stage& st, int i) const {
    int n = 0;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      if (st.contact[leg]) {
        if (n == i) return leg;
        ++n;
      }
    }
    return -1;
  }

  // J(F) and optionally its gradient.
  double objective(const VectorXd& F, VectorXd* grad) const {
    std::vector<Vec13> err(static_cast<size_t>(H));
    Vec13 x = Vec13::Zero();
    for (int k = 0; k < H; ++k) {
      Vec13 xn = applyA(stages[static_cast<size_t>(k)], x);
      if (stages[static_cast<size_t>(k)].n_stance > 0)
        addB(stages[static_cast<size_t>(k)],
             F.data() + stages[static_cast<size_t>(k)].var_offset, xn);
      x = xn;
      err[static_cast<size_t>(k)] = x + err_base[static_cast<size_t>(k)];
    }
    double J = 0.0;
    for (int k = 0; k < H; ++k)
      J += (Qdiag.array() * err[static_cast<size_t>(k)].array().square()).sum();
    const VectorXd df = F - f_ref;
    J += w_force * df.squaredNorm();

    if (grad) {
      grad->setZero(n_vars);
      Vec13 lam = Vec13::Zero();
      for (int k = H - 1; k >= 0; --k) {
        lam += (2.0 * Qdiag.array() * err[static_cast<size_t>(k)].array()).matrix();
        const Stage& st = stages[static_cast<size_t>(k)];
        if (st.n_stance > 0) applyBT(st, lam, grad->data() + st.var_offset);
        if (k > 0) lam = applyAT(stages[static_cast<size_t>(k)], lam);
      }
      *grad += 2.0 * w_force * df;
    }
    return J;
  }

  // P * v (Hessian action). The homogeneous forward pass starts from zero,
  // so the gravity state stays zero and only the force response propagates.
  VectorXd hessianApply(const VectorXd& v) const {
    std::vector<Vec13> xt(static_cast<size_t>(H));
    Vec13 x = Vec13::Zero();
    for (int k = 0; k < H; ++k) {
      const Stage& st = stages[static_cast<size_t>(k)];
      Vec13 xn = applyA(st, x);
      if (st.n_stance > 0) addB(st, v.data() + st.var_offset, xn);
      x = xn;
      xt[static_cast<size_t>(k)] = x;
    }
    VectorXd out = VectorXd::Zero(n_vars);
    Vec13 lam = Vec13::Zero();
    for (int k = H - 1; k >= 0; --k) {
      lam += (2.0 * Qdiag.array() * xt[static_cast<size_t>(k)].array()).matrix();
      const Stage& st = stages[static_cast<size_t>(k)];
      if (st.n_stance > 0) applyBT(st, lam, out.data() + st.var_offset);
      if (k > 0) lam = applyAT(stages[static_cast<size_t>(k)], lam);
    }
    out += 2.0 * w_force * v;
    return out;
  }

  double lipschitz() const {
    if (n_vars == 0) return 1.0;
    VectorXd v = VectorXd::Zero(n_vars);
    for (int i = 0; i < n_vars; ++i) v[i] = ((i % 3) == 2) ? 1.0 : 0.3;
    v.normalize();
    double lam = 1.0;
    for (int it = 0; it < 40; ++it) {
      VectorXd w = hessianApply(v);
      lam = w.norm();
      if (lam <= 1e-18) return 2.0 * w_force;
      v = w / lam;
    }
    return lam;
  }

  void project(VectorXd& F) const {
    for (int b = 0; b < n_vars / 3; ++b) {
      Vec3 f(F[3 * b], F[3 * b + 1], F[3 * b + 2]);
      f = projectFrictionPyramid(f, mu, f_max);
      F[3 * b] = f[0];
      F[3 * b + 1] = f[1];
      F[3 * b + 2] = f[2];
    }
  }
};

ProblemData buildProblemData(const TrajectoryWindow& window, const WholeBodyState& x0,
                             const RobotModel& model, const MpcWeights& weights,
                             double dt_hl, double dt_sim) {
  if (window.horizon() < 1) throw Error("MPC window must cover at least one step");
  ProblemData pd;
  pd.H = window.horizon();
  pd.dt = dt_hl;
  pd.c2 = 0.5 * dt_hl * (dt_hl + dt_sim);
  pd.mass = model.mass;
  pd.mu = model.friction_coefficient;
  pd.f_max = model.max_normal_force;
  pd.w_force = weights.w_force;
  pd.base_step = window.base_step;
  if (pd.f_max <= 0.0 || pd.mu <= 0.0)
    throw Error("infeasible force bounds");  // defensive; 0 is always feasible otherwise
  pd.Qdiag << weights.w_orientation, weights.w_position, weights.w_angvel,
      weights.w_linvel, 0.0;

  const Mat3 I_body_inv = model.body_inertia_diag.cwiseInverse().asDiagonal();

  pd.stages.resize(static_cast<size_t>(pd.H));
  int offset = 0;
  for (int k = 0; k < pd.H; ++k) {
    const WholeBodyState& s = window.states[static_cast<size_t>(k)];
    Stage& st = pd.stages[static_cast<size_t>(k)];
    st.Rz = yawRotation(s.yaw());
    st.RzT = st.Rz.transpose();
    st.Iw_inv = st.Rz * I_body_inv * st.RzT;
    st.contact = s.contact;
    st.n_stance = s.contact.stanceCount();
    st.var_offset = offset;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      st.r[static_cast<size_t>(leg)] =
          s.foot_pos[static_cast<size_t>(leg)] - s.position();
      if (s.contact[leg]) pd.vars.push_back({k, leg});
    }
    st.f_ref_z = st.n_stance > 0 ? pd.mass * kGravity / st.n_stance : 0.0;
    offset += 3 * st.n_stance;
  }
  pd.n_vars = offset;

  pd.f_ref.setZero(pd.n_vars);
  for (size_t b = 0; b < pd.vars.size(); ++b)
    pd.f_ref[static_cast<long>(3 * b + 2)] =
        pd.stages[static_cast<size_t>(pd.vars[b].step)].f_ref_z;

  // Base error: propagate the measured state with zero forces and compare to
  // the desired window.
  Vec13 xhat;
  xhat << x0.rpy(), x0.position(), x0.body_vel.tail<3>(), x0.body_vel.head<3>(),
      kGravity;
  pd.err_base.resize(static_cast<size_t>(pd.H));
  for (int k = 0; k < pd.H; ++k) {
    xhat = pd.applyA(pd.stages[static_cast<size_t>(k)], xhat);
    const WholeBodyState& des = window.states[static_cast<size_t>(k) + 1];
    Vec13 xdes;
    xdes << des.rpy(), des.position(), des.body_vel.tail<3>(), des.body_vel.head<3>(),
        kGravity;
    pd.err_base[static_cast<size_t>(k)] = xhat - xdes;
  }
  return pd;
}

// Monotone projected gradient with Armijo backtracking. The iterates stay
// feasible after the first projection, so the objective trace is a
// non-increasing sequence of attainable costs.
template <class Objective, class Project>
SolveStats pgdSolve(VectorXd& F, Objective&& objective, Project&& project, double L,
                    const SolverOptions& opts) {
  SolveStats stats;
  if (F.size() == 0) {
    stats.converged = true;
    return stats;
  }
  project(F);
  VectorXd grad(F.size()), trial(F.size());
  double J = objective(F, &grad);
  double alpha = 1.0 / std::max(L, 1e-12);
  const double alpha_max = 8.0 / std::max(L, 1e-12);

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    trial = F - grad;
    project(trial);
    const double residual = (F - trial).lpNorm<Eigen::Infinity>();
    stats.kkt_residual = residual;
    if (opts.trace) opts.trace->push_back({static_cast<double>(it), residual, J});
    if (residual <= opts.tol) {
      stats.converged = true;
      break;
    }

    bool accepted = false;
    double a = alpha;
    for (int bt = 0; bt < 60; ++bt) {
      trial = F - a * grad;
      project(trial);
      const double Jt = objective(trial, nullptr);
      if (Jt <= J) {
        F = trial;
        J = objective(F, &grad);
        alpha = std::min(a * 1.25, alpha_max);
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      // Numerical floor: no decrease possible at any step size.
      stats.converged = residual <= opts.tol * 16.0;
      ++it;
      break;
    }
  }
  stats.iterations = it;
  stats.objective = J;
  if (it >= opts.max_iter) stats.converged = false;
  return stats;
}

GRFPlan scatterPlan(const VectorXd& F, const std::vector<QpProblem::VarRef>& vars,
                    int H, long base_step, const SolveStats& stats) {
  GRFPlan plan;
  plan.base_step = base_step;
  plan.horizon = H;
  plan.forces.assign(static_cast<size_t>(H), {Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                                              Vec3::Zero()});
  for (size_t b = 0; b < vars.size(); ++b) {
    plan.forces[static_cast<size_t>(vars[b].step)][static_cast<size_t>(vars[b].leg)] =
        Vec3(F[static_cast<long>(3 * b)], F[static_cast<long>(3 * b + 1)],
             F[static_cast<long>(3 * b + 2)]);
  }
  plan.stats = stats;
  return plan;
}

}  // namespace

Vec3 projectFrictionPyramid(const Vec3& f, double mu, double f_max) {
  const double ax = std::abs(f[0]), ay = std::abs(f[1]);
  if (f[2] >= 0.0 && f[2] <= f_max && ax <= mu * f[2] && ay <= mu * f[2]) return f;

  // Nearest point has fx, fy clamped to the pyramid at height z; minimize the
  // resulting 1-D convex distance over z in [0, f_max].
  auto dhalf = [&](double z) {
    double d = z - f[2];
    if (ax > mu * z) d -= mu * (ax - mu * z);
    if (ay > mu * z) d -= mu * (ay - mu * z);
    return d;
  };

  double z = 0.0;
  if (dhalf(0.0) >= 0.0) {
    z = 0.0;
  } else if (dhalf(f_max) <= 0.0) {
    z = f_max;
  } else {
    double b1 = ax / mu, b2 = ay / mu;
    if (b1 > b2) std::swap(b1, b2);
    const double edges[4] = {0.0, std::clamp(b1, 0.0, f_max), std::clamp(b2, 0.0, f_max),
                             f_max};
    for (int i = 0; i < 3; ++i) {
      const double lo = edges[i], hi = edges[i + 1];
      if (hi <= lo) continue;
      const double mid = 0.5 * (lo + hi);
      const double cx = ax > mu * mid ? 1.0 : 0.0;
      const double cy = ay > mu * mid ? 1.0 : 0.0;
      const double zs = (f[2] + mu * (cx * ax + cy * ay)) / (1.0 + mu * mu * (cx + cy));
      if (zs >= lo - 1e-12 && zs <= hi + 1e-12) {
        z = std::clamp(zs, lo, hi);
        break;
      }
    }
  }
  const double bound = mu * z;
  return Vec3(std::clamp(f[0], -bound, bound), std::clamp(f[1], -bound, bound),
              std::clamp(z, 0.0, f_max));
}

TrajectoryWindow makeWindow(const TrajectoryGenerator& traj) {
  TrajectoryWindow w;
  w.base_step = traj.frontStep();
  w.states.reserve(static_cast<size_t>(traj.backStep() - traj.frontStep() + 1));
  for (long s = traj.frontStep(); s <= traj.backStep(); ++s) w.states.push_back(traj.at(s));
  return w;
}

bool QpProblem::checkPsd() const {
  if (P.rows() == 0) return true;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(P);
  if (ldlt.info() != Eigen::Success) return false;
  return (ldlt.vectorD().array() >= -1e-9).all();
}

double QpProblem::objective(const Eigen::VectorXd& f) const {
  if (f.size() == 0) return cost_offset;
  return 0.5 * f.dot(P * f) + q.dot(f) + cost_offset;
}

bool QpProblem::feasible(const Eigen::VectorXd& f, double tol) const {
  if (A.rows() == 0) return true;
  const Eigen::VectorXd y = A * f;
  return (y.array() >= lower.array() - tol).all() &&
         (y.array() <= upper.array() + tol).all();
}

QpProblem buildQp(const TrajectoryWindow& window, const WholeBodyState& x0,
                  const RobotModel& model, const MpcWeights& weights, double dt_hl,
                  double dt_sim) {
  const ProblemData pd = buildProblemData(window, x0, model, weights, dt_hl, dt_sim);
  QpProblem qp;
  qp.vars = pd.vars;
  qp.horizon = pd.H;
  qp.base_step = pd.base_step;
  qp.mu = pd.mu;
  qp.f_max = pd.f_max;
  qp.f_ref = pd.f_ref;

  const int n = pd.n_vars;
  qp.P.resize(n, n);
  qp.q.resize(n);
  if (n > 0) {
    for (int j = 0; j < n; ++j) {
      VectorXd e = VectorXd::Zero(n);
      e[j] = 1.0;
      qp.P.col(j) = pd.hessianApply(e);
    }
    qp.P = 0.5 * (qp.P + qp.P.transpose()).eval();
    VectorXd g0(n);
    const double J0 = pd.objective(VectorXd::Zero(n), &g0);
    qp.q = g0;
    qp.cost_offset = J0;
  } else {
    VectorXd empty;
    qp.cost_offset = pd.objective(empty, nullptr);
  }

  // Five rows per stance foot-step: two per tangential axis plus the normal
  // box.
  const int m = 5 * n / 3;
  qp.A = Eigen::MatrixXd::Zero(m, n);
  qp.lower.resize(m);
  qp.upper.resize(m);
  constexpr double kInf = 1e30;
  for (int b = 0; b < n / 3; ++b) {
    const int c = 3 * b;
    int r = 5 * b;
    qp.A(r, c) = 1.0;
    qp.A(r, c + 2) = -qp.mu;
    qp.lower[r] = -kInf;
    qp.upper[r] = 0.0;
    ++r;
    qp.A(r, c) = 1.0;
    qp.A(r, c + 2) = qp.mu;
    qp.lower[r] = 0.0;
    qp.upper[r] = kInf;
    ++r;
    qp.A(r, c + 1) = 1.0;
    qp.A(r, c + 2) = -qp.mu;
    qp.lower[r] = -kInf;
    qp.upper[r] = 0.0;
    ++r;
    qp.A(r, c + 1) = 1.0;
    qp.A(r, c + 2) = qp.mu;
    qp.lower[r] = 0.0;
    qp.upper[r] = kInf;
    ++r;
    qp.A(r, c + 2) = 1.0;
    qp.lower[r] = 0.0;
    qp.upper[r] = qp.f_max;
  }
  return qp;
}

GRFPlan solveQp(const QpProblem& qp, const SolverOptions& opts) {
  const int n = qp.numVars();
  VectorXd F = qp.f_ref;
  if (n == 0) {
    SolveStats stats;
    stats.converged = true;
    stats.objective = qp.cost_offset;
    return scatterPlan(F, qp.vars, qp.horizon, qp.base_step, stats);
  }

  // Power iteration for the step size.
  VectorXd v = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) v[i] = ((i % 3) == 2) ? 1.0 : 0.3;
  v.normalize();
  double L = 1.0;
  for (int it = 0; it < 40; ++it) {
    VectorXd w = qp.P * v;
    L = w.norm();
    if (L <= 1e-18) break;
    v = w / L;
  }
  L = std::max(L * 1.05, 1e-12);

  auto objective = [&](const VectorXd& f, VectorXd* grad) {
    const VectorXd Pf = qp.P * f;
    if (grad) *grad = Pf + qp.q;
    return 0.5 * f.dot(Pf) + qp.q.dot(f) + qp.cost_offset;
  };
  auto project = [&](VectorXd& f) {
    for (int b = 0; b < n / 3; ++b) {
      const Vec3 fb = projectFrictionPyramid(Vec3(f[3 * b], f[3 * b + 1], f[3 * b + 2]),
                                             qp.mu, qp.f_max);
      f[3 * b] = fb[0];
      f[3 * b + 1] = fb[1];
      f[3 * b + 2] = fb[2];
    }
  };
  const SolveStats stats = pgdSolve(F, objective, project, L, opts);
  return scatterPlan(F, qp.vars, qp.horizon, qp.base_step, stats);
}

GRFPlan solveQp(const QpProblem& qp, double tol, int max_iter) {
  SolverOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solveQp(qp, opts);
}

MpcController::MpcController(const RobotModel& model, MpcWeights weights, double dt_hl,
                             double dt_sim)
    : model_(model), weights_(weights), dt_hl_(dt_hl), dt_sim_(dt_sim) {}

GRFPlan MpcController::solve(const TrajectoryWindow& window, const WholeBodyState& x0,
                             const SolverOptions& opts) {
  const ProblemData pd =
      buildProblemData(window, x0, model_, weights_, dt_hl_, dt_sim_);
  VectorXd F = pd.f_ref;
  for (size_t b = 0; b < pd.vars.size(); ++b) {
    const long abs_step = pd.base_step + pd.vars[b].step;
    auto it = warm_.find(abs_step);
    if (it != warm_.end()) {
      const Vec3& w = it->second[static_cast<size_t>(pd.vars[b].leg)];
      F.segment<3>(static_cast<long>(3 * b)) = w;
    }
  }

  SolveStats stats;
  if (pd.n_vars > 0) {
    const double L = std::max(pd.lipschitz() * 1.05, 1e-12);
    auto objective = [&](const VectorXd& f, VectorXd* grad) {
      return pd.objective(f, grad);
    };
    auto project = [&](VectorXd& f) { pd.project(f); };
    stats = pgdSolve(F, objective, project, L, opts);
  } else {
    stats.converged = true;
    stats.objective = pd.objective(F, nullptr);
  }

  GRFPlan plan = scatterPlan(F, pd.vars, pd.H, pd.base_step, stats);

  warm_.erase(warm_.begin(), warm_.lower_bound(pd.base_step));
  for (int k = 0; k < pd.H; ++k)
    warm_[pd.base_step + k] = plan.forces[static_cast<size_t>(k)];
  return plan;
}

}  // namespace dic
