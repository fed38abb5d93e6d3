#include "grasp/jpo.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <stdexcept>
#include <string>

namespace grasp {

JpoSystem build_jpo_system(const ContactSet& contacts, const CollisionSet& collisions,
                           const PosedHand& posed, const HandState& state, const HandModel& model,
                           const Vec3& p_com, const UnitVec3& n_perp, double w, double beta) {
  const auto nj = static_cast<Eigen::Index>(model.num_joints());
  const auto nc = static_cast<Eigen::Index>(contacts.size());
  const auto no = static_cast<Eigen::Index>(collisions.object_pairs.size());
  const auto ng = static_cast<Eigen::Index>(collisions.ground_pairs.size());
  JpoSystem sys;
  const Eigen::Index rows = 3 * nc + nj + 3 * no + ng;
  sys.C = Eigen::MatrixXd::Zero(rows, nj);
  sys.d = Eigen::VectorXd::Zero(rows);
  sys.lo = model.q_min() - state.q();
  sys.hi = model.q_max() - state.q();
  sys.tags.reserve(static_cast<std::size_t>(rows));

  std::vector<Eigen::Matrix3Xd> jv, jw;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    jv.push_back(translational_jacobian(model, posed, i));
    jw.push_back(rotational_jacobian(model, posed, i));
  }
  auto finger_cols = [&](std::size_t i) {
    return std::pair{static_cast<Eigen::Index>(model.joint_offset(i)), jv[i].cols()};
  };

  Eigen::Index row = 0;
  for (std::size_t i = 0; i < contacts.size(); ++i, ++row) {
    const auto& f = contacts.fingers[i];
    const auto [c0, n] = finger_cols(i);
    sys.C.block(row, c0, 1, n) = n_perp.transpose() * jv[i];
    sys.d[row] = (p_com - f.fingertip).dot(n_perp);
    sys.tags.push_back(RowTag::com);
  }
  const Eigen::VectorXd scale = model.alpha().cwiseQuotient(model.q_max() - model.q_min());
  for (Eigen::Index j = 0; j < nj; ++j, ++row) {
    sys.C(row, j) = scale[j];
    sys.d[row] = scale[j] * (model.q_mean()[j] - state.q()[j]);
    sys.tags.push_back(RowTag::jc);
  }
  for (std::size_t i = 0; i < contacts.size(); ++i, ++row) {
    const auto& f = contacts.fingers[i];
    const auto [c0, n] = finger_cols(i);
    sys.C.block(row, c0, 1, n) = beta * f.fingertip_normal.cross(f.contact_normal).transpose() * jw[i];
    sys.d[row] = -beta * (f.contact_normal.dot(f.fingertip_normal) + 1.0);
    sys.tags.push_back(RowTag::align);
  }
  for (const auto& p : collisions.object_pairs) {
    sys.C.middleRows(row, 3) = w * point_jacobian(model, posed, p.link, p.hand_point);
    sys.d.segment<3>(row) = w * (p.object_point - p.hand_point);
    sys.tags.insert(sys.tags.end(), 3, RowTag::obj);
    row += 3;
  }
  for (const auto& p : collisions.ground_pairs) {
    sys.C.row(row) = w * kGroundNormal.transpose() * point_jacobian(model, posed, p.link, p.hand_point);
    sys.d[row] = w * (p.foot_point - p.hand_point).dot(kGroundNormal);
    sys.tags.push_back(RowTag::gnd);
    ++row;
  }
  for (std::size_t i = 0; i < contacts.size(); ++i, ++row) {
    const auto& f = contacts.fingers[i];
    const auto [c0, n] = finger_cols(i);
    sys.C.block(row, c0, 1, n) = w * f.contact_normal.transpose() * jv[i];
    sys.d[row] = w * (f.contact - f.fingertip).dot(f.contact_normal);
    sys.tags.push_back(RowTag::cls);
  }
  return sys;
}

double box_ls_objective(const JpoSystem& sys, const Eigen::VectorXd& x) {
  return (sys.C * x - sys.d).squaredNorm();
}

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const JpoSystem& sys) {
  return x.cwiseMax(sys.lo).cwiseMin(sys.hi);
}

double largest_singular_value_squared(const Eigen::MatrixXd& c, int iterations) {
  const Eigen::Index n = c.cols();
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
  v.normalize();
  double estimate = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd u = c.transpose() * (c * v);
    const double norm = u.norm();
    if (norm == 0.0) return 0.0;
    estimate = v.dot(u);
    v = u / norm;
  }
  return estimate;
}

// Exact minimizer over the variables not pinned to a bound, with the pinned
// ones held fixed. A variable at a bound is freed when the negative gradient
// points into the box.
bool refine_on_free_set(const JpoSystem& sys, Eigen::VectorXd& x) {
  const Eigen::VectorXd grad = sys.C.transpose() * (sys.C * x - sys.d);
  std::vector<Eigen::Index> free_vars;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool at_lo = x[i] <= sys.lo[i];
    const bool at_hi = x[i] >= sys.hi[i];
    if ((!at_lo && !at_hi) || (at_lo && grad[i] < 0.0) || (at_hi && grad[i] > 0.0)) {
      free_vars.push_back(i);
    }
  }
  if (free_vars.empty()) return false;
  Eigen::MatrixXd cf(sys.C.rows(), static_cast<Eigen::Index>(free_vars.size()));
  Eigen::VectorXd fixed = x;
  for (std::size_t k = 0; k < free_vars.size(); ++k) {
    cf.col(static_cast<Eigen::Index>(k)) = sys.C.col(free_vars[k]);
    fixed[free_vars[k]] = 0.0;
  }
  const Eigen::VectorXd rhs = sys.d - sys.C * fixed;
  const Eigen::VectorXd xf = cf.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd candidate = fixed;
  for (std::size_t k = 0; k < free_vars.size(); ++k) candidate[free_vars[k]] = xf[static_cast<Eigen::Index>(k)];
  if (!candidate.allFinite()) return false;
  if ((candidate.array() < sys.lo.array()).any() || (candidate.array() > sys.hi.array()).any()) return false;
  if (candidate == x || box_ls_objective(sys, candidate) > box_ls_objective(sys, x)) return false;
  x = candidate;
  return true;
}

}  // namespace

Eigen::VectorXd solve_box_ls(const JpoSystem& sys, const BoxLsOptions& options) {
  const Eigen::Index n = sys.C.cols();
  if (sys.d.size() != sys.C.rows() || sys.lo.size() != n || sys.hi.size() != n) {
    throw std::invalid_argument("box least squares: inconsistent dimensions");
  }
  if (!sys.C.allFinite() || !sys.d.allFinite() || !sys.lo.allFinite() || !sys.hi.allFinite()) {
    throw IllPosedSystemError("ill-posed JPO system");
  }
  if ((sys.lo.array() > sys.hi.array()).any()) {
    throw std::invalid_argument("box least squares: lo > hi");
  }
  const Eigen::VectorXd zero = clamp(Eigen::VectorXd::Zero(n), sys);
  if (n == 0 || sys.C.rows() == 0) return zero;

  Eigen::MatrixXd normal = sys.C.transpose() * sys.C;
  const Eigen::VectorXd rhs = sys.C.transpose() * sys.d;
  const double lambda = 1e-9 * normal.trace() / static_cast<double>(n);
  if (lambda == 0.0) return zero;  // C = 0: every feasible point is optimal
  normal.diagonal().array() += lambda;
  Eigen::VectorXd x = clamp(normal.ldlt().solve(rhs), sys);
  if (!x.allFinite() || box_ls_objective(sys, zero) < box_ls_objective(sys, x)) x = zero;

  const double sigma2 = largest_singular_value_squared(sys.C, options.power_iterations);
  if (sigma2 > 0.0) {
    const double gamma = 0.9 / sigma2;
    for (int m = 0; m < options.max_iterations; ++m) {
      const Eigen::VectorXd next = clamp(x - gamma * (sys.C.transpose() * (sys.C * x - sys.d)), sys);
      const double step = (next - x).lpNorm<Eigen::Infinity>();
      x = next;
      if (step < options.tolerance) break;
    }
  }
  if (options.refine_free_set) {
    for (Eigen::Index pass = 0; pass <= n; ++pass) {
      if (!refine_on_free_set(sys, x)) break;
    }
  }
  return x;
}

HandState apply_joint_update(const HandModel& model, const HandState& state,
                             const Eigen::VectorXd& dq) {
  if (dq.size() != state.q().size()) throw std::invalid_argument("joint update: wrong size");
  Eigen::VectorXd q = state.q() + dq;
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    if (!(q[j] >= model.q_min()[j] - 1e-12 && q[j] <= model.q_max()[j] + 1e-12)) {
      throw std::logic_error("joint update: joint " + std::to_string(j) + " leaves its limits");
    }
  }
  q = q.cwiseMax(model.q_min()).cwiseMin(model.q_max());
  return HandState(model, state.pose(), std::move(q));
}

}  // namespace grasp
