#include "grasp/ppo.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <limits>

namespace grasp {

std::string_view to_string(RowTag tag) {
  switch (tag) {
    case RowTag::com: return "com";
    case RowTag::jc: return "jc";
    case RowTag::align: return "align";
    case RowTag::obj: return "obj";
    case RowTag::gnd: return "gnd";
    case RowTag::cls: return "cls";
  }
  return "?";
}

TrustRegion TrustRegion::unlimited() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, inf};
}

PpoSystem build_ppo_system(const ContactSet& contacts, const CollisionSet& collisions,
                           const Vec3& p_com, const UnitVec3& n_perp, double w, double beta) {
  const auto nc = static_cast<Eigen::Index>(contacts.size());
  const auto no = static_cast<Eigen::Index>(collisions.object_pairs.size());
  const auto ng = static_cast<Eigen::Index>(collisions.ground_pairs.size());
  PpoSystem sys;
  const Eigen::Index rows = 3 * nc + 3 * no + ng;
  sys.A = Eigen::MatrixXd::Zero(rows, 6);
  sys.b = Eigen::VectorXd::Zero(rows);
  sys.tags.reserve(static_cast<std::size_t>(rows));
  Eigen::Index row = 0;

  for (const auto& f : contacts.fingers) {
    sys.A.block<1, 3>(row, 0) = f.fingertip.cross(n_perp).transpose();
    sys.A.block<1, 3>(row, 3) = n_perp.transpose();
    sys.b[row] = n_perp.dot(p_com - f.fingertip);
    sys.tags.push_back(RowTag::com);
    ++row;
  }
  for (const auto& f : contacts.fingers) {
    sys.A.block<1, 3>(row, 0) = beta * f.fingertip_normal.cross(f.contact_normal).transpose();
    sys.b[row] = -beta * (f.fingertip_normal.dot(f.contact_normal) + 1.0);
    sys.tags.push_back(RowTag::align);
    ++row;
  }
  for (const auto& p : collisions.object_pairs) {
    sys.A.block<3, 3>(row, 0) = -w * so3_hat(p.hand_point);
    sys.A.block<3, 3>(row, 3) = w * Mat3::Identity();
    sys.b.segment<3>(row) = w * (p.object_point - p.hand_point);
    sys.tags.insert(sys.tags.end(), 3, RowTag::obj);
    row += 3;
  }
  for (const auto& p : collisions.ground_pairs) {
    sys.A.block<1, 3>(row, 0) = w * p.hand_point.cross(kGroundNormal).transpose();
    sys.A.block<1, 3>(row, 3) = w * kGroundNormal.transpose();
    sys.b[row] = w * (p.foot_point - p.hand_point).dot(kGroundNormal);
    sys.tags.push_back(RowTag::gnd);
    ++row;
  }
  for (const auto& f : contacts.fingers) {
    sys.A.block<1, 3>(row, 0) = w * f.fingertip.cross(f.contact_normal).transpose();
    sys.A.block<1, 3>(row, 3) = w * f.contact_normal.transpose();
    sys.b[row] = w * (f.contact - f.fingertip).dot(f.contact_normal);
    sys.tags.push_back(RowTag::cls);
    ++row;
  }
  return sys;
}

PalmIncrement solve_ppo(const PpoSystem& sys, const TrustRegion& region) {
  if (!sys.A.allFinite() || !sys.b.allFinite()) throw IllPosedSystemError("ill-posed PPO system");
  PalmIncrement inc;
  if (sys.rows() == 0) return inc;
  Eigen::Matrix<double, 6, 6> normal = sys.A.transpose() * sys.A;
  const Vec6 rhs = sys.A.transpose() * sys.b;
  const double lambda = 1e-9 * normal.trace() / 6.0;
  if (lambda == 0.0) return inc;  // A = 0
  normal.diagonal().array() += lambda;
  const Vec6 x = normal.ldlt().solve(rhs);
  if (!x.allFinite()) throw IllPosedSystemError("ill-posed PPO system");

  inc.r = x.head<3>();
  inc.dt = x.tail<3>();
  const double scale = std::min({1.0, region.max_rotation / std::max(inc.r.norm(), 1e-300),
                                 region.max_translation / std::max(inc.dt.norm(), 1e-300)});
  if (scale < 1.0) {
    inc.r *= scale;
    inc.dt *= scale;
  }
  return inc;
}

HandState apply_palm_update(const HandModel& model, const HandState& state,
                            const PalmIncrement& inc) {
  const RigidTransform delta(so3_exp(inc.r), inc.dt);
  return HandState(model, delta * state.pose(), state.q());
}

}  // namespace grasp
