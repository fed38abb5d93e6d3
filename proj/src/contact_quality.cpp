#include "grasp/contact_quality.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace grasp {

ObjectSurface::ObjectSurface(SurfacePointCloud cloud)
    : cloud_(std::move(cloud)), tree_(cloud_.points()) {
  if (cloud_.empty()) throw std::invalid_argument("empty point cloud");
}

bool ContactSet::any_fallback() const {
  for (const auto& f : fingers) {
    if (f.normal_fallback) return true;
  }
  return false;
}

std::vector<Vec3> ContactSet::fingertips() const {
  std::vector<Vec3> out;
  out.reserve(fingers.size());
  for (const auto& f : fingers) out.push_back(f.fingertip);
  return out;
}

ContactSet assign_contacts(const PosedHand& posed, const ObjectSurface& object) {
  const SurfacePointCloud& cloud = object.cloud();
  ContactSet set;
  set.fingers.reserve(posed.fingertips.size());
  for (const auto& tip : posed.fingertips) {
    FingerContact fc;
    fc.fingertip = tip.centroid;
    fc.fingertip_normal = tip.normal;
    fc.matched.reserve(tip.points.size());
    Vec3 psum = Vec3::Zero();
    Vec3 nsum = Vec3::Zero();
    for (const auto& p : tip.points) {
      const std::size_t k = object.tree().nearest(p).index;
      fc.matched.push_back(k);
      psum += cloud.point(k);
      nsum += cloud.normal(k);
    }
    const double count = static_cast<double>(tip.points.size());
    fc.contact = psum / count;
    const Vec3 mean_normal = nsum / count;
    if (mean_normal.norm() >= 1e-8) {
      fc.contact_normal = mean_normal.normalized();
    } else {
      const Vec3 to_com = cloud.center_of_mass() - fc.fingertip;
      fc.contact_normal = to_com.norm() > 0.0 ? Vec3(to_com.normalized()) : Vec3(-tip.normal);
      fc.normal_fallback = true;
    }
    set.fingers.push_back(std::move(fc));
  }
  return set;
}

ContactSet assign_contacts(const PosedHand& posed, const SurfacePointCloud& object) {
  return assign_contacts(posed, ObjectSurface(object));
}

UnitVec3 polygon_normal(const std::vector<Vec3>& fingertips, const Vec3& approach) {
  if (fingertips.size() < 3) throw DegenerateContactError();
  Vec3 n;
  if (fingertips.size() == 3) {
    const Vec3 e1 = fingertips[1] - fingertips[0];
    const Vec3 e2 = fingertips[2] - fingertips[0];
    n = e1.cross(e2);
    if (!(n.norm() > 1e-9 * e1.norm() * e2.norm()) || n.norm() == 0.0) throw DegenerateContactError();
    n.normalize();
  } else {
    const Vec3 mean = mean_of(fingertips);
    Eigen::MatrixX3d centered(static_cast<Eigen::Index>(fingertips.size()), 3);
    for (std::size_t i = 0; i < fingertips.size(); ++i) {
      centered.row(static_cast<Eigen::Index>(i)) = (fingertips[i] - mean).transpose();
    }
    const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(centered, Eigen::ComputeFullV);
    const Vec3 s = svd.singularValues();
    if (!(s[1] > 1e-9 * s[0])) throw DegenerateContactError();
    n = svd.matrixV().col(2);
  }
  return n.dot(approach) < 0.0 ? Vec3(-n) : n;
}

double eval_q_com(const ContactSet& contacts, const Vec3& p_com, const UnitVec3& n_perp) {
  double sum = 0.0;
  for (const auto& f : contacts.fingers) {
    const double d = (f.fingertip - p_com).dot(n_perp);
    sum += d * d;
  }
  return -sum;
}

double eval_q_jc(const HandState& state, const HandModel& model) {
  const Eigen::VectorXd r = model.alpha().cwiseProduct(state.q() - model.q_mean())
                                .cwiseQuotient(model.q_max() - model.q_min());
  return -r.squaredNorm();
}

double eval_q_align(const ContactSet& contacts, double beta) {
  double sum = 0.0;
  for (const auto& f : contacts.fingers) {
    const double d = f.contact_normal.dot(f.fingertip_normal) + 1.0;
    sum += d * d;
  }
  return -beta * beta * sum;
}

double eval_e_cls(const ContactSet& contacts) {
  double sum = 0.0;
  for (const auto& f : contacts.fingers) {
    const double d = (f.fingertip - f.contact).dot(f.contact_normal);
    sum += d * d;
  }
  return sum;
}

QualityReport evaluate_quality(const ContactSet& contacts, const PosedHand& posed,
                               const HandState& state, const HandModel& model,
                               const Vec3& p_com, double beta) {
  QualityReport r;
  r.n_perp = polygon_normal(contacts.fingertips(), posed.approach_axis());
  r.q_com = eval_q_com(contacts, p_com, r.n_perp);
  r.q_jc = eval_q_jc(state, model);
  r.q_align = eval_q_align(contacts, beta);
  r.e_cls = eval_e_cls(contacts);
  return r;
}

}  // namespace grasp
