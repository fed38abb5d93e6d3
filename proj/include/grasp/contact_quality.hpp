#pragma once

#include "grasp/geometry.hpp"
#include "grasp/hand_model.hpp"
#include "grasp/kdtree.hpp"

#include <stdexcept>
#include <vector>

namespace grasp {

/// Object cloud with its search tree, built once and shared read-only.
class ObjectSurface {
 public:
  explicit ObjectSurface(SurfacePointCloud cloud);

  const SurfacePointCloud& cloud() const { return cloud_; }
  const KdTree& tree() const { return tree_; }

 private:
  SurfacePointCloud cloud_;
  KdTree tree_;
};

struct FingerContact {
  Vec3 contact = Vec3::Zero();                 // c_i
  UnitVec3 contact_normal = Vec3::UnitZ();     // n_ci
  Vec3 fingertip = Vec3::Zero();               // p_fi
  UnitVec3 fingertip_normal = Vec3::UnitZ();   // n_fi
  std::vector<std::size_t> matched;            // object index per patch point
  bool normal_fallback = false;  // n_ci taken from the direction to the center of mass
};

struct ContactSet {
  std::vector<FingerContact> fingers;

  std::size_t size() const { return fingers.size(); }
  bool any_fallback() const;
  std::vector<Vec3> fingertips() const;
};

/// Raised when the fingertip centroids do not span a plane.
class DegenerateContactError : public std::runtime_error {
 public:
  DegenerateContactError() : std::runtime_error("degenerate contact polygon") {}
};

/// Matches every fingertip patch point to its nearest object point.
ContactSet assign_contacts(const PosedHand& posed, const ObjectSurface& object);
ContactSet assign_contacts(const PosedHand& posed, const SurfacePointCloud& object);

/// Unit normal of the plane through the fingertips, oriented so that
/// n . approach >= 0. Needs at least three non-collinear points.
UnitVec3 polygon_normal(const std::vector<Vec3>& fingertips, const Vec3& approach);

double eval_q_com(const ContactSet& contacts, const Vec3& p_com, const UnitVec3& n_perp);
double eval_q_jc(const HandState& state, const HandModel& model);
double eval_q_align(const ContactSet& contacts, double beta);
double eval_e_cls(const ContactSet& contacts);

struct QualityReport {
  double q_com = 0.0;
  double q_jc = 0.0;
  double q_align = 0.0;
  double e_cls = 0.0;
  UnitVec3 n_perp = Vec3::UnitZ();

  /// -Q_com - Q_jc - Q_align, non-negative.
  double e_quality() const { return -q_com - q_jc - q_align; }
};

QualityReport evaluate_quality(const ContactSet& contacts, const PosedHand& posed,
                               const HandState& state, const HandModel& model,
                               const Vec3& p_com, double beta);

}  // namespace grasp
