#pragma once

#include "grasp/collision.hpp"
#include "grasp/contact_quality.hpp"
#include "grasp/geometry.hpp"
#include "grasp/hand_model.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <string_view>
#include <vector>

namespace grasp {

/// Formula a least-squares row came from.
enum class RowTag { com, jc, align, obj, gnd, cls };
std::string_view to_string(RowTag tag);

/// Rows of ||A x - b||^2 over x = [r, dt], the palm increment linearized
/// about the world origin: a point p moves to p + r x p + dt.
/// Block order: com (N_c), align (N_c), obj (3 per pair), gnd (1 per pair), cls (N_c).
struct PpoSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<RowTag> tags;

  Eigen::Index rows() const { return A.rows(); }
};

struct PalmIncrement {
  AxisAngle r = Vec3::Zero();
  Vec3 dt = Vec3::Zero();
};

struct TrustRegion {
  double max_rotation = 0.3;      // rad
  double max_translation = 0.02;  // m

  static TrustRegion unlimited();
};

class IllPosedSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PpoSystem build_ppo_system(const ContactSet& contacts, const CollisionSet& collisions,
                           const Vec3& p_com, const UnitVec3& n_perp, double w, double beta);

/// Damped normal equations x = (A^T A + lambda I)^-1 A^T b with
/// lambda = 1e-9 trace(A^T A) / 6, scaled uniformly into the trust region.
PalmIncrement solve_ppo(const PpoSystem& sys, const TrustRegion& region = {});

/// R' = exp(r) R, t' = exp(r) t + dt; joints unchanged.
HandState apply_palm_update(const HandModel& model, const HandState& state,
                            const PalmIncrement& inc);

}  // namespace grasp
