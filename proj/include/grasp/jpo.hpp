#pragma once

#include "grasp/collision.hpp"
#include "grasp/contact_quality.hpp"
#include "grasp/hand_model.hpp"
#include "grasp/ppo.hpp"

#include <Eigen/Core>

#include <vector>

namespace grasp {

/// Rows of ||C dq - d||^2 subject to lo <= dq <= hi, palm fixed.
/// Block order: com (N_c), jc (N_jnt), align (N_c), obj (3 per pair),
/// gnd (1 per pair), cls (N_c).
struct JpoSystem {
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
  Eigen::VectorXd lo;  // q_min - q, <= 0
  Eigen::VectorXd hi;  // q_max - q, >= 0
  std::vector<RowTag> tags;

  Eigen::Index rows() const { return C.rows(); }
};

JpoSystem build_jpo_system(const ContactSet& contacts, const CollisionSet& collisions,
                           const PosedHand& posed, const HandState& state, const HandModel& model,
                           const Vec3& p_com, const UnitVec3& n_perp, double w, double beta);

struct BoxLsOptions {
  int max_iterations = 200;
  double tolerance = 1e-8;  // on ||dq_{m+1} - dq_m||_inf
  int power_iterations = 20;
  /// After the projected-gradient loop, re-solve exactly on the free
  /// variables when that lowers the objective and stays feasible.
  bool refine_free_set = true;
};

/// Objective ||C x - d||^2.
double box_ls_objective(const JpoSystem& sys, const Eigen::VectorXd& x);

/// Projected gradient x <- clamp(x - gamma C^T (C x - d)), gamma = 0.9 / sigma_max(C)^2.
/// Starts from whichever of clamp(x0) and 0 has the lower objective, where x0
/// solves the damped normal equations. The result lies in [lo, hi] exactly.
Eigen::VectorXd solve_box_ls(const JpoSystem& sys, const BoxLsOptions& options = {});

/// q' = q + dq. Throws std::logic_error if dq leaves the joint limits by more
/// than 1e-12; smaller excursions are clamped.
HandState apply_joint_update(const HandModel& model, const HandState& state,
                             const Eigen::VectorXd& dq);

}  // namespace grasp
