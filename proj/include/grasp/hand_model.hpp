#pragma once

#include "grasp/geometry.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace grasp {

struct RevoluteJoint {
  std::string name;
  RigidTransform origin;  // joint frame in the parent link frame at q = 0
  Vec3 axis = Vec3::UnitZ();  // unit, joint frame
  double q_min = 0.0;
  double q_max = 0.0;
  double q_mean = 0.0;
  double alpha = 1.0;  // weight in the joint-centering quality
  double q_open = 0.0;  // configuration used to start a grasp search

  bool operator==(const RevoluteJoint&) const;
};

struct Link {
  std::string name;
  SurfacePointCloud cloud;  // link frame
  OrientedBoundingBox box;  // link frame

  bool operator==(const Link&) const = default;
};

/// Serial chain hanging off the palm: joints[j] moves links[j], and the
/// frame of links[j - 1] (the palm for j = 0) is the parent of joints[j].
struct Finger {
  std::string name;
  std::vector<RevoluteJoint> joints;
  std::vector<Link> links;
  SurfacePointCloud fingertip_patch;  // distal link frame

  bool operator==(const Finger&) const = default;
};

/// Immutable hand description.
///
/// Links are addressed globally: index 0 is the palm, followed by the links
/// of finger 0, finger 1, and so on. Joint vectors concatenate the fingers'
/// joints in the same order.
class HandModel {
 public:
  struct LinkInfo {
    int finger = -1;  // -1 for the palm
    int index = -1;   // position within the finger
    std::size_t first_joint = 0;  // global index of the finger's first joint
    std::size_t chain = 0;        // number of joints between palm and link
  };

  HandModel() = default;
  /// Validates limits, means, and patches; throws std::invalid_argument.
  HandModel(std::string name, Link palm, std::vector<Finger> fingers);

  const std::string& name() const { return name_; }
  const Link& palm() const { return palm_; }
  const std::vector<Finger>& fingers() const { return fingers_; }
  std::size_t num_fingers() const { return fingers_.size(); }
  std::size_t num_joints() const { return static_cast<std::size_t>(q_min_.size()); }
  std::size_t joint_offset(std::size_t finger) const { return joint_offsets_[finger]; }

  std::size_t num_links() const { return link_info_.size(); }
  const LinkInfo& link_info(std::size_t link) const { return link_info_[link]; }
  const Link& link(std::size_t link) const;
  std::size_t link_index(std::size_t finger, std::size_t index) const;
  std::size_t distal_link(std::size_t finger) const;

  /// Palm, link, and fingertip patch points together.
  std::size_t num_surface_points() const;

  const Eigen::VectorXd& q_min() const { return q_min_; }
  const Eigen::VectorXd& q_max() const { return q_max_; }
  const Eigen::VectorXd& q_mean() const { return q_mean_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& q_open() const { return q_open_; }

  bool operator==(const HandModel& other) const;

 private:
  std::string name_;
  Link palm_;
  std::vector<Finger> fingers_;
  std::vector<std::size_t> joint_offsets_;
  std::vector<LinkInfo> link_info_;
  Eigen::VectorXd q_min_, q_max_, q_mean_, alpha_, q_open_;
};

/// Palm pose plus joint vector; joints always lie within the model limits.
class HandState {
 public:
  /// Identity pose with no joints; placeholder until assigned.
  HandState() = default;
  /// Throws std::invalid_argument on a wrong-sized or out-of-limit q.
  HandState(const HandModel& model, const RigidTransform& pose, Eigen::VectorXd q);

  const RigidTransform& pose() const { return pose_; }
  const Eigen::VectorXd& q() const { return q_; }

 private:
  RigidTransform pose_;
  Eigen::VectorXd q_;
};

/// World-frame view of one link.
struct PosedLink {
  RigidTransform frame;
  /// Link cloud followed, on distal links, by the fingertip patch.
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  OrientedBoundingBox box;
};

struct PosedFingertip {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  Vec3 centroid = Vec3::Zero();  // p_f
  Vec3 normal = Vec3::UnitZ();   // n_f
};

struct PosedHand {
  RigidTransform palm_pose;
  std::vector<PosedLink> links;  // global link order
  std::vector<PosedFingertip> fingertips;
  std::vector<Vec3> joint_origins;  // world, global joint order
  std::vector<Vec3> joint_axes;     // world, unit

  /// Palm -z axis in the world: the approach direction.
  Vec3 approach_axis() const { return -palm_pose.rotation().col(2); }
  std::size_t num_points() const;
};

PosedHand forward_kinematics(const HandModel& model, const HandState& state);

// Jacobians are expressed in the world frame, which coincides with the palm
// frame when the palm pose is the identity.

/// Column j: z_j x (p_f - o_j) over finger i's joints.
Eigen::Matrix3Xd translational_jacobian(const HandModel& model, const PosedHand& posed,
                                        std::size_t finger);
Eigen::Matrix3Xd translational_jacobian(const HandModel& model, const HandState& state,
                                        std::size_t finger);

/// Column j: z_j over finger i's joints.
Eigen::Matrix3Xd rotational_jacobian(const HandModel& model, const PosedHand& posed,
                                     std::size_t finger);
Eigen::Matrix3Xd rotational_jacobian(const HandModel& model, const HandState& state,
                                     std::size_t finger);

/// 3 x N_jnt Jacobian of a world point rigidly attached to a link; columns of
/// joints outside the link's chain are zero.
Eigen::Matrix3Xd point_jacobian(const HandModel& model, const PosedHand& posed, std::size_t link,
                                const Vec3& point);
Eigen::Matrix3Xd point_jacobian(const HandModel& model, const HandState& state, std::size_t link,
                                const Vec3& point);

}  // namespace grasp
