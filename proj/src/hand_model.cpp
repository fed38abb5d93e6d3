#include "grasp/hand_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace grasp {

bool RevoluteJoint::operator==(const RevoluteJoint& o) const {
  return name == o.name && origin.rotation() == o.origin.rotation() &&
         origin.translation() == o.origin.translation() && axis == o.axis && q_min == o.q_min &&
         q_max == o.q_max && q_mean == o.q_mean && alpha == o.alpha && q_open == o.q_open;
}

HandModel::HandModel(std::string name, Link palm, std::vector<Finger> fingers)
    : name_(std::move(name)), palm_(std::move(palm)), fingers_(std::move(fingers)) {
  std::size_t total = 0;
  link_info_.push_back(LinkInfo{-1, -1, 0, 0});
  for (std::size_t f = 0; f < fingers_.size(); ++f) {
    const Finger& finger = fingers_[f];
    const std::string where = "finger '" + finger.name + "'";
    if (finger.joints.empty()) throw std::invalid_argument(where + ": no joints");
    if (finger.links.size() != finger.joints.size()) {
      throw std::invalid_argument(where + ": needs exactly one link per joint");
    }
    if (finger.fingertip_patch.empty()) throw std::invalid_argument(where + ": empty fingertip patch");
    joint_offsets_.push_back(total);
    for (std::size_t j = 0; j < finger.joints.size(); ++j) {
      const RevoluteJoint& jt = finger.joints[j];
      const std::string jw = where + " joint '" + jt.name + "'";
      if (!(jt.q_min < jt.q_max)) throw std::invalid_argument(jw + ": q_min must be < q_max");
      if (jt.q_mean < jt.q_min || jt.q_mean > jt.q_max) {
        throw std::invalid_argument(jw + ": q_mean outside [q_min, q_max]");
      }
      if (jt.q_open < jt.q_min || jt.q_open > jt.q_max) {
        throw std::invalid_argument(jw + ": q_open outside [q_min, q_max]");
      }
      if (std::abs(jt.axis.norm() - 1.0) > 1e-9) throw std::invalid_argument(jw + ": axis is not unit length");
      if (!is_rotation(jt.origin.rotation(), 1e-9)) {
        throw std::invalid_argument(jw + ": origin rotation is not a rotation matrix");
      }
      link_info_.push_back(LinkInfo{static_cast<int>(f), static_cast<int>(j), total, j + 1});
    }
    total += finger.joints.size();
  }
  q_min_.resize(static_cast<Eigen::Index>(total));
  q_max_.resizeLike(q_min_);
  q_mean_.resizeLike(q_min_);
  alpha_.resizeLike(q_min_);
  q_open_.resizeLike(q_min_);
  Eigen::Index k = 0;
  for (const auto& finger : fingers_) {
    for (const auto& jt : finger.joints) {
      q_min_[k] = jt.q_min;
      q_max_[k] = jt.q_max;
      q_mean_[k] = jt.q_mean;
      alpha_[k] = jt.alpha;
      q_open_[k] = jt.q_open;
      ++k;
    }
  }
}

const Link& HandModel::link(std::size_t link) const {
  const LinkInfo& info = link_info_.at(link);
  if (info.finger < 0) return palm_;
  return fingers_[static_cast<std::size_t>(info.finger)].links[static_cast<std::size_t>(info.index)];
}

std::size_t HandModel::link_index(std::size_t finger, std::size_t index) const {
  std::size_t global = 1;
  for (std::size_t f = 0; f < finger; ++f) global += fingers_[f].links.size();
  return global + index;
}

std::size_t HandModel::distal_link(std::size_t finger) const {
  return link_index(finger, fingers_.at(finger).links.size() - 1);
}

std::size_t HandModel::num_surface_points() const {
  std::size_t n = palm_.cloud.size();
  for (const auto& finger : fingers_) {
    for (const auto& link : finger.links) n += link.cloud.size();
    n += finger.fingertip_patch.size();
  }
  return n;
}

bool HandModel::operator==(const HandModel& other) const {
  return name_ == other.name_ && palm_ == other.palm_ && fingers_ == other.fingers_;
}

HandState::HandState(const HandModel& model, const RigidTransform& pose, Eigen::VectorXd q)
    : pose_(pose), q_(std::move(q)) {
  if (static_cast<std::size_t>(q_.size()) != model.num_joints()) {
    throw std::invalid_argument("hand state: expected " + std::to_string(model.num_joints()) +
                                " joint values, got " + std::to_string(q_.size()));
  }
  if (!q_.allFinite() || !pose.translation().allFinite()) {
    throw std::invalid_argument("hand state: non-finite value");
  }
  if (!is_rotation(pose.rotation(), 1e-6)) {
    throw std::invalid_argument("hand state: palm rotation is not in SO(3)");
  }
  for (Eigen::Index j = 0; j < q_.size(); ++j) {
    if (q_[j] < model.q_min()[j] || q_[j] > model.q_max()[j]) {
      throw std::invalid_argument("hand state: joint " + std::to_string(j) + " value " +
                                  std::to_string(q_[j]) + " outside its limits");
    }
  }
}

std::size_t PosedHand::num_points() const {
  std::size_t n = 0;
  for (const auto& l : links) n += l.points.size();
  return n;
}

PosedHand forward_kinematics(const HandModel& model, const HandState& state) {
  PosedHand posed;
  posed.palm_pose = state.pose();
  posed.links.reserve(model.num_links());
  posed.joint_origins.reserve(model.num_joints());
  posed.joint_axes.reserve(model.num_joints());

  auto pose_link = [](const Link& link, const RigidTransform& frame) {
    PosedLink out{frame, {}, {}, link.box.transformed(frame)};
    out.points.reserve(link.cloud.size());
    out.normals.reserve(link.cloud.size());
    for (std::size_t i = 0; i < link.cloud.size(); ++i) {
      out.points.push_back(frame.apply(link.cloud.point(i)));
      out.normals.push_back(frame.rotate(link.cloud.normal(i)));
    }
    return out;
  };

  posed.links.push_back(pose_link(model.palm(), state.pose()));
  const Eigen::VectorXd& q = state.q();
  std::size_t g = 0;
  for (const auto& finger : model.fingers()) {
    RigidTransform parent = state.pose();
    for (std::size_t j = 0; j < finger.joints.size(); ++j, ++g) {
      const RevoluteJoint& jt = finger.joints[j];
      const RigidTransform joint_frame = parent * jt.origin;
      posed.joint_origins.push_back(joint_frame.translation());
      posed.joint_axes.push_back(joint_frame.rotate(jt.axis));
      const RigidTransform link_frame =
          joint_frame * RigidTransform(axis_rotation(jt.axis, q[static_cast<Eigen::Index>(g)]), Vec3::Zero());
      posed.links.push_back(pose_link(finger.links[j], link_frame));
      parent = link_frame;
    }
    // parent is now the distal link frame.
    PosedFingertip tip;
    const SurfacePointCloud& patch = finger.fingertip_patch;
    tip.points.reserve(patch.size());
    tip.normals.reserve(patch.size());
    Vec3 nsum = Vec3::Zero();
    for (std::size_t i = 0; i < patch.size(); ++i) {
      tip.points.push_back(parent.apply(patch.point(i)));
      tip.normals.push_back(parent.rotate(patch.normal(i)));
      nsum += tip.normals.back();
    }
    tip.centroid = mean_of(tip.points);
    tip.normal = nsum.norm() > 0.0 ? Vec3(nsum.normalized()) : parent.rotate(-Vec3::UnitZ());
    PosedLink& distal = posed.links.back();
    distal.points.insert(distal.points.end(), tip.points.begin(), tip.points.end());
    distal.normals.insert(distal.normals.end(), tip.normals.begin(), tip.normals.end());
    posed.fingertips.push_back(std::move(tip));
  }
  return posed;
}

Eigen::Matrix3Xd translational_jacobian(const HandModel& model, const PosedHand& posed,
                                        std::size_t finger) {
  const std::size_t n = model.fingers().at(finger).joints.size();
  const std::size_t off = model.joint_offset(finger);
  const Vec3& p = posed.fingertips[finger].centroid;
  Eigen::Matrix3Xd jac(3, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    jac.col(static_cast<Eigen::Index>(j)) =
        posed.joint_axes[off + j].cross(p - posed.joint_origins[off + j]);
  }
  return jac;
}

Eigen::Matrix3Xd translational_jacobian(const HandModel& model, const HandState& state,
                                        std::size_t finger) {
  return translational_jacobian(model, forward_kinematics(model, state), finger);
}

Eigen::Matrix3Xd rotational_jacobian(const HandModel& model, const PosedHand& posed,
                                     std::size_t finger) {
  const std::size_t n = model.fingers().at(finger).joints.size();
  const std::size_t off = model.joint_offset(finger);
  Eigen::Matrix3Xd jac(3, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) jac.col(static_cast<Eigen::Index>(j)) = posed.joint_axes[off + j];
  return jac;
}

Eigen::Matrix3Xd rotational_jacobian(const HandModel& model, const HandState& state,
                                     std::size_t finger) {
  return rotational_jacobian(model, forward_kinematics(model, state), finger);
}

Eigen::Matrix3Xd point_jacobian(const HandModel& model, const PosedHand& posed, std::size_t link,
                                const Vec3& point) {
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, static_cast<Eigen::Index>(model.num_joints()));
  const auto& info = model.link_info(link);
  for (std::size_t j = 0; j < info.chain; ++j) {
    const std::size_t g = info.first_joint + j;
    jac.col(static_cast<Eigen::Index>(g)) = posed.joint_axes[g].cross(point - posed.joint_origins[g]);
  }
  return jac;
}

Eigen::Matrix3Xd point_jacobian(const HandModel& model, const HandState& state, std::size_t link,
                                const Vec3& point) {
  return point_jacobian(model, forward_kinematics(model, state), link, point);
}

}  // namespace grasp
