#pragma once

#include "grasp/geometry.hpp"
#include "grasp/hand_model.hpp"

#include <vector>

namespace grasp {

enum class ContactSide { inner, outer };

/// Object point o_l found inside a (margin-enlarged) link box.
struct ObjectCollisionPair {
  std::size_t link = 0;
  std::size_t object_index = 0;
  std::size_t hand_index = 0;  // nearest point within PosedLink::points
  Vec3 hand_point = Vec3::Zero();   // p_l; replaced on the outer side
  UnitVec3 hand_normal = Vec3::UnitZ();
  Vec3 object_point = Vec3::Zero();  // o_l
  ContactSide side = ContactSide::inner;
};

/// Hand point below the plane z = clearance (the ground when clearance is 0).
struct GroundCollisionPair {
  std::size_t link = 0;
  std::size_t hand_index = 0;
  Vec3 hand_point = Vec3::Zero();  // p_l, z < clearance
  Vec3 foot_point = Vec3::Zero();  // o_g = (x, y, clearance)
};

struct CollisionSet {
  std::vector<ObjectCollisionPair> object_pairs;  // sorted by (link, object_index)
  std::vector<GroundCollisionPair> ground_pairs;  // sorted by (link, hand_index)

  bool empty() const { return object_pairs.empty() && ground_pairs.empty(); }
  std::size_t size() const { return object_pairs.size() + ground_pairs.size(); }
};

inline constexpr double kDefaultCollisionMargin = 0.002;

/// Per link: object points inside the box grown by `margin` are paired with
/// the nearest posed point of that link (lowest index on ties). The link is
/// on the inner side when sum n_l . (o_l - p_l) over its pairs is negative;
/// inner p_l are then offset by margin * n_l. Otherwise every p_l is replaced
/// by the projection of o_l onto the nearest face of the grown box, the
/// shortest way out. hand_index always names the nearest link point.
std::vector<ObjectCollisionPair> detect_object_collisions(const PosedHand& posed,
                                                          const SurfacePointCloud& object,
                                                          double margin = kDefaultCollisionMargin);

/// Hand points with z < clearance, in (link, point) order.
std::vector<GroundCollisionPair> detect_ground_collisions(const PosedHand& posed,
                                                          double clearance = 0.0);

CollisionSet detect_collisions(const PosedHand& posed, const SurfacePointCloud& object,
                               double margin = kDefaultCollisionMargin,
                               double ground_clearance = 0.0);

/// sum ||p_l - o_l||^2 + sum ((p_l - o_g) . n_g)^2
double eval_e_col(const CollisionSet& cols);

}  // namespace grasp
