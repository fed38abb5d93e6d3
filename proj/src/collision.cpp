#include "grasp/collision.hpp"

#include <limits>

namespace grasp {
namespace {

// Point on the nearest face of an axis-aligned box, in box coordinates.
Vec3 nearest_face_point(const Vec3& local, const Vec3& half, Vec3& face_normal) {
  int best_axis = 0;
  double best_sign = 1.0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    for (const double sign : {1.0, -1.0}) {
      const double gap = half[a] - sign * local[a];
      if (gap < best_gap) {
        best_gap = gap;
        best_axis = a;
        best_sign = sign;
      }
    }
  }
  Vec3 out = local;
  out[best_axis] = best_sign * half[best_axis];
  face_normal = Vec3::Zero();
  face_normal[best_axis] = best_sign;
  return out;
}

}  // namespace

std::vector<ObjectCollisionPair> detect_object_collisions(const PosedHand& posed,
                                                          const SurfacePointCloud& object,
                                                          double margin) {
  std::vector<ObjectCollisionPair> pairs;
  for (std::size_t l = 0; l < posed.links.size(); ++l) {
    const PosedLink& link = posed.links[l];
    const OrientedBoundingBox& box = link.box;
    const double reach = (box.half_extents() + Vec3::Constant(margin)).norm() * (1.0 + 1e-9);
    const Vec3& center = box.frame().translation();
    const std::size_t first = pairs.size();
    double side_sum = 0.0;
    for (std::size_t k = 0; k < object.size(); ++k) {
      const Vec3& o = object.point(k);
      if ((o - center).squaredNorm() > reach * reach) continue;
      if (!box.contains(o, margin)) continue;
      std::size_t best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < link.points.size(); ++i) {
        const double d2 = (link.points[i] - o).squaredNorm();
        if (d2 < best_d2) {
          best_d2 = d2;
          best = i;
        }
      }
      ObjectCollisionPair pair;
      pair.link = l;
      pair.object_index = k;
      pair.hand_index = best;
      pair.hand_point = link.points[best];
      pair.hand_normal = link.normals[best];
      pair.object_point = o;
      side_sum += pair.hand_normal.dot(o - pair.hand_point);
      pairs.push_back(pair);
    }
    if (pairs.size() == first) continue;
    if (side_sum < 0.0) {
      // Inner side: target sits `margin` proud of the link surface, so a
      // cleared pair leaves o_l outside the grown box.
      for (std::size_t i = first; i < pairs.size(); ++i) {
        pairs[i].hand_point += margin * pairs[i].hand_normal;
      }
      continue;
    }
    const Vec3 grown = box.half_extents() + Vec3::Constant(margin);
    for (std::size_t i = first; i < pairs.size(); ++i) {
      ObjectCollisionPair& pair = pairs[i];
      Vec3 face_normal;
      const Vec3 local = nearest_face_point(box.to_local(pair.object_point), grown, face_normal);
      pair.side = ContactSide::outer;
      pair.hand_point = box.frame().apply(local);
      pair.hand_normal = box.frame().rotate(face_normal);
    }
  }
  return pairs;
}

std::vector<GroundCollisionPair> detect_ground_collisions(const PosedHand& posed, double clearance) {
  std::vector<GroundCollisionPair> pairs;
  for (std::size_t l = 0; l < posed.links.size(); ++l) {
    const auto& pts = posed.links[l].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].z() < clearance) {
        pairs.push_back({l, i, pts[i], Vec3(pts[i].x(), pts[i].y(), clearance)});
      }
    }
  }
  return pairs;
}

CollisionSet detect_collisions(const PosedHand& posed, const SurfacePointCloud& object,
                               double margin, double ground_clearance) {
  return {detect_object_collisions(posed, object, margin),
          detect_ground_collisions(posed, ground_clearance)};
}

double eval_e_col(const CollisionSet& cols) {
  double sum = 0.0;
  for (const auto& p : cols.object_pairs) sum += (p.hand_point - p.object_point).squaredNorm();
  for (const auto& p : cols.ground_pairs) {
    const double d = (p.hand_point - p.foot_point).dot(kGroundNormal);
    sum += d * d;
  }
  return sum;
}

}  // namespace grasp
