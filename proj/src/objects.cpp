#include "grasp/objects.hpp"

#include <stdexcept>

namespace grasp {

const std::vector<std::string>& synthetic_object_names() {
  static const std::vector<std::string> names{"sphere",  "box",      "cylinder",
                                              "low_box", "l_bracket", "torus"};
  return names;
}

TriangleMesh make_synthetic_object(const std::string& name) {
  if (name == "sphere") return make_uv_sphere_mesh(0.05, Vec3(0.0, 0.0, 0.05));
  if (name == "box") return make_box_mesh(Vec3(0.03, 0.02, 0.01), Vec3(0.0, 0.0, 0.01));
  if (name == "cylinder") return make_cylinder_mesh(0.03, 0.12, Vec3::Zero());
  if (name == "low_box") return make_box_mesh(Vec3(0.04, 0.025, 0.005), Vec3(0.0, 0.0, 0.005));
  if (name == "l_bracket") {
    // 8 cm foot and 6 cm upright, 1.5 cm thick, 4 cm deep.
    TriangleMesh mesh = make_extruded_mesh({{-0.04, 0.0},
                                            {0.04, 0.0},
                                            {0.04, 0.015},
                                            {-0.025, 0.015},
                                            {-0.025, 0.06},
                                            {-0.04, 0.06}},
                                           0.04);
    return mesh;
  }
  if (name == "torus") return make_torus_mesh(0.05, 0.015, Vec3(0.0, 0.0, 0.015));
  throw std::invalid_argument("unknown synthetic object '" + name + "'");
}

}  // namespace grasp
