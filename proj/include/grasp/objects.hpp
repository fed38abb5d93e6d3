#pragma once

#include "grasp/mesh.hpp"

#include <string>
#include <vector>

namespace grasp {

/// Names of the synthetic test objects, in suite order.
const std::vector<std::string>& synthetic_object_names();

/// Synthetic object resting on the ground plane z = 0, centered in x and y.
/// Throws std::invalid_argument for an unknown name.
TriangleMesh make_synthetic_object(const std::string& name);

}  // namespace grasp
