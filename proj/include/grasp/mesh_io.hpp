#pragma once

#include "grasp/geometry.hpp"
#include "grasp/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace grasp {

/// Malformed input file. The message names the file and the line (text
/// formats) or byte offset (binary PLY) where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlyData {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;  // empty when the file has no nx/ny/nz
  std::vector<std::array<int, 3>> faces;
  /// From a "comment center_of_mass x y z" header line.
  std::optional<Vec3> center_of_mass;
};

TriangleMesh load_obj(const std::filesystem::path& path);
PlyData load_ply(const std::filesystem::path& path);

void save_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
/// ASCII PLY with per-vertex normals.
void save_ply(const std::filesystem::path& path, const SurfacePointCloud& cloud);

struct ObjectLoadOptions {
  std::size_t mesh_samples = 2000;  // points returned for meshes, after clipping
  std::uint64_t seed = 0;
  /// Mesh samples below this height are dropped (support-plane contact).
  std::optional<double> clip_below_z = 1e-3;
  std::size_t normal_neighbors = 15;
};

/// Loads an object as a surface point cloud: meshes (OBJ, PLY with faces) are
/// sampled; PLY point clouds are used as-is, estimating normals if absent.
SurfacePointCloud load_object(const std::filesystem::path& path,
                              const ObjectLoadOptions& options = {});

}  // namespace grasp
