#include "grasp/mesh_io.hpp"
#include "grasp/objects.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

using namespace grasp;
using namespace grasp::test;

namespace {

std::filesystem::path write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

template <typename T>
void put(std::string& buf, T value, bool big_endian) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if (big_endian != (std::endian::native == std::endian::big)) std::reverse(bytes, bytes + sizeof(T));
  buf.append(bytes, sizeof(T));
}

std::string binary_tetra_ply(bool big_endian) {
  std::string s = std::string("ply\nformat ") + (big_endian ? "binary_big_endian" : "binary_little_endian") +
                  " 1.0\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n"
                  "element face 4\nproperty list uchar int vertex_indices\nend_header\n";
  const float v[4][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (const auto& p : v) {
    for (float c : p) put(s, c, big_endian);
  }
  const int f[4][3] = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  for (const auto& tri : f) {
    put<std::uint8_t>(s, 3, big_endian);
    for (int i : tri) put(s, i, big_endian);
  }
  return s;
}

}  // namespace

TEST_CASE("OBJ parsing handles polygons, slashes, and relative indices") {
  const auto dir = scratch_dir("mesh_io_obj");
  const auto path = write(dir / "quad.obj",
                          "# comment\no thing\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\n"
                          "f 1//1 2//1 3//1 4//1\nf -4 -2 -1\n");
  const TriangleMesh m = load_obj(path);
  CHECK(m.vertices.size() == 4);
  REQUIRE(m.faces.size() == 3);
  CHECK(m.faces[0] == std::array<int, 3>{0, 1, 2});
  CHECK(m.faces[1] == std::array<int, 3>{0, 2, 3});
  CHECK(m.faces[2] == std::array<int, 3>{0, 2, 3});
}

TEST_CASE("OBJ errors name the file and line") {
  const auto dir = scratch_dir("mesh_io_obj_err");
  const auto bad_vertex = write(dir / "bad.obj", "v 0 0 0\nv 1 0 zz\nf 1 2 1\n");
  CHECK_THROWS_WITH_AS(load_obj(bad_vertex), doctest::Contains("bad.obj:2"), ParseError);
  const auto bad_index = write(dir / "range.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 9\n");
  CHECK_THROWS_WITH_AS(load_obj(bad_index), doctest::Contains("range.obj:5"), ParseError);
  const auto no_faces = write(dir / "empty.obj", "v 0 0 0\n");
  CHECK_THROWS_WITH_AS(load_obj(no_faces), doctest::Contains("no faces"), ParseError);
  CHECK_THROWS_WITH_AS(load_obj(dir / "missing.obj"), doctest::Contains("cannot open"), ParseError);
}

TEST_CASE("OBJ save/load round trip") {
  const auto dir = scratch_dir("mesh_io_obj_rt");
  const TriangleMesh box = make_box_mesh(Vec3(0.25, 0.5, 0.125), Vec3(1, 2, 3));
  save_obj(dir / "box.obj", box);
  const TriangleMesh back = load_obj(dir / "box.obj");
  CHECK(back.faces == box.faces);
  CHECK(back.vertices == box.vertices);
}

TEST_CASE("ASCII PLY point clouds with normals and a center-of-mass comment") {
  const auto dir = scratch_dir("mesh_io_ply_ascii");
  const SurfacePointCloud cloud({Vec3(0.1, 0.2, 0.3), Vec3(-1.0 / 3.0, 0.5, 1e-7)},
                                {Vec3::UnitX(), Vec3(0.6, 0.8, 0.0)}, Vec3(0.01, 0.02, 0.03));
  save_ply(dir / "cloud.ply", cloud);
  const PlyData ply = load_ply(dir / "cloud.ply");
  CHECK(ply.vertices == cloud.points());
  CHECK(ply.normals == cloud.normals());
  REQUIRE(ply.center_of_mass);
  CHECK(*ply.center_of_mass == cloud.center_of_mass());
  CHECK(ply.faces.empty());
  CHECK(load_object(dir / "cloud.ply") == cloud);
}

TEST_CASE("binary PLY meshes in both byte orders") {
  const auto dir = scratch_dir("mesh_io_ply_bin");
  for (const bool big : {false, true}) {
    const auto path = write(dir / (big ? "be.ply" : "le.ply"), binary_tetra_ply(big));
    const PlyData ply = load_ply(path);
    CHECK(ply.vertices.size() == 4);
    CHECK(ply.vertices[3] == Vec3(0, 0, 1));
    REQUIRE(ply.faces.size() == 4);
    CHECK(ply.faces[3] == std::array<int, 3>{1, 2, 3});
    CHECK(ply.normals.empty());
  }
}

TEST_CASE("corrupted PLY files report a byte offset") {
  const auto dir = scratch_dir("mesh_io_ply_bad");
  std::string truncated = binary_tetra_ply(false);
  truncated.resize(truncated.size() - 5);
  const auto path = write(dir / "trunc.ply", truncated);
  CHECK_THROWS_WITH_AS(load_ply(path), doctest::Contains("byte offset"), ParseError);

  const auto ascii = write(dir / "ascii.ply",
                           "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\n"
                           "property float y\nproperty float z\nend_header\n0 0 0\n1 oops 0\n");
  CHECK_THROWS_WITH_AS(load_ply(ascii), doctest::Contains("ascii.ply:9"), ParseError);

  const auto magic = write(dir / "magic.ply", "nope\n");
  CHECK_THROWS_WITH_AS(load_ply(magic), doctest::Contains("magic"), ParseError);

  const auto face_range = write(dir / "range.ply",
                                "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\n"
                                "property float y\nproperty float z\nelement face 1\n"
                                "property list uchar int vertex_indices\nend_header\n"
                                "0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n");
  CHECK_THROWS_WITH_AS(load_ply(face_range), doctest::Contains("vertex 7"), ParseError);
}

TEST_CASE("PLY clouds without normals get estimated outward normals") {
  const auto dir = scratch_dir("mesh_io_est");
  const SurfacePointCloud sphere = sample_mesh(make_uv_sphere_mesh(1.0, Vec3::Zero()), 400, 2);
  std::string text = "ply\nformat ascii 1.0\nelement vertex 400\nproperty double x\nproperty double y\n"
                     "property double z\nend_header\n";
  for (const auto& p : sphere.points()) {
    text += std::to_string(p.x()) + " " + std::to_string(p.y()) + " " + std::to_string(p.z()) + "\n";
  }
  const SurfacePointCloud cloud = load_object(write(dir / "raw.ply", text));
  REQUIRE(cloud.size() == 400);
  for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(cloud.normal(i).dot(cloud.point(i)) > 0.8);
}

TEST_CASE("meshes load as exactly the requested number of points above the support plane") {
  for (const auto& name : synthetic_object_names()) {
    CAPTURE(name);
    const SurfacePointCloud cloud = load_object(data_dir() / "objects" / (name + ".obj"));
    CHECK(cloud.size() == 2000);
    for (const auto& p : cloud.points()) REQUIRE(p.z() >= 1e-3);
  }
  const SurfacePointCloud bunny = load_object(data_dir() / "objects" / "bunny.obj");
  CHECK(bunny.size() == 2000);
  ObjectLoadOptions opts;
  opts.mesh_samples = 300;
  opts.clip_below_z.reset();
  const SurfacePointCloud raw = load_object(data_dir() / "objects" / "box.obj", opts);
  CHECK(raw.size() == 300);
  CHECK(load_object(data_dir() / "objects" / "box.obj", opts) == raw);
  CHECK_THROWS_AS(load_object("thing.stl"), ParseError);
}
