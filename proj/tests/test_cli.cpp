#include "cli.hpp"

#include "grasp/hand_io.hpp"
#include "grasp/results_io.hpp"

#include "test_support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace grasp;
using namespace grasp::test;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string object_path(const std::string& name) { return (data_dir() / "objects" / (name + ".obj")).string(); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("plan writes results and reports the accepted count") {
  const auto dir = scratch_dir("cli_plan");
  const std::string out = (dir / "sphere.json").string();
  const Run r = run({"plan", "--object", object_path("sphere"), "--hand",
                     (data_dir() / "hands" / "default.hand").string(), "--samples", "10", "--seed", "7", "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.find("accepted ") == 0);
  CHECK(r.out.find("/10") != std::string::npos);
  const ResultsSummary s = load_results(out);
  CHECK(s.grasps.size() == 10);
  CHECK(std::filesystem::exists(dir / "sphere.manifest.json"));
}

TEST_CASE("plan exit codes") {
  const auto dir = scratch_dir("cli_codes");
  const std::string out = (dir / "empty.json").string();
  Run r = run({"plan", "--object", object_path("sphere"), "--samples", "0", "--out", out});
  CHECK(r.code == 2);
  CHECK(r.out.find("accepted 0/0") == 0);
  CHECK(load_results(out).grasps.empty());

  r = run({"plan", "--samples", "3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--object") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);

  r = run({"plan", "--object", (dir / "missing.obj").string(), "--out", out});
  CHECK(r.code == 1);
  CHECK(r.err.find("missing.obj") != std::string::npos);

  r = run({"plan", "--object", object_path("sphere"), "--w-growth", "0.5", "--out", out});
  CHECK(r.code == 1);
  CHECK(r.err.find("w_growth") != std::string::npos);

  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("trace emits one CSV row per iteration") {
  const auto dir = scratch_dir("cli_trace");
  const std::string out = (dir / "box.json").string();
  REQUIRE(run({"plan", "--object", object_path("box"), "--samples", "4", "--seed", "7", "--out", out}).code != 1);
  const Run r = run({"trace", out, "--grasp", "1"});
  REQUIRE(r.code == 0);
  const auto lines = split_lines(r.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines.size() - 1 <= 41);
  CHECK(lines[0] == "t,w,E_quality,E_penalty,E_col,E_cls");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::vector<double> v;
    for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 6);
    CHECK(v[0] == static_cast<double>(i - 1));
    CHECK(std::abs(v[3] - (v[4] + v[5])) <= 1e-12);
  }

  const Run agg = run({"trace", out, "--aggregate"});
  CHECK(agg.code == 0);
  CHECK(split_lines(agg.out).size() == 42);

  CHECK(run({"trace", out, "--grasp", "9"}).code == 1);
  std::ofstream(dir / "junk.json") << "{\"schema\": 3}";
  const Run junk = run({"trace", (dir / "junk.json").string()});
  CHECK(junk.code == 1);
  CHECK(junk.err.find("junk.json") != std::string::npos);
}

TEST_CASE("validate reports counts and names defects") {
  Run r = run({"validate"});
  CHECK(r.code == 0);
  CHECK(r.out.find("hand: 1798 points") != std::string::npos);
  r = run({"validate", "--object", object_path("bunny")});
  CHECK(r.code == 0);
  CHECK(r.out == "object: 2000 points\n");

  const auto dir = scratch_dir("cli_validate");
  {
    std::string ply = "ply\nformat binary_little_endian 1.0\nelement vertex 10\nproperty float x\n"
                      "property float y\nproperty float z\nend_header\n";
    ply += std::string(17, '\0');
    std::ofstream(dir / "broken.ply", std::ios::binary) << ply;
  }
  r = run({"validate", "--object", (dir / "broken.ply").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("byte offset") != std::string::npos);

  nlohmann::json doc = nlohmann::json::parse(default_hand_description());
  doc["fingers"][2]["joints"][1]["name"] = "thumb_distal";
  doc["fingers"][2]["joints"][1]["q_min"] = 2.0;
  doc["fingers"][2]["joints"][1]["q_max"] = 1.0;
  std::ofstream(dir / "bad.hand") << doc.dump();
  r = run({"validate", "--hand", (dir / "bad.hand").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("thumb_distal") != std::string::npos);
  CHECK(r.err.find("bad.hand") != std::string::npos);
}

TEST_CASE("identical inputs give byte-identical results files") {
  const auto dir = scratch_dir("cli_bytes");
  for (const char* name : {"a.json", "b.json"}) {
    run({"plan", "--object", object_path("cylinder"), "--samples", "4", "--seed", "5", "--workers", "2", "--out",
         (dir / name).string()});
  }
  const std::string a = read_file(dir / "a.json");
  CHECK(!a.empty());
  CHECK(a == read_file(dir / "b.json"));
}

TEST_CASE("cloud export writes one PLY per grasp") {
  const auto dir = scratch_dir("cli_export");
  run({"plan", "--object", object_path("low_box"), "--samples", "2", "--tmax", "3", "--out",
       (dir / "r.json").string(), "--export-clouds", (dir / "clouds").string()});
  CHECK(std::filesystem::exists(dir / "clouds" / "object.ply"));
  CHECK(std::filesystem::exists(dir / "clouds" / "grasp_000_hand.ply"));
  CHECK(std::filesystem::exists(dir / "clouds" / "grasp_001_hand.ply"));
}
