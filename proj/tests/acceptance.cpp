// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria.

#include "cli.hpp"

#include "grasp/collision.hpp"
#include "grasp/hand_io.hpp"
#include "grasp/jpo.hpp"
#include "grasp/mesh.hpp"
#include "grasp/mesh_io.hpp"
#include "grasp/objects.hpp"
#include "grasp/planner.hpp"
#include "grasp/ppo.hpp"
#include "grasp/random.hpp"
#include "grasp/results_io.hpp"

#include <Eigen/QR>
#include <json.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>

using namespace grasp;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kFdStep = 1e-6;
constexpr double kJacobianRelTol = 1e-5;
constexpr double kJacobianBudgetS = 10.0;
constexpr double kPpoOptimalityTol = 1e-6;
constexpr double kJpoOracleTol = 1e-6;
constexpr double kSolverBudgetS = 60.0;
constexpr double kQualityRatio = 0.5;
constexpr double kPenaltyRatio = 0.2;
constexpr double kConvergenceBudgetS = 300.0;
constexpr double kSuiteMeanAccepted = 4.0;
constexpr double kThinObjectAccepted = 2.0;
constexpr double kPerSampleBudgetS = 2.5;
constexpr std::uint64_t kSeed = 7;

// 1.1^t correctly rounded from the exact rational power of the double 1.1.
constexpr double kPenaltySchedule[41] = {
    0x1.0000000000000p+0, 0x1.199999999999ap+0, 0x1.35c28f5c28f5dp+0, 0x1.54bc6a7ef9db4p+0,
    0x1.76cf41f212d79p+0, 0x1.9c4a6223e186cp+0, 0x1.c585058dde7abp+0, 0x1.f2df1fb5a7ed7p+0,
    0x1.12611e3d82c2ap+1, 0x1.2dd13add43095p+1, 0x1.4bffc0c03023ep+1, 0x1.6d32eda034f44p+1,
    0x1.91b805636d732p+1, 0x1.b9e405ed5ecb8p+1, 0x1.e6146ceb81dfep+1, 0x1.0b5808b4baa19p+2,
    0x1.261409939a182p+2, 0x1.437c70ef29810p+2, 0x1.63d5af6d7a745p+2, 0x1.876b0dc539e66p+2,
    0x1.ae8f5bf28c7d7p+2, 0x1.d99db1f13423ap+2, 0x1.047d21de4313ap+3, 0x1.1e89a54149c8dp+3,
    0x1.3b3102949df68p+3, 0x1.5ab5e93d1428dp+3, 0x1.7d61b3c32fc68p+3, 0x1.a3851289e7c0dp+3,
    0x1.cd78c797b220fp+3, 0x1.fb9e7526dd8aap+3, 0x1.1730c06ef9d91p+4, 0x1.331c06e0793bap+4,
    0x1.51d20790855b3p+4, 0x1.739a3b855f7dfp+4, 0x1.98c341791c3ddp+4, 0x1.c1a394d205774p+4,
    0x1.ee9a56e706033p+4, 0x1.10081632434e9p+5, 0x1.2b3c186a7d3cep+5, 0x1.49288141f0296p+5,
    0x1.6a12f49554fa6p+5,
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

Vec3 random_vec(Rng& rng, double scale) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale));
}

Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v = random_vec(rng, 1.0);
    if (v.norm() > 1e-3 && v.norm() <= 1.0) return v.normalized();
  }
}

HandState random_state(const HandModel& m, Rng& rng, const Vec3& around, double reach, double inset) {
  Eigen::VectorXd q(m.num_joints());
  for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = uniform(rng, m.q_min()[j] + inset, m.q_max()[j] - inset);
  const RigidTransform pose(so3_exp(random_unit(rng) * uniform(rng, 0.0, 3.1)), around + random_vec(rng, reach));
  return HandState(m, pose, q);
}

fs::path data_dir() { return GRASP_DATA_DIR; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(GRASP_TEST_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run_cli(args, out, err);
}

double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-12);
}

// 1. Jacobians against central differences of forward kinematics.
Outcome jacobians(const HandModel& m) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const HandState s = random_state(m, rng, Vec3::Zero(), 0.2, 2.0 * kFdStep);
    const PosedHand posed = forward_kinematics(m, s);
    auto perturbed = [&](Eigen::Index j, double h) {
      Eigen::VectorXd q = s.q();
      q[j] += h;
      return forward_kinematics(m, HandState(m, s.pose(), q));
    };
    const std::size_t link = 1 + static_cast<std::size_t>(uniform_index(rng, m.num_links() - 1));
    const std::size_t idx = static_cast<std::size_t>(uniform_index(rng, posed.links[link].points.size()));
    Eigen::Matrix3Xd fd_point(3, static_cast<Eigen::Index>(m.num_joints()));
    std::vector<Eigen::Matrix3Xd> fd_v, fd_w;
    for (std::size_t f = 0; f < m.num_fingers(); ++f) {
      fd_v.emplace_back(3, m.fingers()[f].joints.size());
      fd_w.emplace_back(3, m.fingers()[f].joints.size());
    }
    for (Eigen::Index j = 0; j < fd_point.cols(); ++j) {
      const PosedHand hp = perturbed(j, kFdStep), hm = perturbed(j, -kFdStep);
      fd_point.col(j) = (hp.links[link].points[idx] - hm.links[link].points[idx]) / (2.0 * kFdStep);
      for (std::size_t f = 0; f < m.num_fingers(); ++f) {
        const auto off = static_cast<Eigen::Index>(m.joint_offset(f));
        if (j < off || j >= off + fd_v[f].cols()) continue;
        const std::size_t distal = m.distal_link(f);
        fd_v[f].col(j - off) = (hp.fingertips[f].centroid - hm.fingertips[f].centroid) / (2.0 * kFdStep);
        fd_w[f].col(j - off) =
            so3_log(hp.links[distal].frame.rotation() * hm.links[distal].frame.rotation().transpose()) /
            (2.0 * kFdStep);
      }
    }
    worst = std::max(worst, rel_err(point_jacobian(m, posed, link, posed.links[link].points[idx]), fd_point));
    for (std::size_t f = 0; f < m.num_fingers(); ++f) {
      worst = std::max(worst, rel_err(translational_jacobian(m, posed, f), fd_v[f]));
      worst = std::max(worst, rel_err(rotational_jacobian(m, posed, f), fd_w[f]));
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < kJacobianRelTol && elapsed < kJacobianBudgetS,
          "max rel err " + fmt("%.2e", worst) + ", " + fmt("%.2f s", elapsed)};
}

// Box-constrained least squares by enumerating lower/upper/free per variable.
Eigen::VectorXd enumerate_box_ls(const JpoSystem& s) {
  const Eigen::Index n = s.C.cols();
  int combos = 1;
  for (Eigen::Index i = 0; i < n; ++i) combos *= 3;
  Eigen::VectorXd best;
  double best_f = std::numeric_limits<double>::infinity();
  for (int code = 0; code < combos; ++code) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> free;
    int c = code;
    for (Eigen::Index i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 0) x[i] = s.lo[i];
      else if (c % 3 == 1) x[i] = s.hi[i];
      else free.push_back(i);
    }
    if (!free.empty()) {
      Eigen::MatrixXd cf(s.C.rows(), static_cast<Eigen::Index>(free.size()));
      for (std::size_t k = 0; k < free.size(); ++k) cf.col(static_cast<Eigen::Index>(k)) = s.C.col(free[k]);
      const Eigen::VectorXd xf = cf.colPivHouseholderQr().solve(s.d - s.C * x);
      for (std::size_t k = 0; k < free.size(); ++k) x[free[k]] = xf[static_cast<Eigen::Index>(k)];
    }
    if ((x.array() < s.lo.array()).any() || (x.array() > s.hi.array()).any()) continue;
    const double f = box_ls_objective(s, x);
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  }
  return best;
}

bool satisfies_kkt(const JpoSystem& s, const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = s.C.transpose() * (s.C * x - s.d);
  const double tol = 1e-8 * std::max(1.0, (s.C.transpose() * s.d).norm());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] == s.lo[i]) {
      if (g[i] < -tol) return false;
    } else if (x[i] == s.hi[i]) {
      if (g[i] > tol) return false;
    } else if (std::abs(g[i]) > tol) {
      return false;
    }
  }
  return true;
}

// 2. PPO first-order optimality; JPO against an enumerated, KKT-checked optimum.
Outcome solvers() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(102);
  double worst_ppo = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    PpoSystem sys;
    const Eigen::Index rows = 9 + static_cast<Eigen::Index>(uniform_index(rng, 40));
    sys.A.resize(rows, 6);
    sys.b.resize(rows);
    for (Eigen::Index i = 0; i < sys.A.size(); ++i) sys.A.data()[i] = uniform(rng, -1.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i) sys.b[i] = uniform(rng, -0.05, 0.05);
    const PalmIncrement inc = solve_ppo(sys, TrustRegion::unlimited());
    Eigen::VectorXd x(6);
    x << inc.r, inc.dt;
    worst_ppo = std::max(worst_ppo, (sys.A.transpose() * (sys.A * x - sys.b)).norm() /
                                        (sys.A.transpose() * sys.b).norm());
  }
  double worst_jpo = 0.0;
  int kkt_failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    JpoSystem sys;
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(uniform_index(rng, 7));
    const Eigen::Index rows = n + static_cast<Eigen::Index>(uniform_index(rng, 10));
    sys.C.resize(rows, n);
    sys.d.resize(rows);
    sys.lo.resize(n);
    sys.hi.resize(n);
    for (Eigen::Index i = 0; i < sys.C.size(); ++i) sys.C.data()[i] = uniform(rng, -1.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i) sys.d[i] = uniform(rng, -1.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sys.lo[i] = -uniform(rng, 0.0, 0.5);
      sys.hi[i] = uniform(rng, 0.0, 0.5);
    }
    const Eigen::VectorXd oracle = enumerate_box_ls(sys);
    if (!satisfies_kkt(sys, oracle)) ++kkt_failures;
    worst_jpo = std::max(worst_jpo, (solve_box_ls(sys) - oracle).lpNorm<Eigen::Infinity>());
  }
  const double elapsed = seconds_since(start);
  return {worst_ppo <= kPpoOptimalityTol && worst_jpo <= kJpoOracleTol && kkt_failures == 0 &&
              elapsed < kSolverBudgetS,
          "PPO max rel gradient " + fmt("%.2e", worst_ppo) + ", JPO max |x - oracle| " + fmt("%.2e", worst_jpo) +
              ", oracle KKT failures " + std::to_string(kkt_failures) + ", " + fmt("%.2f s", elapsed)};
}

bool in_box(const PosedLink& link, const Vec3& p, double margin) {
  const Vec3 local = link.box.frame().rotation().transpose() * (p - link.box.frame().translation());
  return (local.cwiseAbs().array() <= (link.box.half_extents().array() + margin)).all();
}

// 3. Object pairs equal a brute-force inclusion + nearest-point scan.
Outcome collision_oracle(const HandModel& m) {
  Rng rng(103);
  const double margin = kDefaultCollisionMargin;
  int mismatched = 0;
  std::size_t pairs_seen = 0;
  const std::vector<std::string> names = synthetic_object_names();
  std::vector<SurfacePointCloud> objects;
  for (const auto& n : names) objects.push_back(load_object(data_dir() / "objects" / (n + ".obj")));
  for (int scene = 0; scene < 50; ++scene) {
    const SurfacePointCloud& object = objects[static_cast<std::size_t>(scene) % objects.size()];
    const HandState s = random_state(m, rng, object.center_of_mass(), 0.06, 1e-3);
    const PosedHand posed = forward_kinematics(m, s);
    const auto got = detect_object_collisions(posed, object, margin);
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> want;
    for (std::size_t l = 0; l < posed.links.size(); ++l) {
      const PosedLink& link = posed.links[l];
      for (std::size_t k = 0; k < object.size(); ++k) {
        if (!in_box(link, object.point(k), margin)) continue;
        std::size_t best = 0;
        for (std::size_t i = 1; i < link.points.size(); ++i) {
          if ((link.points[i] - object.point(k)).squaredNorm() < (link.points[best] - object.point(k)).squaredNorm()) {
            best = i;
          }
        }
        want.emplace_back(l, k, best);
      }
    }
    pairs_seen += want.size();
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < got.size(); ++i) {
      same = std::tuple(got[i].link, got[i].object_index, got[i].hand_index) == want[i] &&
             got[i].object_point == object.point(got[i].object_index);
    }
    const auto ground = detect_ground_collisions(posed);
    std::size_t below = 0;
    for (const auto& link : posed.links) {
      for (const auto& p : link.points) below += p.z() < 0.0 ? 1 : 0;
    }
    same = same && ground.size() == below;
    mismatched += same ? 0 : 1;
  }
  return {mismatched == 0 && pairs_seen > 0,
          std::to_string(mismatched) + "/50 scenes differ, " + std::to_string(pairs_seen) + " pairs checked"};
}

// 4. Mean E_quality and E_penalty fall across 50 seeded bunny runs.
Outcome convergence(const HandModel& m) {
  const auto start = std::chrono::steady_clock::now();
  const ObjectSurface bunny(load_object(data_dir() / "objects" / "bunny.obj"));
  PlannerConfig cfg;
  cfg.seed = kSeed;
  cfg.n_samples = 50;
  const auto results = plan(bunny, m, cfg);
  double q0 = 0.0, q1 = 0.0, p0 = 0.0, p1 = 0.0;
  for (const auto& r : results) {
    q0 += r.trace.front().e_quality;
    p0 += r.trace.front().e_penalty();
    q1 += r.e_quality();
    p1 += r.e_penalty();
  }
  const double n = static_cast<double>(results.size());
  const double elapsed = seconds_since(start);
  return {results.size() == 50 && q1 < kQualityRatio * q0 && p1 < kPenaltyRatio * p0 &&
              elapsed < kConvergenceBudgetS,
          "E_quality " + fmt("%.4g", q0 / n) + " -> " + fmt("%.4g", q1 / n) + ", E_penalty " + fmt("%.4g", p0 / n) +
              " -> " + fmt("%.4g", p1 / n) + ", " + fmt("%.1f s", elapsed)};
}

// 5. Accepted grasps per 10 samples on the synthetic suite.
Outcome success_rate(const HandModel& m) {
  PlannerConfig cfg;
  cfg.seed = kSeed;
  cfg.n_samples = 10;
  double total = 0.0;
  bool thin_ok = true;
  std::string detail;
  for (const auto& name : synthetic_object_names()) {
    const ObjectSurface object(load_object(data_dir() / "objects" / (name + ".obj")));
    std::size_t accepted = 0;
    for (const auto& r : plan(object, m, cfg)) accepted += r.accepted ? 1 : 0;
    total += static_cast<double>(accepted);
    if (name == "low_box" && static_cast<double>(accepted) < kThinObjectAccepted) thin_ok = false;
    detail += name + " " + std::to_string(accepted) + "/10, ";
  }
  const double mean = total / static_cast<double>(synthetic_object_names().size());
  return {mean >= kSuiteMeanAccepted && thin_ok, detail + "mean " + fmt("%.2f", mean)};
}

// 6. Per-sample wall time from the plan manifest.
Outcome timing() {
  const fs::path dir = scratch("acceptance_timing");
  cli({"plan", "--object", (data_dir() / "objects" / "bunny.obj").string(), "--samples", "10", "--seed", "7",
       "--out", (dir / "r.json").string()});
  const auto manifest = nlohmann::json::parse(read_file(dir / "r.manifest.json"));
  double worst = 0.0;
  for (const auto& g : manifest["grasps"]) worst = std::max(worst, g["wall_time_s"].get<double>());
  const auto hand_points = default_hand_model().num_surface_points();
  const auto t_max = manifest["config"]["t_max"].get<int>();
  return {worst <= kPerSampleBudgetS && hand_points == 1798 && t_max == 40 && manifest["grasps"].size() == 10,
          "max " + fmt("%.3f", worst) + " s/sample, mean " +
              fmt("%.3f", manifest["aggregate"]["mean_wall_time_s"].get<double>()) + " s/sample"};
}

// 7. Recorded w(t) matches the frozen table bit for bit.
Outcome schedule() {
  const fs::path dir = scratch("acceptance_schedule");
  cli({"plan", "--object", (data_dir() / "objects" / "sphere.obj").string(), "--samples", "2", "--seed", "7",
       "--out", (dir / "r.json").string()});
  int mismatched = 0;
  std::size_t rows = 0;
  for (const auto& g : load_results(dir / "r.json").grasps) {
    if (g.trace.size() != 41) ++mismatched;
    for (const auto& e : g.trace) {
      ++rows;
      if (std::bit_cast<std::uint64_t>(e.w) != std::bit_cast<std::uint64_t>(kPenaltySchedule[e.t])) ++mismatched;
    }
  }
  const PlannerConfig cfg;
  for (int t = 0; t <= 40; ++t) {
    if (std::bit_cast<std::uint64_t>(penalty_weight(cfg, t)) != std::bit_cast<std::uint64_t>(kPenaltySchedule[t])) {
      ++mismatched;
    }
  }
  return {mismatched == 0 && rows == 82, std::to_string(rows) + " trace rows, " + std::to_string(mismatched) + " mismatches"};
}

// 8. Same seed and worker count give byte-identical results files.
Outcome determinism() {
  const fs::path dir = scratch("acceptance_determinism");
  std::string files[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("r" + std::to_string(i) + ".json");
    cli({"plan", "--object", (data_dir() / "objects" / "torus.obj").string(), "--samples", "6", "--seed", "7",
         "--workers", "2", "--out", out.string()});
    files[i] = read_file(out);
  }
  return {!files[0].empty() && files[0] == files[1], std::to_string(files[0].size()) + " bytes compared"};
}

}  // namespace

int main() {
  const HandModel model = default_hand_model();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"jacobian finite differences", [&] { return jacobians(model); }},
      {"solver optimality", [] { return solvers(); }},
      {"collision oracle equivalence", [&] { return collision_oracle(model); }},
      {"bunny convergence", [&] { return convergence(model); }},
      {"success rate on synthetic suite", [&] { return success_rate(model); }},
      {"per-sample timing", [] { return timing(); }},
      {"penalty schedule", [] { return schedule(); }},
      {"byte-identical results", [] { return determinism(); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
