#include "cli.hpp"

#include "grasp/contact_quality.hpp"
#include "grasp/hand_io.hpp"
#include "grasp/mesh_io.hpp"
#include "grasp/planner.hpp"
#include "grasp/results_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace grasp::cli {
namespace {

namespace fs = std::filesystem;

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level_from_env() {
  const char* v = std::getenv("GRASP_LOG_LEVEL");
  if (v == nullptr) return LogLevel::warn;
  const std::string s(v);
  if (s == "error") return LogLevel::error;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

class Logger {
 public:
  Logger(std::ostream& sink, LogLevel level) : sink_(sink), level_(level) {}
  void log(LogLevel level, const std::string& msg) const {
    static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
    if (level <= level_) sink_ << "[" << kNames[static_cast<int>(level)] << "] " << msg << '\n';
  }

 private:
  std::ostream& sink_;
  LogLevel level_;
};

struct PlanOptions {
  std::string object;
  std::string hand;
  std::size_t samples = 10;
  std::uint64_t seed = 0;
  int tmax = 40;
  double beta = 0.03;
  double w0 = 1.0;
  double w_growth = 1.1;
  std::size_t k_clusters = 10;
  std::string out = "results.json";
  std::string manifest;
  std::string export_clouds;
  std::size_t workers = 1;
  std::size_t object_samples = 2000;
};

struct TraceOptions {
  std::string results;
  std::size_t grasp = 0;
  bool aggregate = false;
  std::string out;
};

struct ValidateOptions {
  std::string hand;
  std::string object;
  std::size_t object_samples = 2000;
};

HandModel load_hand(const std::string& path) {
  return path.empty() ? default_hand_model() : load_hand_model(path);
}

std::string hand_label(const std::string& path) { return path.empty() ? "builtin:default" : path; }

SurfacePointCloud load_object_cloud(const std::string& path, std::size_t samples) {
  ObjectLoadOptions options;
  options.mesh_samples = samples;
  return load_object(path, options);
}

void export_posed_cloud(const fs::path& path, const PosedHand& posed) {
  std::vector<Vec3> pts, nrm;
  for (const auto& link : posed.links) {
    pts.insert(pts.end(), link.points.begin(), link.points.end());
    nrm.insert(nrm.end(), link.normals.begin(), link.normals.end());
  }
  save_ply(path, SurfacePointCloud(std::move(pts), std::move(nrm)));
}

int cmd_plan(const PlanOptions& o, std::ostream& out, const Logger& log) {
  PlannerConfig cfg;
  cfg.n_samples = o.samples;
  cfg.seed = o.seed;
  cfg.t_max = o.tmax;
  cfg.beta = o.beta;
  cfg.w0 = o.w0;
  cfg.w_growth = o.w_growth;
  cfg.k_clusters = o.k_clusters;
  cfg.workers = o.workers;
  cfg.validate();

  const HandModel model = load_hand(o.hand);
  log.log(LogLevel::info, "hand: " + std::to_string(model.num_surface_points()) + " points");
  const ObjectSurface object(load_object_cloud(o.object, o.object_samples));
  log.log(LogLevel::info, "object: " + std::to_string(object.cloud().size()) + " points");

  const auto start = std::chrono::steady_clock::now();
  const std::vector<GraspResult> results = plan(object, model, cfg);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const RunInputs inputs{o.object, hand_label(o.hand)};
  write_text_file(o.out, results_to_json(results, cfg, inputs));
  const std::string manifest =
      o.manifest.empty() ? (fs::path(o.out).replace_extension().string() + ".manifest.json") : o.manifest;
  write_text_file(manifest, manifest_to_json(results, cfg, inputs, o.out, total));

  if (!o.export_clouds.empty()) {
    const fs::path dir(o.export_clouds);
    fs::create_directories(dir);
    save_ply(dir / "object.ply", object.cloud());
    for (std::size_t i = 0; i < results.size(); ++i) {
      std::ostringstream name;
      name << "grasp_" << std::setw(3) << std::setfill('0') << i << "_hand.ply";
      export_posed_cloud(dir / name.str(), forward_kinematics(model, results[i].final_state));
    }
  }

  std::size_t accepted = 0;
  double wall = 0.0;
  for (const auto& r : results) {
    accepted += r.accepted ? 1 : 0;
    wall += r.wall_time_s;
    if (!r.error.empty()) log.log(LogLevel::warn, "sample " + std::to_string(r.sample_index) + ": " + r.error);
    log.log(LogLevel::debug, "sample " + std::to_string(r.sample_index) +
                                 ": E_quality=" + std::to_string(r.e_quality()) +
                                 " E_penalty=" + std::to_string(r.e_penalty()) +
                                 (r.accepted ? " accepted" : ""));
  }
  std::ostringstream line;
  line << "accepted " << accepted << "/" << results.size() << "  time " << std::fixed
       << std::setprecision(3) << total << " s";
  if (!results.empty()) line << " (" << wall / static_cast<double>(results.size()) << " s/sample)";
  out << line.str() << '\n';
  return accepted > 0 ? 0 : 2;
}

void write_trace_csv(const ResultsSummary::Grasp& g, std::ostream& os) {
  os << "t,w,E_quality,E_penalty,E_col,E_cls\n" << std::setprecision(17);
  for (const auto& e : g.trace) {
    os << e.t << ',' << e.w << ',' << e.e_quality << ',' << e.e_penalty() << ',' << e.e_col << ','
       << e.e_cls << '\n';
  }
}

void write_aggregate_csv(const ResultsSummary& s, std::ostream& os) {
  os << "t,n,mean_E_quality,std_E_quality,mean_E_penalty,std_E_penalty\n" << std::setprecision(17);
  std::size_t longest = 0;
  for (const auto& g : s.grasps) longest = std::max(longest, g.trace.size());
  for (std::size_t k = 0; k < longest; ++k) {
    double n = 0.0, sq = 0.0, sq2 = 0.0, sp = 0.0, sp2 = 0.0;
    int t = 0;
    for (const auto& g : s.grasps) {
      if (k >= g.trace.size()) continue;
      const TraceEntry& e = g.trace[k];
      t = e.t;
      n += 1.0;
      sq += e.e_quality;
      sq2 += e.e_quality * e.e_quality;
      sp += e.e_penalty();
      sp2 += e.e_penalty() * e.e_penalty();
    }
    const double mq = sq / n, mp = sp / n;
    const double vq = std::max(0.0, sq2 / n - mq * mq), vp = std::max(0.0, sp2 / n - mp * mp);
    os << t << ',' << n << ',' << mq << ',' << std::sqrt(vq) << ',' << mp << ',' << std::sqrt(vp) << '\n';
  }
}

int cmd_trace(const TraceOptions& o, std::ostream& out) {
  const ResultsSummary s = load_results(o.results);
  std::ostringstream csv;
  if (o.aggregate) {
    write_aggregate_csv(s, csv);
  } else {
    if (o.grasp >= s.grasps.size()) {
      throw std::invalid_argument("--grasp " + std::to_string(o.grasp) + " out of range (file has " +
                                  std::to_string(s.grasps.size()) + " grasps)");
    }
    write_trace_csv(s.grasps[o.grasp], csv);
  }
  if (o.out.empty()) {
    out << csv.str();
  } else {
    write_text_file(o.out, csv.str());
  }
  return 0;
}

int cmd_validate(const ValidateOptions& o, std::ostream& out) {
  if (!o.hand.empty() || o.object.empty()) {
    const HandModel model = load_hand(o.hand);
    out << "hand: " << model.num_surface_points() << " points, " << model.num_fingers() << " fingers, "
        << model.num_joints() << " joints\n";
  }
  if (!o.object.empty()) {
    const SurfacePointCloud cloud = load_object_cloud(o.object, o.object_samples);
    out << "object: " << cloud.size() << " points\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Logger log(err, log_level_from_env());
  CLI::App app{"Precision-grasp planner for multi-fingered hands"};
  app.require_subcommand(1);

  PlanOptions plan_opts;
  CLI::App* plan_cmd = app.add_subcommand("plan", "Plan grasps on an object");
  plan_cmd->add_option("--object", plan_opts.object, "Object mesh (.obj/.ply) or point cloud (.ply)")->required();
  plan_cmd->add_option("--hand", plan_opts.hand, "Hand model file (default: bundled three-finger hand)");
  plan_cmd->add_option("--samples", plan_opts.samples, "Number of sampled initial configurations")->capture_default_str();
  plan_cmd->add_option("--seed", plan_opts.seed, "Random seed")->capture_default_str();
  plan_cmd->add_option("--tmax", plan_opts.tmax, "Iterations per sample")->capture_default_str();
  plan_cmd->add_option("--beta", plan_opts.beta, "Normal-alignment weight")->capture_default_str();
  plan_cmd->add_option("--w0", plan_opts.w0, "Initial penalty weight")->capture_default_str();
  plan_cmd->add_option("--w-growth", plan_opts.w_growth, "Penalty growth factor per iteration")->capture_default_str();
  plan_cmd->add_option("--k-clusters", plan_opts.k_clusters, "Surface clusters for guided sampling")->capture_default_str();
  plan_cmd->add_option("--out", plan_opts.out, "Results file (JSON)")->capture_default_str();
  plan_cmd->add_option("--manifest", plan_opts.manifest, "Manifest file (default: <out>.manifest.json)");
  plan_cmd->add_option("--export-clouds", plan_opts.export_clouds, "Directory for posed hand/object PLY exports");
  plan_cmd->add_option("--workers", plan_opts.workers, "Samples run in parallel")->capture_default_str();
  plan_cmd->add_option("--object-samples", plan_opts.object_samples, "Points sampled from object meshes")->capture_default_str();

  TraceOptions trace_opts;
  CLI::App* trace_cmd = app.add_subcommand("trace", "Print per-iteration error profiles as CSV");
  trace_cmd->add_option("results", trace_opts.results, "Results file written by plan")->required();
  trace_cmd->add_option("--grasp", trace_opts.grasp, "Grasp rank in the results file")->capture_default_str();
  trace_cmd->add_flag("--aggregate", trace_opts.aggregate, "Mean and std over all grasps per iteration");
  trace_cmd->add_option("--out", trace_opts.out, "CSV output file (default: stdout)");

  ValidateOptions validate_opts;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check hand and object files");
  validate_cmd->add_option("--hand", validate_opts.hand, "Hand model file");
  validate_cmd->add_option("--object", validate_opts.object, "Object file");
  validate_cmd->add_option("--object-samples", validate_opts.object_samples, "Points sampled from object meshes")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const CLI::App* c : {plan_cmd, trace_cmd, validate_cmd}) {
      if (c->parsed()) sub = c;
    }
    err << (sub != nullptr ? sub->help() : app.help());
    return 1;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(plan_opts, out, log);
    if (trace_cmd->parsed()) return cmd_trace(trace_opts, out);
    return cmd_validate(validate_opts, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace grasp::cli
