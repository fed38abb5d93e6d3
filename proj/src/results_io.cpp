#include "grasp/results_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#ifndef GRASP_VERSION
#define GRASP_VERSION "0.0.0"
#endif

namespace grasp {
namespace {

using nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json pose_json(const RigidTransform& pose) {
  json r = json::array();
  for (int i = 0; i < 9; ++i) r.push_back(pose.rotation()(i / 3, i % 3));
  return {{"rotation", r}, {"translation", vec_json(pose.translation())}};
}

json state_json(const HandState& s) { return {{"pose", pose_json(s.pose())}, {"q", vector_json(s.q())}}; }

json config_json(const PlannerConfig& cfg) {
  return {{"t_max", cfg.t_max},
          {"w0", cfg.w0},
          {"w_growth", cfg.w_growth},
          {"beta", cfg.beta},
          {"n_samples", cfg.n_samples},
          {"k_clusters", cfg.k_clusters},
          {"standoff", cfg.standoff},
          {"seed", cfg.seed},
          {"e_cls_tol", cfg.e_cls_tol},
          {"collision_margin", cfg.collision_margin},
          {"trust_region", {{"max_rotation", cfg.trust_region.max_rotation},
                            {"max_translation", cfg.trust_region.max_translation}}},
          {"jpo", {{"max_iterations", cfg.jpo.max_iterations},
                   {"tolerance", cfg.jpo.tolerance},
                   {"power_iterations", cfg.jpo.power_iterations},
                   {"refine_free_set", cfg.jpo.refine_free_set}}},
          {"workers", cfg.workers}};
}

json inputs_json(const RunInputs& in) { return {{"object", in.object}, {"hand", in.hand}}; }

json grasp_json(const GraspResult& r, std::size_t rank) {
  json contacts = json::array();
  for (const auto& c : r.contacts.fingers) {
    contacts.push_back({{"contact", vec_json(c.contact)},
                        {"contact_normal", vec_json(c.contact_normal)},
                        {"fingertip", vec_json(c.fingertip)},
                        {"fingertip_normal", vec_json(c.fingertip_normal)},
                        {"normal_fallback", c.normal_fallback}});
  }
  json trace = json::array();
  for (const auto& e : r.trace) {
    trace.push_back({{"t", e.t},
                     {"w", e.w},
                     {"e_quality", e.e_quality},
                     {"e_penalty", e.e_penalty()},
                     {"e_col", e.e_col},
                     {"e_cls", e.e_cls}});
  }
  return {{"rank", rank},
          {"sample_index", r.sample_index},
          {"cluster", r.cluster},
          {"accepted", r.accepted},
          {"collision_free", r.collision_free},
          {"error", r.error.empty() ? json(nullptr) : json(r.error)},
          {"e_quality", r.e_quality()},
          {"e_penalty", r.e_penalty()},
          {"q_com", r.quality.q_com},
          {"q_jc", r.quality.q_jc},
          {"q_align", r.quality.q_align},
          {"e_col", r.e_col},
          {"e_cls", r.quality.e_cls},
          {"object_pairs", r.object_pairs},
          {"ground_pairs", r.ground_pairs},
          {"n_perp", vec_json(r.quality.n_perp)},
          {"initial_state", state_json(r.initial_state)},
          {"final_state", state_json(r.final_state)},
          {"contacts", contacts},
          {"trace", trace}};
}

std::size_t count_accepted(const std::vector<GraspResult>& results) {
  std::size_t n = 0;
  for (const auto& r : results) n += r.accepted ? 1 : 0;
  return n;
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ResultsFormatError(path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ResultsFormatError(path + "." + key + ": missing field");
  return *it;
}

double number_field(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_number()) throw ResultsFormatError(path + "." + key + ": expected a number");
  return v.get<double>();
}

bool bool_field(const json& obj, const std::string& path, const char* key) {
  const json& v = field(obj, path, key);
  if (!v.is_boolean()) throw ResultsFormatError(path + "." + key + ": expected a boolean");
  return v.get<bool>();
}

}  // namespace

const char* code_version() { return GRASP_VERSION; }

std::string results_to_json(const std::vector<GraspResult>& results, const PlannerConfig& cfg,
                            const RunInputs& inputs) {
  json grasps = json::array();
  std::size_t collision_free = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    grasps.push_back(grasp_json(results[i], i));
    collision_free += results[i].collision_free ? 1 : 0;
  }
  const json doc = {{"schema", "grasp-results"},
                    {"schema_version", kResultsSchemaVersion},
                    {"inputs", inputs_json(inputs)},
                    {"config", config_json(cfg)},
                    {"summary",
                     {{"samples", results.size()},
                      {"accepted", count_accepted(results)},
                      {"collision_free", collision_free}}},
                    {"grasps", grasps}};
  return doc.dump(1) + "\n";
}

std::string manifest_to_json(const std::vector<GraspResult>& results, const PlannerConfig& cfg,
                             const RunInputs& inputs, const std::string& results_path,
                             double total_wall_time_s) {
  json grasps = json::array();
  double sum = 0.0;
  for (const auto& r : results) {
    grasps.push_back({{"sample_index", r.sample_index},
                      {"accepted", r.accepted},
                      {"wall_time_s", r.wall_time_s}});
    sum += r.wall_time_s;
  }
  const json doc = {
      {"schema", "grasp-manifest"},
      {"schema_version", kResultsSchemaVersion},
      {"code_version", code_version()},
      {"inputs", inputs_json(inputs)},
      {"config", config_json(cfg)},
      {"seed", cfg.seed},
      {"results_file", results_path},
      {"grasps", grasps},
      {"aggregate",
       {{"total", results.size()},
        {"accepted", count_accepted(results)},
        {"mean_wall_time_s", results.empty() ? 0.0 : sum / static_cast<double>(results.size())},
        {"total_wall_time_s", total_wall_time_s}}}};
  return doc.dump(1) + "\n";
}

ResultsSummary parse_results(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ResultsFormatError(std::string("invalid JSON: ") + e.what());
  }
  const json& schema = field(doc, "$", "schema");
  if (schema != "grasp-results") throw ResultsFormatError("$.schema: not a grasp results file");
  const json& version = field(doc, "$", "schema_version");
  if (version != kResultsSchemaVersion) throw ResultsFormatError("$.schema_version: unsupported version");
  const json& grasps = field(doc, "$", "grasps");
  if (!grasps.is_array()) throw ResultsFormatError("$.grasps: expected an array");

  ResultsSummary out;
  for (std::size_t i = 0; i < grasps.size(); ++i) {
    const std::string gp = "$.grasps[" + std::to_string(i) + "]";
    const json& g = grasps[i];
    ResultsSummary::Grasp grasp;
    const json& idx = field(g, gp, "sample_index");
    if (!idx.is_number_unsigned()) throw ResultsFormatError(gp + ".sample_index: expected an index");
    grasp.sample_index = idx.get<std::size_t>();
    grasp.accepted = bool_field(g, gp, "accepted");
    grasp.collision_free = bool_field(g, gp, "collision_free");
    grasp.e_quality = number_field(g, gp, "e_quality");
    grasp.e_penalty = number_field(g, gp, "e_penalty");
    const json& trace = field(g, gp, "trace");
    if (!trace.is_array()) throw ResultsFormatError(gp + ".trace: expected an array");
    for (std::size_t k = 0; k < trace.size(); ++k) {
      const std::string tp = gp + ".trace[" + std::to_string(k) + "]";
      TraceEntry e;
      const json& t = field(trace[k], tp, "t");
      if (!t.is_number_integer()) throw ResultsFormatError(tp + ".t: expected an integer");
      e.t = t.get<int>();
      e.w = number_field(trace[k], tp, "w");
      e.e_quality = number_field(trace[k], tp, "e_quality");
      e.e_col = number_field(trace[k], tp, "e_col");
      e.e_cls = number_field(trace[k], tp, "e_cls");
      grasp.trace.push_back(e);
    }
    out.grasps.push_back(std::move(grasp));
  }
  return out;
}

ResultsSummary load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResultsFormatError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_results(ss.str());
  } catch (const ResultsFormatError& e) {
    throw ResultsFormatError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace grasp
